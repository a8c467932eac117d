#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "subdiff/run_config.hpp"

using nlohmann::json;

namespace {

json length_json(const std::string& s) {
  if (s == "pi") return "pi";
  try {
    size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw CLI::ValidationError("length", "expected a number or \"pi\", got \"" + s + "\"");
  }
}

int dispatch(const std::string& config_text) {
  subdiff::ValidationResult vr = subdiff::validate(config_text);
  if (auto* diags = std::get_if<std::vector<subdiff::Diagnostic>>(&vr)) {
    std::cerr << subdiff::diagnostics_json(*diags) << "\n";
    return 2;
  }
  return subdiff::run(std::get<subdiff::RunConfig>(vr), std::cout);
}

int dispatch_json(const json& doc) { return dispatch(doc.dump()); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-fractional diffusion on bounded domains: spectral, "
               "path-sampling, and fourth-order solvers with cross-checks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", subdiff::version_string());

  double beta = 0.5;
  double x = 0.0;
  double t = 1.0;
  double dt = 1.0 / 256.0;
  double scale_c = 1e4;
  double horizon = 1.0;
  long long walkers = 100000;
  long long seed = 0;
  long long modes = 100;
  int threads = 0;
  const char* env_out = std::getenv("SUBDIFF_OUT");
  std::string out_dir = (env_out != nullptr && *env_out != '\0') ? env_out : "out";
  std::string kind = "stable";
  std::string length = "pi";
  std::string ly;
  std::string config_path;
  std::vector<double> xs;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--output,--out", out_dir,
                    "output directory (default: $SUBDIFF_OUT, else \"out\")");
    cmd->add_option("--threads", threads, "worker threads (0 = library default)");
  };

  CLI::App* ml = app.add_subcommand("ml", "evaluate E_beta(-x)");
  ml->add_option("--beta", beta, "order in (0,1), or exactly 1 for the classical branch")
      ->required();
  ml->add_option("--x", x, "argument magnitude, x >= 0")->required();
  add_common(ml);

  CLI::App* density = app.add_subcommand(
      "density", "tabulate the stable, inverse-subordinator, or folded-normal density");
  density->add_option("--beta", beta, "order in (0,1)")->required();
  density->add_option("--kind", kind, "stable | inverse | halfbm");
  density->add_option("--x", xs, "evaluation points")->required()->expected(-1);
  density->add_option("--t", t, "time horizon for inverse | halfbm");
  add_common(density);

  CLI::App* eigs = app.add_subcommand("eigs", "tabulate Dirichlet eigenpairs");
  eigs->add_option("--length", length, "interval length (number or \"pi\")");
  eigs->add_option("--ly", ly, "second side; makes the domain a rectangle");
  eigs->add_option("--modes", modes, "number of modes");
  add_common(eigs);

  CLI::App* ctrw = app.add_subcommand(
      "ctrw", "scaled heavy-tailed renewal counts approaching the inverse subordinator");
  ctrw->add_option("--beta", beta, "tail exponent in (0,1)")->required();
  ctrw->add_option("--scale-c", scale_c, "time rescaling factor");
  ctrw->add_option("--horizon", horizon, "horizon t of N_{ct}");
  ctrw->add_option("--walkers", walkers, "number of independent walkers");
  ctrw->add_option("--seed", seed, "rng base seed");
  add_common(ctrw);

  CLI::App* verify = app.add_subcommand(
      "verify", "discrete fractional-derivative and subordination identity checks");
  verify->add_option("--beta", beta, "order in (0,1)")->required();
  verify->add_option("--dt", dt, "finest time step of the refinement ladder");
  add_common(verify);

  auto add_config_cmd = [&](const char* name, const char* help) {
    CLI::App* cmd = app.add_subcommand(name, help);
    cmd->add_option("--config", config_path, "JSON run configuration")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--seed", seed, "rng base seed (overrides the config)");
    add_common(cmd);
    return cmd;
  };
  add_config_cmd("solve-spectral", "eigenfunction-series solution of the fractional problem");
  add_config_cmd("solve-4th", "fourth-order route to the beta = 1/2 solution");
  add_config_cmd("solve-mc", "path-sampling solution over subordinated killed diffusions");
  add_config_cmd("solve-ibm", "path-sampling solution with the folded-normal clock");
  add_config_cmd("equivalence", "cross-route agreement suite at beta = 1/2");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int r = app.exit(e);
    return r == 0 ? 0 : 2;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    if (!config_path.empty()) {
      std::ifstream is(config_path);
      std::stringstream buf;
      buf << is.rdbuf();
      std::string text = buf.str();
      // the command on the command line wins over any "command" key present
      json doc = json::parse(text, nullptr, false);
      if (doc.is_discarded()) return dispatch(text);  // let validate() report it
      doc["command"] = name;
      if (sub->count("--output") > 0 || !doc.contains("output_dir"))
        doc["output_dir"] = out_dir;
      if (sub->count("--seed") > 0) doc["rng"]["base_seed"] = seed;
      if (threads > 0) doc["threads"] = threads;
      return dispatch_json(doc);
    }

    json doc;
    doc["command"] = name;
    doc["output_dir"] = out_dir;
    if (threads > 0) doc["threads"] = threads;
    if (name == "ml") {
      doc["beta"] = beta;
      doc["ml"] = {{"x", x}};
    } else if (name == "density") {
      doc["beta"] = beta;
      doc["density"] = {{"kind", kind}, {"x", xs}, {"t", t}};
    } else if (name == "eigs") {
      doc["n_modes"] = modes;
      if (ly.empty())
        doc["operator"] = {{"type", "interval"}, {"length", length_json(length)}};
      else
        doc["operator"] = {{"type", "rectangle"},
                           {"lx", length_json(length)},
                           {"ly", length_json(ly)}};
    } else if (name == "ctrw") {
      doc["beta"] = beta;
      doc["ctrw"] = {{"scale_c", scale_c},
                     {"horizon_t", horizon},
                     {"n_walkers", walkers}};
      doc["rng"] = {{"base_seed", seed}, {"stream_id", 0}};
    } else if (name == "verify") {
      doc["beta"] = beta;
      doc["verify"] = {{"dt", dt}};
    }
    return dispatch_json(doc);
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
