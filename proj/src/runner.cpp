#include <openssl/evp.h>

#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "subdiff/run_config.hpp"
#include "subdiff/spectral.hpp"
#include "subdiff/stochastic.hpp"
#include "subdiff/verify.hpp"

#ifndef SUBDIFF_VERSION
#define SUBDIFF_VERSION "0.0.0-dev"
#endif

namespace subdiff {

namespace fs = std::filesystem;
using nlohmann::json;

std::string version_string() { return SUBDIFF_VERSION; }

namespace {

std::string fmt(double v) {
  char buf[64];
  const auto res =
      std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (ctx == nullptr) throw std::runtime_error("digest context allocation failed");
  bool ok = EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) == 1 &&
            EVP_DigestUpdate(ctx, data.data(), data.size()) == 1 &&
            EVP_DigestFinal_ex(ctx, md, &len) == 1;
  EVP_MD_CTX_free(ctx);
  if (!ok) throw std::runtime_error("sha256 computation failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

void atomic_write(const fs::path& p, const std::string& content) {
  const fs::path tmp = p.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    os.write(content.data(), static_cast<std::streamsize>(content.size()));
    os.flush();
    if (!os) throw std::runtime_error("failed writing " + tmp.string());
  }
  fs::rename(tmp, p);
}

using ArtifactList = std::vector<std::pair<std::string, std::string>>;

InitialData load_csv_datum(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::invalid_argument("cannot open initial-datum file " + path);
  std::vector<double> xs, fs_vals;
  std::string line;
  size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string a, b;
    if (!std::getline(ls, a, ',') || !std::getline(ls, b))
      throw std::invalid_argument(path + ": expected two comma-separated columns");
    try {
      xs.push_back(std::stod(a));
      fs_vals.push_back(std::stod(b));
    } catch (const std::exception&) {
      if (lineno == 1) continue;  // header row
      throw std::invalid_argument(path + ": non-numeric row " + std::to_string(lineno));
    }
  }
  if (xs.size() < 2)
    throw std::invalid_argument(path + ": need at least two sample rows");
  return sampled_datum(std::move(xs), std::move(fs_vals));
}

InitialData make_datum(const RunConfig& cfg, const SpectralModel* model) {
  switch (cfg.f.kind) {
    case DatumSpec::Kind::Poly:
      return poly_datum(cfg.op);
    case DatumSpec::Kind::Bump:
      return bump_datum(cfg.op);
    case DatumSpec::Kind::Csv:
      return load_csv_datum(cfg.f.csv_path);
    case DatumSpec::Kind::Mode:
      break;
  }
  if (dimension(cfg.op) == 2) {
    for (int n = 0; n < model->size(); ++n)
      if (model->rect_mode(n) ==
          std::make_pair(cfg.f.mode_index, cfg.f.mode_index_y))
        return mode_datum(*model, n);
    throw std::invalid_argument("requested mode pair is outside the resolved set");
  }
  if (cfg.f.mode_index > model->size())
    throw std::invalid_argument("requested mode index exceeds n_modes");
  return mode_datum(*model, cfg.f.mode_index - 1);
}

std::string solution_csv(const SolutionGrid& grid, int dim, bool with_mc_columns,
                         const std::vector<McEstimate>* ests) {
  std::string out = dim == 2 ? "t,x,y,u" : "t,x,u";
  if (with_mc_columns) out += ",std_error,alive_fraction";
  out += "\n";
  for (size_t i = 0; i < grid.times.size(); ++i)
    for (size_t j = 0; j < grid.points.size(); ++j) {
      out += fmt(grid.times[i]);
      out += ',';
      out += fmt(grid.points[j].x);
      if (dim == 2) {
        out += ',';
        out += fmt(grid.points[j].y);
      }
      out += ',';
      out += fmt(grid.at(static_cast<int>(i), static_cast<int>(j)));
      if (with_mc_columns) {
        const McEstimate& e = (*ests)[i * grid.points.size() + j];
        out += ',';
        out += fmt(e.std_error);
        out += ',';
        out += fmt(e.alive_fraction);
      }
      out += '\n';
    }
  return out;
}

int run_ml(const RunConfig& cfg, std::ostream& log, ArtifactList& artifacts) {
  double value, bound;
  if (cfg.beta_is_one) {
    value = std::exp(-cfg.ml_x);
    bound = 4e-16 * value;
  } else {
    const MlValue mv = mittag_leffler(FracOrder(cfg.beta), -cfg.ml_x);
    value = mv.value;
    bound = mv.abs_error_bound;
  }
  log << "E_beta(-x) = " << fmt(value) << "  (beta=" << fmt(cfg.beta_is_one ? 1.0 : cfg.beta)
      << ", x=" << fmt(cfg.ml_x) << ", abs_error_bound=" << fmt(bound) << ")\n";
  json j = {{"beta", cfg.beta_is_one ? 1.0 : cfg.beta},
            {"x", cfg.ml_x},
            {"value", value},
            {"abs_error_bound", bound}};
  artifacts.emplace_back("report.json", j.dump(2));
  return 0;
}

int run_density(const RunConfig& cfg, std::ostream& log, ArtifactList& artifacts) {
  const FracOrder beta(cfg.beta);
  std::string csv = "x,value\n";
  for (double x : cfg.density_x) {
    double v;
    if (cfg.density_kind == "stable")
      v = stable_density(beta, x);
    else if (cfg.density_kind == "inverse")
      v = inverse_subordinator_density(beta, cfg.density_t, x);
    else
      v = half_bm_density(cfg.density_t, x);
    csv += fmt(x);
    csv += ',';
    csv += fmt(v);
    csv += '\n';
  }
  artifacts.emplace_back("density.csv", csv);
  log << "wrote " << cfg.density_x.size() << " density values (" << cfg.density_kind
      << ")\n";
  return 0;
}

int run_eigs(const RunConfig& cfg, std::ostream& log, ArtifactList& artifacts) {
  const SpectralModel model = eigenpairs(cfg.op, cfg.n_modes);
  std::string csv = "index,eigenvalue,norm_check\n";
  for (int n = 0; n < model.size(); ++n) {
    const Eigenmode m = model.mode(n);
    csv += std::to_string(m.index);
    csv += ',';
    csv += fmt(m.eigenvalue);
    csv += ',';
    csv += fmt(m.norm_check);
    csv += '\n';
  }
  artifacts.emplace_back("eigs.csv", csv);
  log << "computed " << model.size() << " eigenpairs of " << describe(cfg.op) << "\n";
  return 0;
}

int run_solve_spectral(const RunConfig& cfg, std::ostream& log,
                       ArtifactList& artifacts) {
  const SpectralModel model = eigenpairs(cfg.op, cfg.n_modes);
  const InitialData f = make_datum(cfg, &model);
  const SpectralCoefficients coeffs = transform(model, f);
  const bool fourth = cfg.command == Command::SolveFourth;
  const SolutionGrid grid =
      fourth ? solve_fourth_order(model, coeffs, cfg.times, cfg.points)
             : solve_fractional(model, coeffs, FracOrder(cfg.beta), cfg.times,
                                cfg.points);
  artifacts.emplace_back("solution.csv",
                         solution_csv(grid, model.dim(), false, nullptr));

  json rep = {{"route", fourth ? "fourth_order" : "spectral"},
              {"n_modes", model.size()},
              {"datum", f.name},
              {"coeff_l2_norm_sq", coeffs.l2_norm_sq}};
  try {
    const SmoothnessReport sm = smoothness_diagnostic(coeffs, model);
    rep["smoothness"] = {{"k_hat", sm.k_hat},
                         {"threshold", sm.threshold},
                         {"meets_threshold", sm.meets_threshold},
                         {"finite_expansion", sm.finite_expansion},
                         {"n_fit", sm.n_fit}};
    if (!sm.meets_threshold)
      log << "note: coefficient decay k_hat=" << fmt(sm.k_hat)
          << " is below the heat-kernel comparison threshold "
          << fmt(sm.threshold) << "\n";
  } catch (const std::invalid_argument&) {
    // too few usable coefficients for the fit; diagnostic omitted
  }
  artifacts.emplace_back("report.json", rep.dump(2));
  log << "solved at " << cfg.times.size() << " time(s), " << cfg.points.size()
      << " point(s) via " << (fourth ? "fourth-order" : "spectral")
      << " route\n";
  return 0;
}

int run_solve_paths(const RunConfig& cfg, std::ostream& log,
                    ArtifactList& artifacts) {
  const bool ibm = cfg.command == Command::SolveIbm;
  std::optional<SpectralModel> model;
  if (cfg.f.kind == DatumSpec::Kind::Mode)
    model = eigenpairs(cfg.op, cfg.n_modes);
  const InitialData f = make_datum(cfg, model ? &*model : nullptr);
  SolutionGrid grid;
  grid.times = cfg.times;
  grid.points = cfg.points;
  grid.values.assign(cfg.times.size() * cfg.points.size(), 0.0);
  std::vector<McEstimate> ests(grid.values.size());
  std::uint64_t cell = 0;
  for (size_t i = 0; i < cfg.times.size(); ++i)
    for (size_t j = 0; j < cfg.points.size(); ++j) {
      const RngSpec cell_rng = substream(cfg.rng, cell++);
      const McEstimate est =
          ibm ? solve_ibm(cfg.op, f, cfg.times[i], cfg.points[j], cfg.mc, cell_rng)
              : solve_mc(cfg.op, f, FracOrder(cfg.beta), cfg.times[i],
                         cfg.points[j], cfg.mc, cell_rng, cfg.mc_mode);
      grid.values[i * cfg.points.size() + j] = est.mean;
      ests[i * cfg.points.size() + j] = est;
    }
  artifacts.emplace_back("solution.csv",
                         solution_csv(grid, dimension(cfg.op), true, &ests));
  log << "estimated " << grid.values.size() << " cell(s) over "
      << cfg.mc.n_paths << " paths each\n";
  return 0;
}

int run_ctrw(const RunConfig& cfg, std::ostream& log, ArtifactList& artifacts) {
  const CtrwConfig cc{FracOrder(cfg.beta), cfg.ctrw_scale_c, cfg.ctrw_horizon,
                      cfg.ctrw_walkers};
  const std::vector<double> counts = ctrw_scaled_counts(cc, cfg.rng);
  std::string csv = "scaled_count\n";
  double mean = 0.0;
  for (double v : counts) {
    csv += fmt(v);
    csv += '\n';
    mean += v;
  }
  mean /= static_cast<double>(counts.size());
  const double theory =
      std::pow(cfg.ctrw_horizon, cfg.beta) / std::tgamma(1.0 + cfg.beta);
  artifacts.emplace_back("counts.csv", csv);
  json rep = {{"beta", cfg.beta},
              {"scale_c", cfg.ctrw_scale_c},
              {"horizon_t", cfg.ctrw_horizon},
              {"n_walkers", cfg.ctrw_walkers},
              {"mean", mean},
              {"limit_mean", theory}};
  artifacts.emplace_back("report.json", rep.dump(2));
  log << "scaled renewal counts: mean=" << fmt(mean) << " limit=" << fmt(theory)
      << "\n";
  return 0;
}

int run_verify(const RunConfig& cfg, std::ostream& log, ArtifactList& artifacts) {
  const FracOrder beta(cfg.beta);
  bool all_pass = true;

  const std::vector<double> dts = {4.0 * cfg.verify_dt, 2.0 * cfg.verify_dt,
                                   cfg.verify_dt};
  std::vector<double> residuals;
  ml_eigen_residuals(beta, dts, 0.5, 2.0, &residuals);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < dts.size(); ++i) {
    sx += std::log(dts[i]);
    sy += std::log(residuals[i]);
    sxx += std::log(dts[i]) * std::log(dts[i]);
    sxy += std::log(dts[i]) * std::log(residuals[i]);
  }
  const double n = static_cast<double>(dts.size());
  const double order = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double expected = 2.0 - cfg.beta;
  const bool order_pass = std::abs(order - expected) <= 0.15;
  all_pass = all_pass && order_pass;
  json l1 = {{"dts", dts},
             {"max_residuals", residuals},
             {"order", order},
             {"expected_order", expected},
             {"tolerance", 0.15},
             {"pass", order_pass}};
  log << "L1 eigen-relation order: " << fmt(order) << " (expected "
      << fmt(expected) << ") " << (order_pass ? "pass" : "FAIL") << "\n";

  json subs = json::array();
  for (double lambda : {1.0, 5.0, 25.0})
    for (double t : {0.1, 1.0, 10.0}) {
      const SubordinationCheck chk = subordination_identity(beta, lambda, t);
      const double gap = std::abs(chk.lhs - chk.rhs);
      const bool pass = gap <= 1e-6;
      all_pass = all_pass && pass;
      subs.push_back({{"lambda", lambda},
                      {"t", t},
                      {"lhs", chk.lhs},
                      {"rhs", chk.rhs},
                      {"gap", gap},
                      {"quad_error", chk.quad_error},
                      {"pass", pass}});
      if (!pass)
        log << "subordination identity FAIL at lambda=" << fmt(lambda)
            << " t=" << fmt(t) << " gap=" << fmt(gap) << "\n";
    }

  json rep = {{"beta", cfg.beta},
              {"l1_eigen_relation", l1},
              {"subordination", subs},
              {"all_pass", all_pass}};
  artifacts.emplace_back("report.json", rep.dump(2));
  log << "verify: " << (all_pass ? "all checks passed" : "CHECKS FAILED") << "\n";
  return all_pass ? 0 : 1;
}

int run_equivalence(const RunConfig& cfg, std::ostream& log,
                    ArtifactList& artifacts) {
  const SpectralModel model = eigenpairs(cfg.op, cfg.n_modes);
  const InitialData f = make_datum(cfg, &model);
  EquivalenceConfig ec;
  ec.mc = cfg.mc;
  ec.rng = cfg.rng;
  const EquivalenceReport report =
      equivalence_suite(model, f, cfg.times, cfg.points, ec);
  artifacts.emplace_back("report.json", equivalence_report_json(report));
  for (const EquivalenceCell& cell : report.cells)
    log << "t=" << fmt(cell.t) << " x=" << fmt(cell.x.x)
        << (model.dim() == 2 ? "," + fmt(cell.x.y) : "")
        << (cell.pass ? " pass" : " FAIL") << "\n";
  log << "equivalence: " << (report.all_pass ? "all cells passed" : "CELLS FAILED")
      << "\n";
  return report.all_pass ? 0 : 1;
}

}  // namespace

int run(const RunConfig& config, std::ostream& log) {
  const auto t0 = std::chrono::steady_clock::now();
#ifdef _OPENMP
  if (config.threads > 0) omp_set_num_threads(config.threads);
#endif
  ArtifactList artifacts;
  int code = 0;
  std::string error;
  try {
    switch (config.command) {
      case Command::Ml: code = run_ml(config, log, artifacts); break;
      case Command::Density: code = run_density(config, log, artifacts); break;
      case Command::Eigs: code = run_eigs(config, log, artifacts); break;
      case Command::SolveSpectral:
      case Command::SolveFourth:
        code = run_solve_spectral(config, log, artifacts);
        break;
      case Command::SolveMc:
      case Command::SolveIbm:
        code = run_solve_paths(config, log, artifacts);
        break;
      case Command::Ctrw: code = run_ctrw(config, log, artifacts); break;
      case Command::Verify: code = run_verify(config, log, artifacts); break;
      case Command::Equivalence:
        code = run_equivalence(config, log, artifacts);
        break;
    }
  } catch (const std::invalid_argument& e) {
    error = e.what();
    code = 2;
  } catch (const std::domain_error& e) {
    error = e.what();
    code = 2;
  } catch (const std::exception& e) {
    error = e.what();
    code = 1;
  }
  if (!error.empty()) log << "error: " << error << "\n";

  try {
    const fs::path dir(config.output_dir);
    fs::create_directories(dir);
    json manifest;
    manifest["version"] = version_string();
    manifest["command"] = command_name(config.command);
    manifest["config"] = json::parse(config_echo_json(config));
    manifest["exit_code"] = code;
    if (!error.empty()) manifest["error"] = error;
    json arts = json::object();
    for (const auto& [name, content] : artifacts) {
      atomic_write(dir / name, content);
      arts[name] = {{"bytes", content.size()}, {"sha256", sha256_hex(content)}};
    }
    manifest["artifacts"] = arts;
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    manifest["wall_time_seconds"] = wall;
    atomic_write(dir / "manifest.json", manifest.dump(2));
  } catch (const std::exception& e) {
    log << "error writing artifacts: " << e.what() << "\n";
    if (code == 0) code = 1;
  }
  return code;
}

}  // namespace subdiff
