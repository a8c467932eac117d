#include "subdiff/run_config.hpp"

#include <cmath>
#include <map>
#include <set>

#include <json.hpp>

namespace subdiff {

using nlohmann::json;

const char* command_name(Command c) {
  switch (c) {
    case Command::Ml: return "ml";
    case Command::Density: return "density";
    case Command::Eigs: return "eigs";
    case Command::SolveSpectral: return "solve-spectral";
    case Command::SolveFourth: return "solve-4th";
    case Command::SolveMc: return "solve-mc";
    case Command::SolveIbm: return "solve-ibm";
    case Command::Ctrw: return "ctrw";
    case Command::Verify: return "verify";
    case Command::Equivalence: return "equivalence";
  }
  return "?";
}

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

void fail(std::vector<Diagnostic>& diags, std::string path, std::string msg) {
  diags.push_back({std::move(path), std::move(msg)});
}

void check_keys(const json& obj, const std::string& path,
                const std::set<std::string>& allowed,
                std::vector<Diagnostic>& diags) {
  for (const auto& item : obj.items())
    if (allowed.find(item.key()) == allowed.end())
      fail(diags, path + "/" + item.key(), "unknown key");
}

// plain number, or the string "pi" as a convenience for interval lengths
bool length_value(const json& v, const std::string& path,
                  std::vector<Diagnostic>& diags, double* out) {
  if (v.is_string()) {
    if (v.get<std::string>() == "pi") {
      *out = kPi;
      return true;
    }
    fail(diags, path, "expected a number or the string \"pi\"");
    return false;
  }
  if (!v.is_number()) {
    fail(diags, path, "expected a number");
    return false;
  }
  *out = v.get<double>();
  if (!(*out > 0.0) || !std::isfinite(*out)) {
    fail(diags, path, "must be positive and finite");
    return false;
  }
  return true;
}

bool number_field(const json& obj, const char* key, const std::string& path,
                  std::vector<Diagnostic>& diags, double* out) {
  if (!obj.contains(key)) return false;
  const json& v = obj.at(key);
  if (!v.is_number()) {
    fail(diags, path + "/" + key, "expected a number");
    return false;
  }
  *out = v.get<double>();
  if (!std::isfinite(*out)) {
    fail(diags, path + "/" + key, "must be finite");
    return false;
  }
  return true;
}

bool integer_field(const json& obj, const char* key, const std::string& path,
                   std::vector<Diagnostic>& diags, long long* out) {
  if (!obj.contains(key)) return false;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) {
    fail(diags, path + "/" + key, "expected an integer");
    return false;
  }
  *out = v.get<long long>();
  return true;
}

bool string_field(const json& obj, const char* key, const std::string& path,
                  std::vector<Diagnostic>& diags, std::string* out) {
  if (!obj.contains(key)) return false;
  const json& v = obj.at(key);
  if (!v.is_string()) {
    fail(diags, path + "/" + key, "expected a string");
    return false;
  }
  *out = v.get<std::string>();
  return true;
}

bool bool_field(const json& obj, const char* key, const std::string& path,
                std::vector<Diagnostic>& diags, bool* out) {
  if (!obj.contains(key)) return false;
  const json& v = obj.at(key);
  if (!v.is_boolean()) {
    fail(diags, path + "/" + key, "expected a boolean");
    return false;
  }
  *out = v.get<bool>();
  return true;
}

void parse_operator(const json& v, RunConfig& cfg, std::vector<Diagnostic>& diags) {
  const std::string path = "/operator";
  if (!v.is_object()) {
    fail(diags, path, "expected an object");
    return;
  }
  std::string type;
  if (!string_field(v, "type", path, diags, &type) ) {
    fail(diags, path + "/type", "required: interval | rectangle | divergence_1d");
    return;
  }
  if (type == "interval") {
    check_keys(v, path, {"type", "length"}, diags);
    IntervalLaplacian iv{kPi};
    if (v.contains("length")) length_value(v.at("length"), path + "/length", diags, &iv.length);
    cfg.op = iv;
  } else if (type == "rectangle") {
    check_keys(v, path, {"type", "lx", "ly"}, diags);
    RectangleLaplacian rc{kPi, kPi};
    if (v.contains("lx")) length_value(v.at("lx"), path + "/lx", diags, &rc.lx);
    if (v.contains("ly")) length_value(v.at("ly"), path + "/ly", diags, &rc.ly);
    cfg.op = rc;
  } else if (type == "divergence_1d") {
    check_keys(v, path,
               {"type", "length", "coefficient", "lambda_ell", "lambda_cap",
                "grid_points"},
               diags);
    DivergenceForm1D dv{kPi, Coefficient::constant(1.0), 0.25, 4.0, 512};
    if (v.contains("length")) length_value(v.at("length"), path + "/length", diags, &dv.length);
    number_field(v, "lambda_ell", path, diags, &dv.lambda_ell);
    number_field(v, "lambda_cap", path, diags, &dv.lambda_cap);
    long long gp = dv.grid_points;
    integer_field(v, "grid_points", path, diags, &gp);
    dv.grid_points = static_cast<int>(gp);
    if (!(dv.lambda_ell > 0.0) || dv.lambda_ell > 1.0)
      fail(diags, path + "/lambda_ell", "must lie in (0, 1]");
    if (!(dv.lambda_cap > 0.0)) fail(diags, path + "/lambda_cap", "must be positive");
    if (dv.grid_points < 16) fail(diags, path + "/grid_points", "must be at least 16");
    if (v.contains("coefficient")) {
      const json& cv = v.at("coefficient");
      const std::string cpath = path + "/coefficient";
      if (!cv.is_object()) {
        fail(diags, cpath, "expected an object");
      } else {
        std::string kind = "constant";
        string_field(cv, "kind", cpath, diags, &kind);
        if (kind == "constant") {
          check_keys(cv, cpath, {"kind", "value"}, diags);
          double c0 = 1.0;
          number_field(cv, "value", cpath, diags, &c0);
          dv.a = Coefficient::constant(c0);
        } else if (kind == "affine") {
          check_keys(cv, cpath, {"kind", "value", "slope"}, diags);
          double c0 = 1.0, c1 = 0.0;
          number_field(cv, "value", cpath, diags, &c0);
          number_field(cv, "slope", cpath, diags, &c1);
          dv.a = Coefficient::affine(c0, c1);
        } else {
          fail(diags, cpath + "/kind", "expected constant | affine");
        }
      }
    }
    cfg.op = dv;
  } else {
    fail(diags, path + "/type", "expected interval | rectangle | divergence_1d");
  }
}

void parse_datum(const json& v, RunConfig& cfg, std::vector<Diagnostic>& diags) {
  const std::string path = "/initial_datum";
  if (!v.is_object()) {
    fail(diags, path, "expected an object");
    return;
  }
  std::string kind;
  if (!string_field(v, "kind", path, diags, &kind)) {
    fail(diags, path + "/kind", "required: mode | poly | bump | csv");
    return;
  }
  if (kind == "mode") {
    check_keys(v, path, {"kind", "index", "index_y"}, diags);
    cfg.f.kind = DatumSpec::Kind::Mode;
    long long idx = 1, idy = 1;
    integer_field(v, "index", path, diags, &idx);
    integer_field(v, "index_y", path, diags, &idy);
    if (idx < 1) fail(diags, path + "/index", "mode indices are 1-based");
    if (idy < 1) fail(diags, path + "/index_y", "mode indices are 1-based");
    cfg.f.mode_index = static_cast<int>(idx);
    cfg.f.mode_index_y = static_cast<int>(idy);
  } else if (kind == "poly") {
    check_keys(v, path, {"kind"}, diags);
    cfg.f.kind = DatumSpec::Kind::Poly;
  } else if (kind == "bump") {
    check_keys(v, path, {"kind"}, diags);
    cfg.f.kind = DatumSpec::Kind::Bump;
  } else if (kind == "csv") {
    check_keys(v, path, {"kind", "path"}, diags);
    cfg.f.kind = DatumSpec::Kind::Csv;
    if (!string_field(v, "path", path, diags, &cfg.f.csv_path) ||
        cfg.f.csv_path.empty())
      fail(diags, path + "/path", "required for csv data");
  } else {
    fail(diags, path + "/kind", "expected mode | poly | bump | csv");
  }
}

void parse_points(const json& v, RunConfig& cfg, std::vector<Diagnostic>& diags) {
  const std::string path = "/points";
  if (!v.is_array()) {
    fail(diags, path, "expected an array of coordinate arrays");
    return;
  }
  const int dim = dimension(cfg.op);
  for (size_t i = 0; i < v.size(); ++i) {
    const json& pv = v[i];
    const std::string ppath = path + "/" + std::to_string(i);
    if (!pv.is_array() || static_cast<int>(pv.size()) != dim) {
      fail(diags, ppath, "expected " + std::to_string(dim) + " coordinate(s)");
      continue;
    }
    Point p;
    bool ok = true;
    for (int d = 0; d < dim; ++d) {
      if (!pv[d].is_number()) {
        fail(diags, ppath + "/" + std::to_string(d), "expected a number");
        ok = false;
        break;
      }
      (d == 0 ? p.x : p.y) = pv[d].get<double>();
    }
    if (ok) cfg.points.push_back(p);
  }
}

void append_grid_points(int n, RunConfig& cfg) {
  if (const auto* rc = std::get_if<RectangleLaplacian>(&cfg.op)) {
    for (int i = 1; i <= n; ++i)
      for (int j = 1; j <= n; ++j)
        cfg.points.push_back({rc->lx * i / (n + 1.0), rc->ly * j / (n + 1.0)});
    return;
  }
  const double M = std::holds_alternative<IntervalLaplacian>(cfg.op)
                       ? std::get<IntervalLaplacian>(cfg.op).length
                       : std::get<DivergenceForm1D>(cfg.op).length;
  for (int i = 1; i <= n; ++i) cfg.points.push_back({M * i / (n + 1.0), 0.0});
}

const std::map<std::string, Command>& command_table() {
  static const std::map<std::string, Command> table = {
      {"ml", Command::Ml},
      {"density", Command::Density},
      {"eigs", Command::Eigs},
      {"solve-spectral", Command::SolveSpectral},
      {"solve-4th", Command::SolveFourth},
      {"solve-mc", Command::SolveMc},
      {"solve-ibm", Command::SolveIbm},
      {"ctrw", Command::Ctrw},
      {"verify", Command::Verify},
      {"equivalence", Command::Equivalence},
  };
  return table;
}

}  // namespace

ValidationResult validate(const std::string& json_text) {
  std::vector<Diagnostic> diags;
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail(diags, "/", std::string("not valid JSON: ") + e.what());
    return diags;
  }
  if (!doc.is_object()) {
    fail(diags, "/", "top level must be an object");
    return diags;
  }

  RunConfig cfg;
  check_keys(doc, "",
             {"command", "beta", "operator", "initial_datum", "times", "points",
              "points_grid", "n_modes", "mc", "rng", "threads", "output_dir",
              "ml", "density", "ctrw", "verify"},
             diags);

  std::string cmd;
  if (!string_field(doc, "command", "", diags, &cmd)) {
    fail(diags, "/command", "required");
    return diags;
  }
  const auto it = command_table().find(cmd);
  if (it == command_table().end()) {
    fail(diags, "/command", "unknown command \"" + cmd + "\"");
    return diags;
  }
  cfg.command = it->second;

  if (doc.contains("operator")) parse_operator(doc.at("operator"), cfg, diags);

  if (number_field(doc, "beta", "", diags, &cfg.beta)) {
    if (cfg.command == Command::Ml && cfg.beta == 1.0) {
      cfg.beta_is_one = true;
    } else if (!(cfg.beta > 0.0) || !(cfg.beta < 1.0)) {
      fail(diags, "/beta", "beta must lie in the open interval (0,1)");
    }
  }
  if (doc.contains("initial_datum")) parse_datum(doc.at("initial_datum"), cfg, diags);

  if (doc.contains("times")) {
    const json& tv = doc.at("times");
    if (!tv.is_array() || tv.empty()) {
      fail(diags, "/times", "expected a non-empty array of numbers");
    } else {
      cfg.times.clear();
      for (size_t i = 0; i < tv.size(); ++i) {
        if (!tv[i].is_number() || !(tv[i].get<double>() >= 0.0) ||
            !std::isfinite(tv[i].get<double>())) {
          fail(diags, "/times/" + std::to_string(i), "expected a number >= 0");
          continue;
        }
        cfg.times.push_back(tv[i].get<double>());
      }
    }
  }

  if (doc.contains("points")) parse_points(doc.at("points"), cfg, diags);
  if (doc.contains("points_grid")) {
    long long n = 0;
    integer_field(doc, "points_grid", "", diags, &n);
    if (n < 1 || n > 100000)
      fail(diags, "/points_grid", "expected an integer in [1, 100000]");
    else
      append_grid_points(static_cast<int>(n), cfg);
  }

  long long nm = cfg.n_modes;
  if (integer_field(doc, "n_modes", "", diags, &nm)) {
    if (nm < 1 || nm > 2000000)
      fail(diags, "/n_modes", "expected an integer in [1, 2000000]");
    else
      cfg.n_modes = static_cast<int>(nm);
  }

  if (doc.contains("mc")) {
    const json& mv = doc.at("mc");
    if (!mv.is_object()) {
      fail(diags, "/mc", "expected an object");
    } else {
      check_keys(mv, "/mc", {"dt", "n_paths", "bridge_correction", "mode"}, diags);
      number_field(mv, "dt", "/mc", diags, &cfg.mc.dt);
      integer_field(mv, "n_paths", "/mc", diags, &cfg.mc.n_paths);
      bool_field(mv, "bridge_correction", "/mc", diags, &cfg.mc.bridge_correction);
      if (!(cfg.mc.dt > 0.0)) fail(diags, "/mc/dt", "must be positive");
      if (cfg.mc.n_paths < 1) fail(diags, "/mc/n_paths", "must be at least 1");
      std::string mode;
      if (string_field(mv, "mode", "/mc", diags, &mode)) {
        if (mode == "outer")
          cfg.mc_mode = KillingMode::OuterClock;
        else if (mode == "timechanged")
          cfg.mc_mode = KillingMode::TimeChangedClock;
        else
          fail(diags, "/mc/mode", "expected outer | timechanged");
      }
    }
  }

  if (doc.contains("rng")) {
    const json& rv = doc.at("rng");
    if (!rv.is_object()) {
      fail(diags, "/rng", "expected an object");
    } else {
      check_keys(rv, "/rng", {"base_seed", "stream_id"}, diags);
      long long seed = 0, stream = 0;
      if (integer_field(rv, "base_seed", "/rng", diags, &seed)) {
        if (seed < 0)
          fail(diags, "/rng/base_seed", "must be >= 0");
        else
          cfg.rng.base_seed = static_cast<std::uint64_t>(seed);
      }
      if (integer_field(rv, "stream_id", "/rng", diags, &stream)) {
        if (stream < 0)
          fail(diags, "/rng/stream_id", "must be >= 0");
        else
          cfg.rng.stream_id = static_cast<std::uint64_t>(stream);
      }
    }
  }

  long long threads = 0;
  if (integer_field(doc, "threads", "", diags, &threads)) {
    if (threads < 0 || threads > 4096)
      fail(diags, "/threads", "expected an integer in [0, 4096]");
    else
      cfg.threads = static_cast<int>(threads);
  }
  if (string_field(doc, "output_dir", "", diags, &cfg.output_dir) &&
      cfg.output_dir.empty())
    fail(diags, "/output_dir", "must not be empty");

  if (doc.contains("ml")) {
    const json& mlv = doc.at("ml");
    if (!mlv.is_object()) {
      fail(diags, "/ml", "expected an object");
    } else {
      check_keys(mlv, "/ml", {"x"}, diags);
      number_field(mlv, "x", "/ml", diags, &cfg.ml_x);
    }
  }
  if (cfg.command == Command::Ml && !(cfg.ml_x >= 0.0))
    fail(diags, "/ml/x", "required: the argument of E_beta(-x), x >= 0");

  if (doc.contains("density")) {
    const json& dv = doc.at("density");
    if (!dv.is_object()) {
      fail(diags, "/density", "expected an object");
    } else {
      check_keys(dv, "/density", {"kind", "x", "t"}, diags);
      string_field(dv, "kind", "/density", diags, &cfg.density_kind);
      if (cfg.density_kind != "stable" && cfg.density_kind != "inverse" &&
          cfg.density_kind != "halfbm")
        fail(diags, "/density/kind", "expected stable | inverse | halfbm");
      number_field(dv, "t", "/density", diags, &cfg.density_t);
      if (!(cfg.density_t > 0.0)) fail(diags, "/density/t", "must be positive");
      if (dv.contains("x")) {
        const json& xv = dv.at("x");
        if (!xv.is_array() || xv.empty()) {
          fail(diags, "/density/x", "expected a non-empty array of numbers");
        } else {
          const bool allow_zero = cfg.density_kind == "halfbm";
          for (size_t i = 0; i < xv.size(); ++i) {
            if (!xv[i].is_number() ||
                !(allow_zero ? xv[i].get<double>() >= 0.0
                             : xv[i].get<double>() > 0.0)) {
              fail(diags, "/density/x/" + std::to_string(i),
                   allow_zero ? "expected a number >= 0" : "expected a number > 0");
              continue;
            }
            cfg.density_x.push_back(xv[i].get<double>());
          }
        }
      }
    }
  }
  if (cfg.command == Command::Density && cfg.density_x.empty())
    fail(diags, "/density/x", "required: evaluation points");

  if (doc.contains("ctrw")) {
    const json& cv = doc.at("ctrw");
    if (!cv.is_object()) {
      fail(diags, "/ctrw", "expected an object");
    } else {
      check_keys(cv, "/ctrw", {"scale_c", "horizon_t", "n_walkers"}, diags);
      number_field(cv, "scale_c", "/ctrw", diags, &cfg.ctrw_scale_c);
      number_field(cv, "horizon_t", "/ctrw", diags, &cfg.ctrw_horizon);
      integer_field(cv, "n_walkers", "/ctrw", diags, &cfg.ctrw_walkers);
      if (!(cfg.ctrw_scale_c > 0.0)) fail(diags, "/ctrw/scale_c", "must be positive");
      if (!(cfg.ctrw_horizon > 0.0)) fail(diags, "/ctrw/horizon_t", "must be positive");
      if (cfg.ctrw_walkers < 1) fail(diags, "/ctrw/n_walkers", "must be at least 1");
    }
  }

  if (doc.contains("verify")) {
    const json& vv = doc.at("verify");
    if (!vv.is_object()) {
      fail(diags, "/verify", "expected an object");
    } else {
      check_keys(vv, "/verify", {"dt"}, diags);
      number_field(vv, "dt", "/verify", diags, &cfg.verify_dt);
      if (!(cfg.verify_dt > 0.0) || cfg.verify_dt > 0.1)
        fail(diags, "/verify/dt", "must lie in (0, 0.1]");
    }
  }

  if (cfg.f.kind == DatumSpec::Kind::Csv && dimension(cfg.op) == 2)
    fail(diags, "/initial_datum/kind",
         "csv data applies to one-dimensional domains only");

  const bool needs_points =
      cfg.command == Command::SolveSpectral || cfg.command == Command::SolveFourth ||
      cfg.command == Command::SolveMc || cfg.command == Command::SolveIbm ||
      cfg.command == Command::Equivalence;
  if (needs_points && cfg.points.empty())
    fail(diags, "/points", "required: at least one evaluation point (or points_grid)");

  if ((cfg.command == Command::SolveFourth || cfg.command == Command::Equivalence) &&
      cfg.beta != 0.5)
    fail(diags, "/beta", "this route is specific to beta = 1/2");

  if (cfg.command == Command::SolveMc || cfg.command == Command::SolveIbm ||
      cfg.command == Command::Equivalence) {
    for (size_t i = 0; i < cfg.points.size(); ++i)
      if (!strictly_inside(cfg.op, cfg.points[i]))
        fail(diags, "/points/" + std::to_string(i),
             "path starting points must lie inside the open domain");
  }

  if (!diags.empty()) return diags;
  return cfg;
}

std::string diagnostics_json(const std::vector<Diagnostic>& diags) {
  json j;
  j["valid"] = false;
  j["diagnostics"] = json::array();
  for (const Diagnostic& d : diags)
    j["diagnostics"].push_back({{"path", d.path}, {"message", d.message}});
  return j.dump(2);
}

std::string config_echo_json(const RunConfig& cfg) {
  json j;
  j["command"] = command_name(cfg.command);
  j["beta"] = cfg.beta_is_one ? 1.0 : cfg.beta;

  json op;
  if (const auto* iv = std::get_if<IntervalLaplacian>(&cfg.op)) {
    op["type"] = "interval";
    op["length"] = iv->length;
  } else if (const auto* rc = std::get_if<RectangleLaplacian>(&cfg.op)) {
    op["type"] = "rectangle";
    op["lx"] = rc->lx;
    op["ly"] = rc->ly;
  } else {
    const auto& dv = std::get<DivergenceForm1D>(cfg.op);
    op["type"] = "divergence_1d";
    op["length"] = dv.length;
    op["coefficient"] = dv.a.description;
    op["lambda_ell"] = dv.lambda_ell;
    op["lambda_cap"] = dv.lambda_cap;
    op["grid_points"] = dv.grid_points;
  }
  j["operator"] = op;

  json fd;
  switch (cfg.f.kind) {
    case DatumSpec::Kind::Mode:
      fd["kind"] = "mode";
      fd["index"] = cfg.f.mode_index;
      if (dimension(cfg.op) == 2) fd["index_y"] = cfg.f.mode_index_y;
      break;
    case DatumSpec::Kind::Poly: fd["kind"] = "poly"; break;
    case DatumSpec::Kind::Bump: fd["kind"] = "bump"; break;
    case DatumSpec::Kind::Csv:
      fd["kind"] = "csv";
      fd["path"] = cfg.f.csv_path;
      break;
  }
  j["initial_datum"] = fd;

  j["times"] = cfg.times;
  j["points"] = json::array();
  for (const Point& p : cfg.points) {
    if (dimension(cfg.op) == 2)
      j["points"].push_back({p.x, p.y});
    else
      j["points"].push_back({p.x});
  }
  j["n_modes"] = cfg.n_modes;
  j["mc"] = {{"dt", cfg.mc.dt},
             {"n_paths", cfg.mc.n_paths},
             {"bridge_correction", cfg.mc.bridge_correction},
             {"mode", cfg.mc_mode == KillingMode::OuterClock ? "outer" : "timechanged"}};
  j["rng"] = {{"base_seed", cfg.rng.base_seed}, {"stream_id", cfg.rng.stream_id}};
  j["threads"] = cfg.threads;
  j["output_dir"] = cfg.output_dir;
  switch (cfg.command) {
    case Command::Ml:
      j["ml"] = {{"x", cfg.ml_x}};
      break;
    case Command::Density:
      j["density"] = {{"kind", cfg.density_kind}, {"x", cfg.density_x}, {"t", cfg.density_t}};
      break;
    case Command::Ctrw:
      j["ctrw"] = {{"scale_c", cfg.ctrw_scale_c},
                   {"horizon_t", cfg.ctrw_horizon},
                   {"n_walkers", cfg.ctrw_walkers}};
      break;
    case Command::Verify:
      j["verify"] = {{"dt", cfg.verify_dt}};
      break;
    default:
      break;
  }
  return j.dump(2);
}

}  // namespace subdiff
