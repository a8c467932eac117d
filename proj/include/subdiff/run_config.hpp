#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "subdiff/operators.hpp"
#include "subdiff/stochastic.hpp"

namespace subdiff {

enum class Command {
  Ml,
  Density,
  Eigs,
  SolveSpectral,
  SolveFourth,
  SolveMc,
  SolveIbm,
  Ctrw,
  Verify,
  Equivalence,
};

const char* command_name(Command c);

struct Defaults {
  static constexpr int n_modes = 100;
  static constexpr double dt = 1e-4;
  static constexpr long long n_paths = 100000;
  static constexpr bool bridge_correction = true;
  static constexpr double heat_kernel_floor = 1e-3;
};

// Initial-datum descriptor: named functions or a sampled CSV (columns x,f).
struct DatumSpec {
  enum class Kind { Mode, Poly, Bump, Csv } kind = Kind::Mode;
  int mode_index = 1;     // 1-based, Kind::Mode
  int mode_index_y = 1;   // second index on rectangles
  std::string csv_path;
};

struct RunConfig {
  Command command = Command::Ml;
  OperatorSpec op = IntervalLaplacian{3.141592653589793};
  double beta = 0.5;
  bool beta_is_one = false;  // ml only: exact classical branch
  DatumSpec f;
  std::vector<double> times{1.0};
  std::vector<Point> points;
  int n_modes = Defaults::n_modes;
  PathConfig mc;
  RngSpec rng;
  KillingMode mc_mode = KillingMode::OuterClock;
  int threads = 0;  // 0 = library default; must not affect results
  std::string output_dir = "out";

  // command-specific scalars
  double ml_x = -1.0;                      // ml
  std::string density_kind = "stable";     // density: stable | inverse | halfbm
  std::vector<double> density_x;           // density evaluation points
  double density_t = 1.0;                  // inverse/halfbm horizon
  double ctrw_scale_c = 1e4;               // ctrw
  double ctrw_horizon = 1.0;
  long long ctrw_walkers = 100000;
  double verify_dt = 1.0 / 256.0;          // verify: L1 grid spacing
};

struct Diagnostic {
  std::string path;     // JSON-pointer-ish location of the offending field
  std::string message;
};

using ValidationResult = std::variant<RunConfig, std::vector<Diagnostic>>;

// Parse + validate a JSON config document. Unknown keys are rejected.
ValidationResult validate(const std::string& json_text);

std::string diagnostics_json(const std::vector<Diagnostic>& diags);

// Execute a validated config: writes artifacts (solution.csv / report.json as
// applicable, manifest.json always) into output_dir. Returns the process exit
// code: 0 success, 1 numerical failure, 2 validation failure.
int run(const RunConfig& config, std::ostream& log);

// Echo of the effective configuration with defaults materialized (the manifest
// "config" block; identical JSON implies identical artifacts for a fixed
// version).
std::string config_echo_json(const RunConfig& config);

std::string version_string();

}  // namespace subdiff
