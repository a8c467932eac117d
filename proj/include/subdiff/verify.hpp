#pragma once

#include <string>
#include <vector>

#include "subdiff/spectral.hpp"
#include "subdiff/stochastic.hpp"

namespace subdiff {

// L1 discretization of the Caputo derivative on a uniform grid. samples holds
// u(0), u(dt), ..., u(J dt); the result holds the derivative at dt, ..., J dt
// (the Caputo derivative of the sampled path is not defined at t=0).
std::vector<double> caputo_l1(const std::vector<double>& samples, double dt,
                              FracOrder beta);

struct ResidualReport {
  double max_abs_residual = 0.0;
  std::string grid_spec;
  double convergence_order;    // NaN unless a refinement sweep was run
  double tail_bound = 0.0;     // estimated unresolved-mode contribution
  double boundary_value_max = 0.0;
  double boundary_operator_max = 0.0;
};

// Max over the grid of |L1-Caputo u - L u| for the spectral solution, with L u
// evaluated spectrally. t_grid must be uniform with t_grid.front() >= 0.01 and
// spacing dividing t_grid.front(); the L1 history is built down to t=0
// internally.
ResidualReport residual_fractional(const SpectralModel& model,
                                   const SpectralCoefficients& coeffs,
                                   FracOrder beta,
                                   const std::vector<double>& t_grid,
                                   const std::vector<Point>& x_grid);

// Same residual measured over a dt-refinement sweep; reports the empirical
// convergence order (least-squares slope over the levels).
ResidualReport residual_fractional_sweep(const SpectralModel& model,
                                         const SpectralCoefficients& coeffs,
                                         FracOrder beta,
                                         const std::vector<double>& dts,
                                         double t_lo, double t_hi,
                                         const std::vector<Point>& x_grid);

// Exact-identity residual of the fourth-order form: max over the grid of
// |d/dt u - L f/sqrt(pi t) - L^2 u| with every term evaluated from the same
// truncated expansion; also checks u and L u vanish at the boundary.
ResidualReport residual_fourth_order(const SpectralModel& model,
                                     const SpectralCoefficients& coeffs,
                                     const std::vector<double>& t_grid,
                                     const std::vector<Point>& x_grid);

struct SubordinationCheck {
  double lhs;  // integral of exp(-lambda (t/l)^beta) against the stable density
  double rhs;  // E_beta(-lambda t^beta)
  double quad_error;  // error budget claimed by the quadrature
};

SubordinationCheck subordination_identity(FracOrder beta, double lambda, double t);

// Max residual of the L1 eigen-relation for u(t)=E_beta(-t^beta) under
// d^beta/dt^beta u = -u, measured over the window [t_lo, t_hi] for each dt;
// out_residuals receives one max per dt.
void ml_eigen_residuals(FracOrder beta, const std::vector<double>& dts,
                        double t_lo, double t_hi,
                        std::vector<double>* out_residuals);

struct LegValue {
  std::string name;
  double value = 0.0;
  double std_error = 0.0;  // 0 for spectral legs
};

struct PairCheck {
  std::string a;
  std::string b;
  double gap = 0.0;
  double tol = 0.0;
  bool pass = false;
};

struct EquivalenceCell {
  double t;
  Point x;
  std::vector<LegValue> legs;
  std::vector<PairCheck> pairs;
  bool indicator_modes_identical = false;
  bool pass = false;
};

struct EquivalenceReport {
  std::vector<EquivalenceCell> cells;
  bool all_pass = false;
};

struct EquivalenceConfig {
  PathConfig mc;
  RngSpec rng;
  double spectral_pair_tol = 1e-12;
  double sigma_factor = 3.0;
};

// Cross-route comparison at beta=1/2: spectral fractional, fourth-order,
// MC in both indicator modes, IBM, and two-sided IBM.
EquivalenceReport equivalence_suite(const SpectralModel& model,
                                    const InitialData& f,
                                    const std::vector<double>& t_list,
                                    const std::vector<Point>& x_list,
                                    const EquivalenceConfig& cfg);

std::string equivalence_report_json(const EquivalenceReport& report);

}  // namespace subdiff
