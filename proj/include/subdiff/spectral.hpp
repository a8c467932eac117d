#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "subdiff/initial_data.hpp"
#include "subdiff/operators.hpp"
#include "subdiff/specfun.hpp"

namespace subdiff {

struct Eigenmode {
  int index;  // 1-based; rectangles flatten (m,n) by increasing eigenvalue
  double eigenvalue;
  std::function<double(Point)> eigenfunction;
  double norm_check;  // L2 norm under the module quadrature, should be 1
};

class SpectralModel {
 public:
  const OperatorSpec& op() const { return op_; }
  int size() const { return n_modes_; }
  int dim() const { return dimension(op_); }

  double eigenvalue(int n) const;              // 0-based
  double eigenfunction(int n, Point p) const;  // 0-based
  Eigenmode mode(int n) const;
  // rectangle models only: the (m, k) sine indices behind flat mode n
  std::pair<int, int> rect_mode(int n) const { return rect_modes_.at(n); }

  // Grid access for finite-difference models.
  bool on_grid() const { return !grid_vectors_.empty(); }
  double grid_h() const { return grid_h_; }
  int grid_points() const { return static_cast<int>(grid_vectors_.empty() ? 0 : grid_vectors_[0].size()); }
  const std::vector<double>& grid_vector(int n) const { return grid_vectors_[n]; }

  std::vector<Point> boundary_samples() const;

 private:
  SpectralModel() = default;
  friend SpectralModel eigenpairs(const OperatorSpec& op, int n_modes);

  OperatorSpec op_;
  int n_modes_;
  std::vector<double> eigenvalues_;
  // interval/rectangle: closed-form modes, rect_modes_ holds the (m,n) pairs
  std::vector<std::pair<int, int>> rect_modes_;
  // FD path: discrete eigenvectors on the interior grid, discrete-L2 normalized
  std::vector<std::vector<double>> grid_vectors_;
  double grid_h_ = 0.0;
};

struct SpectralCoefficients {
  std::vector<double> values;  // fbar(n), aligned with modes
  double l2_norm_sq = 0.0;     // sum of squares
};

struct SolutionGrid {
  std::vector<double> times;
  std::vector<Point> points;
  std::vector<double> values;  // row-major: values[i*points.size()+j] = u(t_i, x_j)
  double at(int i, int j) const { return values[i * points.size() + j]; }
};

struct SmoothnessReport {
  double k_hat;            // fitted decay exponent of |fbar(n)| against lambda_n
  double threshold;        // 1 + 3d/4
  bool meets_threshold;    // k_hat > threshold
  bool finite_expansion;   // trailing coefficients exactly ~0: decay effectively infinite
  int n_fit;               // nonzero coefficients used in the fit
};

struct TailNotCertified : std::runtime_error {
  using std::runtime_error::runtime_error;
};

SpectralModel eigenpairs(const OperatorSpec& op, int n_modes);

SpectralCoefficients transform(const SpectralModel& model, const InitialData& f);

SolutionGrid solve_fractional(const SpectralModel& model,
                              const SpectralCoefficients& coeffs, FracOrder beta,
                              const std::vector<double>& times,
                              const std::vector<Point>& points);

// Same series as solve_fractional at beta=1/2, kept as an independent
// implementation so the equivalence checks compare two code paths.
SolutionGrid solve_fourth_order(const SpectralModel& model,
                                const SpectralCoefficients& coeffs,
                                const std::vector<double>& times,
                                const std::vector<Point>& points);

double heat_kernel(const SpectralModel& model, double t, Point x, Point y,
                   double t_floor = 1e-3);

SpectralCoefficients semigroup_apply(const SpectralModel& model,
                                     const SpectralCoefficients& coeffs, double l);

// Smallest N with sum_{n>N} fbar(n)^2 < eps^2, judged on the available
// coefficients; throws TailNotCertified when the list is too short to support
// the claim.
int truncation_select(const SpectralCoefficients& coeffs_full, double eps);

SmoothnessReport smoothness_diagnostic(const SpectralCoefficients& coeffs,
                                       const SpectralModel& model);

namespace detail {
// Estimated sum_{n>N} |fbar(n)| lambda_n^power sup|phi_n| from the fitted decay
// of the available coefficients; used for reported tail bounds.
double coefficient_tail_estimate(const SpectralModel& model,
                                 const SpectralCoefficients& coeffs, double power);
double sup_phi(const SpectralModel& model, int n);
}  // namespace detail

}  // namespace subdiff
