#pragma once

namespace subdiff {

// Fractional time order, restricted to the open interval (0,1).
// The classical limits beta=0,1 are excluded; callers that want the beta=1
// heat equation use the exponential directly.
class FracOrder {
 public:
  explicit FracOrder(double beta);
  double value() const noexcept { return beta_; }

 private:
  double beta_;
};

struct MlValue {
  double value;
  double abs_error_bound;
};

// E_beta(x) for x <= 0, with a certified absolute error bound.
// Series summation for small |x|, Laplace-inversion contour otherwise.
MlValue mittag_leffler(FracOrder beta, double x);

// d/dt E_beta(-lambda t^beta) = -lambda t^(beta-1) E_{beta,beta}(-lambda t^beta).
double ml_time_derivative(FracOrder beta, double lambda, double t);

// Density of the standard one-sided stable law D_1 (Laplace transform e^{-s^beta}),
// evaluated at x > 0.
double stable_density(FracOrder beta, double x);

// Density f_t of the inverse subordinator E_t = inf{u : D_u > t} at x > 0:
// f_t(x) = (t/beta) x^{-1-1/beta} g_beta(t x^{-1/beta}).
double inverse_subordinator_density(FracOrder beta, double t, double x);

// Density of |Y_t| for Y a Brownian motion with generator d^2/dl^2 (variance 2t):
// p(t,l) = (pi t)^{-1/2} exp(-l^2/(4t)), l >= 0.
double half_bm_density(double t, double l);

namespace detail {
// E_beta(-x) and E_{beta,beta}(-x) for x >= 0 (kernel shared by the public entry
// points; exposed for the solvers which need the second-parameter variant).
double ml_e(double beta, double x);
double ml_e2(double beta, double x);
// scaled complementary error function exp(x^2) erfc(x), x >= 0
double erfcx(double x);
}  // namespace detail

}  // namespace subdiff
