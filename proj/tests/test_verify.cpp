#include <cmath>
#include <initializer_list>
#include <stdexcept>
#include <vector>

#include <doctest.h>
#include <json.hpp>

#include "oracles.hpp"
#include "subdiff/initial_data.hpp"
#include "subdiff/verify.hpp"

using namespace subdiff;

namespace {
const double kPi = std::acos(-1.0);
}

TEST_SUITE("verify") {

TEST_CASE("l1 derivative is exact on linear functions") {
  // Caputo^beta of u(t)=t is t^(1-beta)/Gamma(2-beta); the scheme integrates
  // piecewise-linear data exactly, so only roundoff remains
  const double dt = 1.0 / 256.0;
  const int J = 256;
  std::vector<double> u(J + 1);
  for (int k = 0; k <= J; ++k) u[k] = k * dt;
  const std::vector<double> d = caputo_l1(u, dt, FracOrder(0.5));
  REQUIRE(d.size() == static_cast<std::size_t>(J));
  CHECK(std::abs(d.back() - oracles::kCaputoT1) < 1e-12);
  for (int k = 16; k <= J; k += 48) {
    const double t = k * dt;
    const double want = std::sqrt(t) / std::tgamma(1.5);
    CHECK(std::abs(d[k - 1] - want) < 1e-12);
  }
}

TEST_CASE("l1 derivative converges on a quadratic") {
  // exact derivative of t^2 is 2 t^(2-b)/Gamma(3-b)
  const double b = 0.7;
  double err_prev = 0.0;
  for (int level = 0; level < 2; ++level) {
    const double dt = (level == 0) ? 1.0 / 64.0 : 1.0 / 128.0;
    const int J = static_cast<int>(std::lround(1.0 / dt));
    std::vector<double> u(J + 1);
    for (int k = 0; k <= J; ++k) u[k] = (k * dt) * (k * dt);
    const std::vector<double> d = caputo_l1(u, dt, FracOrder(b));
    double err = 0.0;
    for (int k = J / 2; k <= J; ++k) {
      const double t = k * dt;
      const double want = 2.0 * std::pow(t, 2.0 - b) / std::tgamma(3.0 - b);
      err = std::max(err, std::abs(d[k - 1] - want));
    }
    if (level == 0)
      err_prev = err;
    else {
      const double order = std::log2(err_prev / err);
      CHECK(order > 2.0 - b - 0.25);
      CHECK(order < 2.0 - b + 0.25);
    }
  }
}

TEST_CASE("l1 derivative rejects degenerate input") {
  CHECK_THROWS_AS(caputo_l1({1.0}, 0.1, FracOrder(0.5)), std::invalid_argument);
  CHECK_THROWS_AS(caputo_l1({1.0, 2.0}, 0.0, FracOrder(0.5)), std::invalid_argument);
}

TEST_CASE("scalar relaxation residuals shrink with the step") {
  for (double b : {0.3, 0.5, 0.7}) {
    std::vector<double> res;
    ml_eigen_residuals(FracOrder(b), {1.0 / 64, 1.0 / 128, 1.0 / 256}, 0.5, 2.0,
                       &res);
    REQUIRE(res.size() == 3);
    CHECK(res[0] > res[1]);
    CHECK(res[1] > res[2]);
  }
  // at beta=1/2 the measured order sits at the startup-limited 2-beta rate
  std::vector<double> res;
  ml_eigen_residuals(FracOrder(0.5), {1.0 / 64, 1.0 / 128, 1.0 / 256}, 0.5, 2.0,
                     &res);
  const double order = std::log2(res[0] / res[2]) / 2.0;
  CHECK(order > 1.2);
  CHECK(order < 1.8);
}

TEST_CASE("fractional residual on a single mode") {
  const SpectralModel m = eigenpairs(IntervalLaplacian{kPi}, 1);
  const SpectralCoefficients c = transform(m, mode_datum(m, 0));
  // the ladder step equals the grid spacing, so refine to 1/128
  std::vector<double> ts;
  for (int k = 0; k <= 192; ++k) ts.push_back(0.5 + k / 128.0);
  const std::vector<Point> xs = {{kPi / 4, 0.0}, {kPi / 2, 0.0}};
  const ResidualReport r = residual_fractional(m, c, FracOrder(0.5), ts, xs);
  CHECK(r.max_abs_residual > 0.0);
  CHECK(r.max_abs_residual < 1e-3);
  CHECK(r.boundary_value_max < 1e-12);
  CHECK(r.boundary_operator_max < 1e-12);
  CHECK(std::isnan(r.convergence_order));
  CHECK(!r.grid_spec.empty());
}

TEST_CASE("fractional residual rejects a non-uniform or misaligned grid") {
  const SpectralModel m = eigenpairs(IntervalLaplacian{kPi}, 1);
  const SpectralCoefficients c = transform(m, mode_datum(m, 0));
  const std::vector<Point> xs = {{kPi / 2, 0.0}};
  CHECK_THROWS_AS(residual_fractional(m, c, FracOrder(0.5), {0.5, 0.7, 1.0}, xs),
                  std::invalid_argument);
  CHECK_THROWS_AS(residual_fractional(m, c, FracOrder(0.5), {0.5}, xs),
                  std::invalid_argument);
  // front below the supported window
  CHECK_THROWS_AS(
      residual_fractional(m, c, FracOrder(0.5), {0.005, 0.006, 0.007}, xs),
      std::invalid_argument);
}

TEST_CASE("fractional residual sweep measures the scheme order") {
  const SpectralModel m = eigenpairs(IntervalLaplacian{kPi}, 40);
  const SpectralCoefficients c = transform(m, poly_datum(m.op()));
  const std::vector<Point> xs = {{1.0, 0.0}, {kPi / 2, 0.0}, {2.5, 0.0}};
  const ResidualReport r = residual_fractional_sweep(
      m, c, FracOrder(0.5), {1.0 / 64, 1.0 / 128, 1.0 / 256}, 0.5, 2.0, xs);
  CHECK(std::isfinite(r.convergence_order));
  CHECK(r.convergence_order > 1.2);
  CHECK(r.convergence_order < 1.8);
  CHECK(r.max_abs_residual < 1e-2);
}

TEST_CASE("fourth-order residual vanishes termwise") {
  const SpectralModel m = eigenpairs(IntervalLaplacian{kPi}, 5);
  const SpectralCoefficients c = transform(m, mode_datum(m, 1));
  const std::vector<double> ts = {0.25, 1.0, 4.0};
  const std::vector<Point> xs = {{0.7, 0.0}, {kPi / 2, 0.0}, {2.8, 0.0}};
  const ResidualReport r = residual_fourth_order(m, c, ts, xs);
  CHECK(r.max_abs_residual < 1e-10);
  CHECK(r.boundary_value_max < 1e-12);
  CHECK(r.boundary_operator_max < 1e-11);
}

TEST_CASE("subordination identity holds across the parameter box") {
  for (double b : {0.3, 0.5, 0.7}) {
    for (double lam : {1.0, 5.0, 25.0}) {
      for (double t : {0.1, 1.0, 10.0}) {
        const SubordinationCheck s =
            subordination_identity(FracOrder(b), lam, t);
        CHECK(std::abs(s.lhs - s.rhs) < 1e-6);
        CHECK(s.quad_error < 1e-6);
        CHECK(s.rhs > 0.0);
      }
    }
  }
}

TEST_CASE("equivalence suite on a single cell") {
  const SpectralModel m = eigenpairs(IntervalLaplacian{kPi}, 1);
  const InitialData f = mode_datum(m, 0);
  EquivalenceConfig cfg;
  cfg.mc.dt = 2e-3;
  cfg.mc.n_paths = 3000;
  cfg.rng = {1234, 0};
  cfg.sigma_factor = 4.0;
  const EquivalenceReport rep =
      equivalence_suite(m, f, {0.5}, {{kPi / 2, 0.0}}, cfg);
  REQUIRE(rep.cells.size() == 1);
  const EquivalenceCell& cell = rep.cells[0];
  CHECK(cell.legs.size() == 6);
  CHECK(cell.pairs.size() == 5);
  CHECK(cell.indicator_modes_identical);
  for (const PairCheck& p : cell.pairs) {
    INFO(p.a, " vs ", p.b, " gap=", p.gap, " tol=", p.tol);
    CHECK(p.pass);
  }
  CHECK(cell.pass);
  CHECK(rep.all_pass);

  // the spectral pair agrees at solver precision
  CHECK(cell.pairs[0].gap < 1e-12);

  const std::string js = equivalence_report_json(rep);
  const nlohmann::json parsed = nlohmann::json::parse(js);
  CHECK(parsed.contains("cells"));
  CHECK(parsed["all_pass"].get<bool>());
  CHECK(parsed["cells"][0]["pairs"].size() == 5);
}

}  // TEST_SUITE
