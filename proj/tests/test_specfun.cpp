#include <cmath>
#include <stdexcept>

#include <doctest.h>

#include "oracles.hpp"
#include "subdiff/quadrature.hpp"
#include "subdiff/specfun.hpp"

using namespace subdiff;

namespace {
const double kPi = std::acos(-1.0);
}

TEST_SUITE("specfun") {

TEST_CASE("frac order rejects the closed endpoints") {
  CHECK_THROWS_AS(FracOrder(0.0), std::domain_error);
  CHECK_THROWS_AS(FracOrder(1.0), std::domain_error);
  CHECK_THROWS_AS(FracOrder(-0.2), std::domain_error);
  CHECK_THROWS_AS(FracOrder(1.7), std::domain_error);
  CHECK(FracOrder(0.5).value() == 0.5);
}

TEST_CASE("mittag-leffler matches the frozen table") {
  for (const auto& row : oracles::kMl) {
    const MlValue got = mittag_leffler(FracOrder(row.a), -row.b);
    CHECK(std::abs(got.value - row.v) <= 1e-12 * std::max(1.0, std::abs(row.v)));
    // the reported bound must actually cover the observed error
    CHECK(std::abs(got.value - row.v) <= got.abs_error_bound + 1e-15);
    CHECK(got.abs_error_bound < 1e-10);
  }
  CHECK(mittag_leffler(FracOrder(0.5), 0.0).value == 1.0);
  CHECK_THROWS_AS(mittag_leffler(FracOrder(0.5), 0.5), std::domain_error);
}

TEST_CASE("second-parameter variant matches the frozen table") {
  for (const auto& row : oracles::kMl2) {
    const double got = detail::ml_e2(row.a, row.b);
    CHECK(std::abs(got - row.v) <= 1e-12 * std::max(1.0, std::abs(row.v)) + 1e-17);
  }
}

TEST_CASE("completely monotone envelope") {
  // 1/(1 + Gamma(1-b) x) <= E_b(-x) <= 1/(1 + x/Gamma(1+b))
  for (double b : {0.15, 0.3, 0.5, 0.7, 0.85}) {
    for (double lx = -4.0; lx <= 6.0; lx += 0.5) {
      const double x = std::pow(10.0, lx);
      const double e = detail::ml_e(b, x);
      const double lo = 1.0 / (1.0 + std::tgamma(1.0 - b) * x);
      const double hi = 1.0 / (1.0 + x / std::tgamma(1.0 + b));
      CHECK(e >= lo * (1.0 - 1e-11));
      CHECK(e <= hi * (1.0 + 1e-11));
    }
  }
}

TEST_CASE("mittag-leffler is decreasing in x") {
  for (double b : {0.25, 0.6, 0.9}) {
    double prev = 1.0;
    for (double lx = -3.0; lx <= 5.0; lx += 0.25) {
      const double e = detail::ml_e(b, std::pow(10.0, lx));
      CHECK(e < prev);
      CHECK(e > 0.0);
      prev = e;
    }
  }
}

TEST_CASE("half-order reduction to erfcx") {
  CHECK(detail::erfcx(0.0) == 1.0);
  // E_{1/2}(-x) = erfcx(x) for x >= 0
  for (double x : {0.05, 0.5, 1.0, 3.0, 10.0, 50.0}) {
    const double e = detail::ml_e(0.5, x);
    CHECK(std::abs(e - detail::erfcx(x)) <= 1e-13 * e);
  }
  CHECK(std::abs(detail::ml_e(0.5, 1.0) - oracles::kEHalfM1) < 2e-16);
  // E_{1/2,1/2}(-x) = 1/sqrt(pi) - x erfcx(x)
  for (double x : {0.2, 1.0, 2.5}) {
    const double want = oracles::kInvSqrtPi - x * detail::erfcx(x);
    CHECK(std::abs(detail::ml_e2(0.5, x) - want) < 1e-14);
  }
  CHECK(std::abs(detail::ml_e2(0.5, 1.0) - oracles::kE2HalfM1) < 1e-15);
}

TEST_CASE("erfcx is accurate on both sides of the representation switch") {
  // reference values computed at 40-digit precision
  const double below = detail::erfcx(11.999999);
  const double above = detail::erfcx(12.000001);
  CHECK(std::abs(below - 0.046854224892756821) < 1e-15 * below);
  CHECK(std::abs(above - 0.046854217137031344) < 1e-15 * above);
  CHECK(std::abs(detail::erfcx(50.0) - 0.011281536265323773) < 1e-15);
  CHECK(std::abs(detail::erfcx(500.0) - 0.0011283769103507188) < 1e-15);
}

TEST_CASE("time derivative identity and finite differences") {
  CHECK(std::abs(ml_time_derivative(FracOrder(0.5), 1.0, 1.0) -
                 oracles::kMlDerivHalf11) < 1e-15);
  const FracOrder b(0.7);
  const double lam = 3.0, t = 0.8, h = 1e-5;
  auto u = [&](double s) { return detail::ml_e(0.7, lam * std::pow(s, 0.7)); };
  const double fd = (u(t + h) - u(t - h)) / (2.0 * h);
  CHECK(std::abs(ml_time_derivative(b, lam, t) - fd) < 1e-8);
  CHECK_THROWS_AS(ml_time_derivative(b, -1.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(ml_time_derivative(b, 1.0, 0.0), std::domain_error);
}

TEST_CASE("stable density matches the series oracle") {
  for (const auto& row : oracles::kStableLarge) {
    const double got = stable_density(FracOrder(row.a), row.b);
    CHECK(std::abs(got - row.v) <= 1e-9 * row.v);
  }
  for (const auto& row : oracles::kStableSmall) {
    const double got = stable_density(FracOrder(row.a), row.b);
    CHECK(std::abs(got - row.v) <= 1e-9 * row.v);
  }
  CHECK_THROWS_AS(stable_density(FracOrder(0.5), 0.0), std::domain_error);
  CHECK_THROWS_AS(stable_density(FracOrder(0.5), -1.0), std::domain_error);
}

TEST_CASE("stable density half-order closed form") {
  for (double y : {0.02, 0.1, 0.5, 1.0, 3.0, 20.0, 300.0}) {
    const double closed =
        0.5 / std::sqrt(kPi) * std::pow(y, -1.5) * std::exp(-0.25 / y);
    CHECK(std::abs(stable_density(FracOrder(0.5), y) - closed) <= 1e-10 * closed);
  }
  CHECK(std::abs(stable_density(FracOrder(0.5), 1.0) - oracles::kGHalf1) < 1e-15);
}

TEST_CASE("stable density deep left tail underflows to zero") {
  CHECK(stable_density(FracOrder(0.5), 1e-6) == 0.0);
  CHECK(stable_density(FracOrder(0.8), 1e-8) == 0.0);
}

TEST_CASE("laplace transform of the stable law") {
  // E[exp(-D)] = exp(-1) for every order
  for (double b : {0.3, 0.5, 0.7, 0.9}) {
    const double got = quad::adaptive15(
        [&](double y) { return std::exp(-y) * stable_density(FracOrder(b), y); },
        0.0, 80.0, 1e-11);
    CHECK(std::abs(got - std::exp(-1.0)) < 1e-8);
  }
}

TEST_CASE("inverse subordinator density half-order closed form") {
  for (double t : {0.5, 1.0, 4.0}) {
    for (double x : {0.1, 0.5, 1.0, 2.0}) {
      const double closed = std::exp(-x * x / (4.0 * t)) / std::sqrt(kPi * t);
      CHECK(std::abs(inverse_subordinator_density(FracOrder(0.5), t, x) - closed) <=
            1e-11 * closed);
    }
  }
  CHECK(std::abs(inverse_subordinator_density(FracOrder(0.5), 1.0, 1.0) -
                 std::exp(-0.25) * oracles::kInvSqrtPi) < 1e-15);
}

TEST_CASE("inverse subordinator density normalizes and has the right mean") {
  for (double b : {0.3, 0.7}) {
    for (double t : {0.5, 2.0}) {
      // support is effectively [0, x_max] with x_max comfortably past the
      // exponential cutoff of the Wright tail
      const double x_max = 30.0 * std::pow(t, b);
      const double mass = quad::adaptive15(
          [&](double x) { return inverse_subordinator_density(FracOrder(b), t, x); },
          1e-13, x_max, 1e-10);
      CHECK(std::abs(mass - 1.0) < 1e-7);
      const double mean = quad::adaptive15(
          [&](double x) {
            return x * inverse_subordinator_density(FracOrder(b), t, x);
          },
          1e-13, x_max, 1e-10);
      const double want = std::pow(t, b) / std::tgamma(1.0 + b);
      CHECK(std::abs(mean - want) < 1e-7 * want);
    }
  }
}

TEST_CASE("inverse subordinator density is continuous across the series switch") {
  // the representation changes at x = t^beta / 2; straddle that point with a
  // gap small enough that the function itself is constant to ~1e-8
  for (double b : {0.3, 0.6, 0.85}) {
    for (double t : {0.7, 1.3}) {
      const double x0 = 0.5 * std::pow(t, b);
      const double below =
          inverse_subordinator_density(FracOrder(b), t, x0 * (1.0 - 1e-9));
      const double above =
          inverse_subordinator_density(FracOrder(b), t, x0 * (1.0 + 1e-9));
      CHECK(below > 0.0);
      CHECK(std::abs(below - above) < 1e-7 * below);
    }
  }
  // and the density stays finite and nonnegative through bulk and tail
  for (double b : {0.3, 0.6, 0.85}) {
    for (double x = 0.02; x < 3.0; x *= 1.05) {
      const double v = inverse_subordinator_density(FracOrder(b), 1.0, x);
      CHECK(std::isfinite(v));
      CHECK(v >= 0.0);
    }
  }
}

TEST_CASE("half bm density closed form and moments") {
  CHECK(std::abs(half_bm_density(1.0, 0.0) - oracles::kInvSqrtPi) < 1e-16);
  const double t = 0.7;
  const double mass = quad::adaptive15(
      [&](double l) { return half_bm_density(t, l); }, 0.0, 40.0, 1e-12);
  CHECK(std::abs(mass - 1.0) < 1e-10);
  const double second = quad::adaptive15(
      [&](double l) { return l * l * half_bm_density(t, l); }, 0.0, 40.0, 1e-12);
  CHECK(std::abs(second - 2.0 * t) < 1e-9);
  CHECK_THROWS_AS(half_bm_density(0.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(half_bm_density(1.0, -0.1), std::domain_error);
}

}  // TEST_SUITE
