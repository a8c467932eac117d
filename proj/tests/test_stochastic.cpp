#include <algorithm>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <doctest.h>

#include "oracles.hpp"
#include "subdiff/initial_data.hpp"
#include "subdiff/spectral.hpp"
#include "subdiff/stochastic.hpp"

using namespace subdiff;

namespace {
const double kPi = std::acos(-1.0);

// one-sample Kolmogorov-Smirnov statistic against a continuous CDF
template <class F>
double ks_stat(std::vector<double> xs, F&& cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double F_i = cdf(xs[i]);
    d = std::max(d, std::abs((i + 1) / n - F_i));
    d = std::max(d, std::abs(i / n - F_i));
  }
  return d;
}

double sample_mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / v.size();
}

double sample_se(const std::vector<double>& v) {
  const double m = sample_mean(v);
  double s2 = 0.0;
  for (double x : v) s2 += (x - m) * (x - m);
  return std::sqrt(s2 / (v.size() - 1.0) / v.size());
}
}

TEST_SUITE("stochastic") {

TEST_CASE("path rng reproduces, separates paths, and stays inside (0,1)") {
  const RngSpec spec{42, 7};
  PathRng a(spec, 3), b(spec, 3), c(spec, 4);
  bool all_equal = true, any_equal_across = false;
  for (int i = 0; i < 1000; ++i) {
    const std::uint64_t ra = a.next_raw(), rb = b.next_raw(), rc = c.next_raw();
    all_equal = all_equal && (ra == rb);
    any_equal_across = any_equal_across || (ra == rc);
  }
  CHECK(all_equal);
  CHECK(!any_equal_across);

  PathRng u(spec, 0);
  double lo = 1.0, hi = 0.0;
  for (int i = 0; i < 200000; ++i) {
    const double x = u.uniform();
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  CHECK(lo > 0.0);
  CHECK(hi < 1.0);
  CHECK(lo < 1e-4);
  CHECK(hi > 1.0 - 1e-4);
}

TEST_CASE("normal draws have the right first moments") {
  PathRng r({9, 0}, 1);
  const int n = 200000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = r.normal();
    s += z;
    s2 += z * z;
  }
  const double mean = s / n, var = s2 / n - mean * mean;
  CHECK(std::abs(mean) < 5.0 / std::sqrt(double(n)));
  CHECK(std::abs(var - 1.0) < 0.02);
}

TEST_CASE("substreams decorrelate and are stable") {
  const RngSpec base{123, 5};
  const RngSpec s1 = substream(base, 1), s1b = substream(base, 1),
                s2 = substream(base, 2);
  CHECK(s1.stream_id == s1b.stream_id);
  CHECK(s1.stream_id != s2.stream_id);
  CHECK(s1.base_seed == base.base_seed);
  PathRng a(s1, 0), b(s2, 0);
  bool any_equal = false;
  for (int i = 0; i < 100; ++i) any_equal = any_equal || (a.next_raw() == b.next_raw());
  CHECK(!any_equal);
}

TEST_CASE("stable sampler at half order follows the levy law") {
  // D = 1/(2 N^2) for standard normal N, so P(D <= x) = erfc(1/(2 sqrt(x)))
  PathRng r({2024, 0}, 0);
  const int n = 20000;
  std::vector<double> xs(n);
  for (int i = 0; i < n; ++i) xs[i] = sample_stable(FracOrder(0.5), r);
  const double d = ks_stat(xs, [](double x) { return std::erfc(0.5 / std::sqrt(x)); });
  CHECK(d * std::sqrt(double(n)) < oracles::kKs1Pct);
}

TEST_CASE("stable sampler matches its laplace transform") {
  for (double b : {0.3, 0.7}) {
    for (double s : {0.5, 2.0}) {
      PathRng r({77, 0}, static_cast<std::uint64_t>(10 * b + s));
      const int n = 30000;
      std::vector<double> v(n);
      for (int i = 0; i < n; ++i)
        v[i] = std::exp(-s * sample_stable(FracOrder(b), r));
      const double want = std::exp(-std::pow(s, b));
      CHECK(std::abs(sample_mean(v) - want) < 4.0 * sample_se(v));
    }
  }
}

TEST_CASE("inverse subordinator draws scale bitwise in the horizon") {
  for (double b : {0.3, 0.5, 0.8}) {
    PathRng r1({5, 1}, 7), r2({5, 1}, 7);
    for (int i = 0; i < 50; ++i) {
      const double et = sample_inverse_subordinator(FracOrder(b), 2.7, r1);
      const double e1 = sample_inverse_subordinator(FracOrder(b), 1.0, r2);
      CHECK(et == std::pow(2.7, b) * e1);
    }
  }
}

TEST_CASE("inverse subordinator at half order is a scaled half normal") {
  // E_t = sqrt(2t) |Z|, so P(E_t <= x) = erf(x / (2 sqrt(t)))
  const double t = 1.7;
  PathRng r({31, 0}, 0);
  const int n = 20000;
  std::vector<double> xs(n);
  for (int i = 0; i < n; ++i)
    xs[i] = sample_inverse_subordinator(FracOrder(0.5), t, r);
  const double d =
      ks_stat(xs, [&](double x) { return std::erf(x / (2.0 * std::sqrt(t))); });
  CHECK(d * std::sqrt(double(n)) < oracles::kKs1Pct);
}

TEST_CASE("killed path with zero clock stays put") {
  const OperatorSpec op = IntervalLaplacian{kPi};
  PathRng r({1, 0}, 0);
  const PathEndpoint ep = simulate_killed_path(op, {1.0, 0.0}, 0.0, {}, r);
  CHECK(ep.alive);
  CHECK(ep.position.x == 1.0);
}

TEST_CASE("fixed-clock survival matches the eigenfunction series") {
  // P(tau > s) from pi/2 on (0, pi): sum over odd n of
  // (4/(n pi)) (-1)^((n-1)/2) exp(-n^2 s), here s = 1
  double want = 0.0;
  for (int n = 1; n <= 9; n += 2)
    want += 4.0 / (n * kPi) * ((n % 4 == 1) ? 1.0 : -1.0) * std::exp(-double(n) * n);
  const OperatorSpec op = IntervalLaplacian{kPi};
  PathConfig cfg;
  cfg.dt = 1e-3;
  const int n_paths = 20000;
  int alive = 0;
  for (int i = 0; i < n_paths; ++i) {
    PathRng r({404, 0}, i);
    alive += simulate_killed_path(op, {kPi / 2, 0.0}, 1.0, cfg, r).alive ? 1 : 0;
  }
  const double p = double(alive) / n_paths;
  const double se = std::sqrt(want * (1.0 - want) / n_paths);
  CHECK(std::abs(p - want) < 4.0 * se + 2e-3);
}

TEST_CASE("bridge correction kills paths a plain grid check misses") {
  const OperatorSpec op = IntervalLaplacian{kPi};
  PathConfig coarse;
  coarse.dt = 0.01;
  coarse.n_paths = 20000;
  PathConfig no_bridge = coarse;
  no_bridge.bridge_correction = false;
  const InitialData one{[](Point) { return 1.0; }, "indicator"};
  const McEstimate with_b =
      solve_mc(op, one, FracOrder(0.5), 1.0, {kPi / 2, 0.0}, coarse, {60, 0});
  const McEstimate without_b =
      solve_mc(op, one, FracOrder(0.5), 1.0, {kPi / 2, 0.0}, no_bridge, {60, 0});
  CHECK(with_b.alive_fraction + 0.01 < without_b.alive_fraction);
}

TEST_CASE("both killing modes agree path by path") {
  const OperatorSpec op = IntervalLaplacian{kPi};
  const InitialData f = poly_datum(op);
  PathConfig cfg;
  cfg.dt = 1e-3;
  cfg.n_paths = 2000;
  std::vector<double> outer, timechanged;
  const McEstimate a = detail::solve_mc_collect(op, f, FracOrder(0.6), 1.0,
                                                {1.2, 0.0}, cfg, {11, 3},
                                                KillingMode::OuterClock, &outer);
  const McEstimate b = detail::solve_mc_collect(
      op, f, FracOrder(0.6), 1.0, {1.2, 0.0}, cfg, {11, 3},
      KillingMode::TimeChangedClock, &timechanged);
  REQUIRE(outer.size() == timechanged.size());
  bool identical = true;
  for (std::size_t i = 0; i < outer.size(); ++i)
    identical = identical && (outer[i] == timechanged[i]);
  CHECK(identical);
  CHECK(a.mean == b.mean);
  CHECK(a.std_error == b.std_error);
}

TEST_CASE("monte carlo hits the single-mode value") {
  const OperatorSpec op = IntervalLaplacian{kPi};
  const SpectralModel m = eigenpairs(op, 1);
  const InitialData f = mode_datum(m, 0);
  PathConfig cfg;
  cfg.dt = 1e-3;
  cfg.n_paths = 20000;
  const McEstimate est =
      solve_mc(op, f, FracOrder(0.5), 1.0, {kPi / 2, 0.0}, cfg, {314, 0});
  CHECK(est.n_paths == cfg.n_paths);
  CHECK(est.std_error > 0.0);
  CHECK(est.alive_fraction > 0.0);
  CHECK(est.alive_fraction < 1.0);
  CHECK(std::abs(est.mean - oracles::kSingleMode) < 4.0 * est.std_error + 2e-3);
}

TEST_CASE("iterated brownian clocks hit the single-mode value") {
  const OperatorSpec op = IntervalLaplacian{kPi};
  const SpectralModel m = eigenpairs(op, 1);
  const InitialData f = mode_datum(m, 0);
  PathConfig cfg;
  cfg.dt = 1e-3;
  cfg.n_paths = 10000;
  const McEstimate one =
      solve_ibm(op, f, 1.0, {kPi / 2, 0.0}, cfg, {271, 0});
  CHECK(std::abs(one.mean - oracles::kSingleMode) < 4.0 * one.std_error + 2e-3);
  const McEstimate two =
      solve_ibm_twosided(op, f, 1.0, {kPi / 2, 0.0}, cfg, {272, 0});
  CHECK(std::abs(two.mean - oracles::kSingleMode) < 4.0 * two.std_error + 2e-3);
}

TEST_CASE("two-sided clock estimate is mirror invariant") {
  const OperatorSpec op = IntervalLaplacian{kPi};
  const InitialData f = poly_datum(op);
  PathConfig cfg;
  cfg.dt = 2e-3;
  cfg.n_paths = 3000;
  const McEstimate plain = detail::solve_ibm_twosided_impl(
      op, f, 0.8, {1.9, 0.0}, cfg, {99, 4}, false);
  const McEstimate mirrored = detail::solve_ibm_twosided_impl(
      op, f, 0.8, {1.9, 0.0}, cfg, {99, 4}, true);
  CHECK(plain.mean == mirrored.mean);
  CHECK(plain.std_error == mirrored.std_error);
  CHECK(plain.alive_fraction == mirrored.alive_fraction);
}

TEST_CASE("renewal counts normalize to the subordinator mean") {
  CtrwConfig cfg{FracOrder(0.5), 1e4, 1.0, 20000};
  const std::vector<double> counts = ctrw_scaled_counts(cfg, {55, 0});
  REQUIRE(counts.size() == 20000);
  const double want = 1.0 / std::tgamma(1.5);
  // the renewal mean carries a second-order term of about one jump unit at
  // finite scale, observed ~ -1.05 units across orders; allow 1.5
  const double unit = std::tgamma(0.5) * std::pow(1e4, -0.5);
  CHECK(std::abs(sample_mean(counts) - want) < 4.0 * sample_se(counts) + 1.5 * unit);
  // values are multiples of the normalization constant
  for (int i = 0; i < 50; ++i) {
    const double k = counts[i] / unit;
    CHECK(std::abs(k - std::round(k)) < 1e-9);
  }
}

TEST_CASE("scaled renewal counts approach the inverse subordinator law") {
  CtrwConfig cfg{FracOrder(0.5), 1e4, 1.0, 10000};
  const std::vector<double> counts = ctrw_scaled_counts(cfg, {56, 0});
  const double d = ks_stat(counts, [](double x) { return std::erf(x / 2.0); });
  CHECK(d < 0.03);
}

TEST_CASE("estimates are independent of the thread count") {
  const OperatorSpec op = IntervalLaplacian{kPi};
  const InitialData f = poly_datum(op);
  PathConfig cfg;
  cfg.dt = 2e-3;
  cfg.n_paths = 4000;
#ifdef _OPENMP
  omp_set_num_threads(1);
#endif
  const McEstimate one = solve_mc(op, f, FracOrder(0.4), 0.7, {1.0, 0.0}, cfg, {8, 8});
#ifdef _OPENMP
  omp_set_num_threads(4);
#endif
  const McEstimate four = solve_mc(op, f, FracOrder(0.4), 0.7, {1.0, 0.0}, cfg, {8, 8});
  CHECK(one.mean == four.mean);
  CHECK(one.std_error == four.std_error);
}

TEST_CASE("rectangle paths stay consistent with the spectral value") {
  const OperatorSpec op = RectangleLaplacian{kPi, kPi};
  const SpectralModel m = eigenpairs(op, 1);
  const InitialData f = mode_datum(m, 0);
  PathConfig cfg;
  cfg.dt = 1e-3;
  cfg.n_paths = 10000;
  const McEstimate est =
      solve_mc(op, f, FracOrder(0.5), 0.5, {kPi / 2, kPi / 2}, cfg, {21, 0});
  // lambda_11 = 2, u(t) = E_{1/2}(-2 sqrt(t)) phi_11(center)
  const double exact = detail::ml_e(0.5, 2.0 * std::sqrt(0.5)) * (2.0 / kPi);
  CHECK(std::abs(est.mean - exact) < 4.0 * est.std_error + 2e-3);
}

}  // TEST_SUITE
