#include "subdiff/stochastic.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace subdiff {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kInf = std::numeric_limits<double>::infinity();

// smallest value uniform() can return; crossing probabilities below it can
// never fire, so their draw is skipped
constexpr double kMinUniform = 0x1p-54;
constexpr double kSkipExponent = 37.5;  // exp(-37.5) < kMinUniform

std::uint64_t fmix64(std::uint64_t k) {
  k ^= k >> 33;
  k *= 0xff51afd7ed558ccdull;
  k ^= k >> 33;
  k *= 0xc4ceb9fe1a85ec53ull;
  k ^= k >> 33;
  return k;
}

}  // namespace

PathRng::PathRng(RngSpec spec, std::uint64_t path_index) {
  std::uint64_t k = fmix64(spec.base_seed + 0x9e3779b97f4a7c15ull);
  k = fmix64(k ^ (spec.stream_id + 0xbf58476d1ce4e5b9ull));
  k = fmix64(k ^ (path_index + 0x94d049bb133111ebull));
  key_ = k;
}

std::uint64_t PathRng::next_raw() {
  std::uint64_t z = key_ + (++counter_) * 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

double PathRng::uniform() {
  return (static_cast<double>(next_raw() >> 11) + 0.5) * 0x1p-53;
}

double PathRng::normal() {
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

RngSpec substream(RngSpec spec, std::uint64_t tag) {
  RngSpec out = spec;
  out.stream_id = fmix64(spec.stream_id ^ (0xda942042e4dd58b5ull * (tag + 1)));
  return out;
}

double sample_stable(FracOrder beta, PathRng& rng) {
  const double b = beta.value();
  const double v = kPi * rng.uniform();
  const double w = -std::log(rng.uniform());
  const double r = b / (1.0 - b);
  const double log_a = r * std::log(std::sin(b * v)) +
                       std::log(std::sin((1.0 - b) * v)) -
                       (1.0 + r) * std::log(std::sin(v));
  return std::exp((log_a - std::log(w)) / r);
}

double sample_inverse_subordinator(FracOrder beta, double t, PathRng& rng) {
  if (!(t >= 0.0)) throw std::domain_error("sample_inverse_subordinator: t must be >= 0");
  const double d = sample_stable(beta, rng);
  return std::pow(t, beta.value()) * std::pow(d, -beta.value());
}

namespace {

struct StepTarget {
  double lx = 0.0, ly = 0.0;  // walls sit at 0 and lx (and 0, ly in 2d)
  int dim = 1;
  const DivergenceForm1D* dv = nullptr;
};

StepTarget step_target(const OperatorSpec& op) {
  StepTarget st;
  if (const auto* iv = std::get_if<IntervalLaplacian>(&op)) {
    st.lx = iv->length;
  } else if (const auto* rc = std::get_if<RectangleLaplacian>(&op)) {
    st.lx = rc->lx;
    st.ly = rc->ly;
    st.dim = 2;
  } else {
    st.dv = &std::get<DivergenceForm1D>(op);
    st.lx = st.dv->length;
  }
  return st;
}

// probability that a bridge pinned inside at both ends crossed the wall
// mid-step; d1, d2 are the endpoint distances to that wall
bool bridge_crossed(double d1, double d2, double a_h, PathRng& rng) {
  const double arg = d1 * d2 / a_h;
  if (arg >= kSkipExponent) return false;
  return rng.uniform() < std::exp(-arg);
}

}  // namespace

PathEndpoint simulate_killed_path(const OperatorSpec& op, Point x0, double clock,
                                  const PathConfig& cfg, PathRng& rng) {
  if (!(cfg.dt > 0.0)) throw std::invalid_argument("path step must be positive");
  if (!(clock >= 0.0)) throw std::invalid_argument("path clock must be >= 0");
  const StepTarget st = step_target(op);

  PathEndpoint ep{x0, true, kInf};
  if (!strictly_inside(op, x0)) {
    ep.alive = false;
    ep.exit_clock = 0.0;
    return ep;
  }

  double s = 0.0;
  while (s < clock) {
    const double h = std::fmin(cfg.dt, clock - s);
    Point p = ep.position;
    Point q = p;
    double a_mid = 1.0;
    if (st.dv != nullptr) {
      const double a0 = st.dv->a.value(p.x);
      q.x = p.x + st.dv->a.derivative(p.x) * h + std::sqrt(2.0 * a0 * h) * rng.normal();
      a_mid = st.dv->a.value(0.5 * (p.x + q.x));
    } else {
      const double sd = std::sqrt(2.0 * h);
      q.x = p.x + sd * rng.normal();
      if (st.dim == 2) q.y = p.y + sd * rng.normal();
    }
    s += h;

    bool outside = q.x <= 0.0 || q.x >= st.lx;
    if (st.dim == 2) outside = outside || q.y <= 0.0 || q.y >= st.ly;
    if (outside) {
      ep.position = q;
      ep.alive = false;
      ep.exit_clock = s;
      return ep;
    }
    if (cfg.bridge_correction) {
      const double ah = (st.dv != nullptr ? a_mid : 1.0) * h;
      bool crossed = bridge_crossed(p.x, q.x, ah, rng) ||
                     bridge_crossed(st.lx - p.x, st.lx - q.x, ah, rng);
      if (st.dim == 2)
        crossed = crossed || bridge_crossed(p.y, q.y, ah, rng) ||
                  bridge_crossed(st.ly - p.y, st.ly - q.y, ah, rng);
      if (crossed) {
        ep.position = q;
        ep.alive = false;
        ep.exit_clock = s;
        return ep;
      }
    }
    ep.position = q;
  }
  return ep;
}

namespace {

struct ChunkAcc {
  double sum = 0.0;
  double sum_sq = 0.0;
  long long alive = 0;
};

constexpr long long kChunk = 4096;

McEstimate finalize(const std::vector<ChunkAcc>& accs, long long n) {
  double s = 0.0, s2 = 0.0;
  long long alive = 0;
  for (const ChunkAcc& a : accs) {
    s += a.sum;
    s2 += a.sum_sq;
    alive += a.alive;
  }
  McEstimate est;
  est.n_paths = n;
  est.mean = s / n;
  est.alive_fraction = static_cast<double>(alive) / n;
  const double var = (n > 1) ? std::fmax(0.0, (s2 - n * est.mean * est.mean) / (n - 1)) : 0.0;
  est.std_error = std::sqrt(var / n);
  return est;
}

}  // namespace

namespace detail {

McEstimate solve_mc_collect(const OperatorSpec& op, const InitialData& f,
                            FracOrder beta, double t, Point x0,
                            const PathConfig& cfg, RngSpec rng, KillingMode mode,
                            std::vector<double>* per_path) {
  if (cfg.n_paths < 1) throw std::invalid_argument("need at least one path");
  if (!(t >= 0.0)) throw std::invalid_argument("time must be >= 0");
  const long long n = cfg.n_paths;
  const long long n_chunks = (n + kChunk - 1) / kChunk;
  std::vector<ChunkAcc> accs(n_chunks);
  if (per_path != nullptr) per_path->assign(n, 0.0);

#pragma omp parallel for schedule(dynamic)
  for (long long ci = 0; ci < n_chunks; ++ci) {
    ChunkAcc acc;
    const long long hi = std::min(n, (ci + 1) * kChunk);
    for (long long i = ci * kChunk; i < hi; ++i) {
      PathRng pr(rng, static_cast<std::uint64_t>(i));
      const double e_t = sample_inverse_subordinator(beta, t, pr);
      const PathEndpoint ep = simulate_killed_path(op, x0, e_t, cfg, pr);
      // {tau > E_t}: the diffusion on its own clock outlives the drawn clock.
      // {E_t < tau}: the time-changed path has not yet consumed the exit time.
      const bool alive = (mode == KillingMode::OuterClock) ? ep.alive
                                                           : (e_t < ep.exit_clock);
      const double val = alive ? f(ep.position) : 0.0;
      acc.sum += val;
      acc.sum_sq += val * val;
      acc.alive += alive ? 1 : 0;
      if (per_path != nullptr) (*per_path)[i] = val;
    }
    accs[ci] = acc;
  }
  return finalize(accs, n);
}

McEstimate solve_ibm_twosided_impl(const OperatorSpec& op, const InitialData& f,
                                   double t, Point x0, const PathConfig& cfg,
                                   RngSpec rng, bool mirror) {
  if (cfg.n_paths < 1) throw std::invalid_argument("need at least one path");
  if (!(t >= 0.0)) throw std::invalid_argument("time must be >= 0");
  const long long n = cfg.n_paths;
  const long long n_chunks = (n + kChunk - 1) / kChunk;
  std::vector<ChunkAcc> accs(n_chunks);
  const RngSpec clock_stream = substream(rng, 0);
  const RngSpec pos_stream = substream(rng, mirror ? 2 : 1);
  const RngSpec neg_stream = substream(rng, mirror ? 1 : 2);

#pragma omp parallel for schedule(dynamic)
  for (long long ci = 0; ci < n_chunks; ++ci) {
    ChunkAcc acc;
    const long long hi = std::min(n, (ci + 1) * kChunk);
    for (long long i = ci * kChunk; i < hi; ++i) {
      PathRng cr(clock_stream, static_cast<std::uint64_t>(i));
      double z = cr.normal();
      if (mirror) z = -z;
      const double clock = std::sqrt(2.0 * t) * std::abs(z);
      PathRng pr(z > 0.0 ? pos_stream : neg_stream, static_cast<std::uint64_t>(i));
      const PathEndpoint ep = simulate_killed_path(op, x0, clock, cfg, pr);
      const double val = ep.alive ? f(ep.position) : 0.0;
      acc.sum += val;
      acc.sum_sq += val * val;
      acc.alive += ep.alive ? 1 : 0;
    }
    accs[ci] = acc;
  }
  return finalize(accs, n);
}

}  // namespace detail

McEstimate solve_mc(const OperatorSpec& op, const InitialData& f, FracOrder beta,
                    double t, Point x0, const PathConfig& cfg, RngSpec rng,
                    KillingMode mode) {
  return detail::solve_mc_collect(op, f, beta, t, x0, cfg, rng, mode, nullptr);
}

McEstimate solve_ibm(const OperatorSpec& op, const InitialData& f, double t,
                     Point x0, const PathConfig& cfg, RngSpec rng) {
  if (cfg.n_paths < 1) throw std::invalid_argument("need at least one path");
  if (!(t >= 0.0)) throw std::invalid_argument("time must be >= 0");
  const long long n = cfg.n_paths;
  const long long n_chunks = (n + kChunk - 1) / kChunk;
  std::vector<ChunkAcc> accs(n_chunks);

#pragma omp parallel for schedule(dynamic)
  for (long long ci = 0; ci < n_chunks; ++ci) {
    ChunkAcc acc;
    const long long hi = std::min(n, (ci + 1) * kChunk);
    for (long long i = ci * kChunk; i < hi; ++i) {
      PathRng pr(rng, static_cast<std::uint64_t>(i));
      const double clock = std::sqrt(2.0 * t) * std::abs(pr.normal());
      const PathEndpoint ep = simulate_killed_path(op, x0, clock, cfg, pr);
      const double val = ep.alive ? f(ep.position) : 0.0;
      acc.sum += val;
      acc.sum_sq += val * val;
      acc.alive += ep.alive ? 1 : 0;
    }
    accs[ci] = acc;
  }
  return finalize(accs, n);
}

McEstimate solve_ibm_twosided(const OperatorSpec& op, const InitialData& f,
                              double t, Point x0, const PathConfig& cfg,
                              RngSpec rng) {
  return detail::solve_ibm_twosided_impl(op, f, t, x0, cfg, rng, false);
}

std::vector<double> ctrw_scaled_counts(const CtrwConfig& cfg, RngSpec rng) {
  if (cfg.n_walkers < 1) throw std::invalid_argument("need at least one walker");
  if (!(cfg.scale_c > 0.0) || !(cfg.horizon_t > 0.0))
    throw std::invalid_argument("scale and horizon must be positive");
  const double b = cfg.beta.value();
  const double horizon = cfg.scale_c * cfg.horizon_t;
  const double norm = std::tgamma(1.0 - b) * std::pow(cfg.scale_c, -b);
  std::vector<double> out(cfg.n_walkers);

#pragma omp parallel for schedule(dynamic)
  for (long long i = 0; i < cfg.n_walkers; ++i) {
    PathRng pr(rng, static_cast<std::uint64_t>(i));
    long long count = 0;
    double elapsed = 0.0;
    for (;;) {
      elapsed += std::pow(pr.uniform(), -1.0 / b);
      if (elapsed > horizon) break;
      ++count;
    }
    out[i] = norm * static_cast<double>(count);
  }
  return out;
}

}  // namespace subdiff
