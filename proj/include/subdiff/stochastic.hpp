#pragma once

#include <cstdint>
#include <vector>

#include "subdiff/initial_data.hpp"
#include "subdiff/operators.hpp"
#include "subdiff/specfun.hpp"

namespace subdiff {

struct RngSpec {
  std::uint64_t base_seed = 0;
  std::uint64_t stream_id = 0;
};

// Counter-based generator: every draw is a pure function of
// (base_seed, stream_id, path_index, counter), so paths reproduce identically
// for any thread count or execution order.
class PathRng {
 public:
  PathRng(RngSpec spec, std::uint64_t path_index);
  double uniform();  // open interval (0,1)
  double normal();
  std::uint64_t next_raw();

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

RngSpec substream(RngSpec spec, std::uint64_t tag);

struct PathConfig {
  double dt = 1e-4;
  long long n_paths = 100000;
  bool bridge_correction = true;
};

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  long long n_paths = 0;
  double alive_fraction = 0.0;
};

// One draw of the standard one-sided stable D_1 (Kanter's representation).
double sample_stable(FracOrder beta, PathRng& rng);

// One draw of E_t = (t/D_1)^beta, computed as t^beta * D_1^-beta so draws at
// horizon t equal t^beta times draws at horizon 1 bitwise under a shared seed.
double sample_inverse_subordinator(FracOrder beta, double t, PathRng& rng);

struct PathEndpoint {
  Point position;
  bool alive;
  double exit_clock;  // infinity when the path never left the domain
};

// Euler-Maruyama integration of the operator's diffusion to the given clock,
// killed at the boundary; optional Brownian-bridge interior-exit correction.
PathEndpoint simulate_killed_path(const OperatorSpec& op, Point x0, double clock,
                                  const PathConfig& cfg, PathRng& rng);

// Both indicator forms of the killed subordinated expectation. The events
// {tau_D(X) > E_t} and {tau_D(X(E)) > t} coincide path by path because the
// clock E is continuous and nondecreasing, so the two modes must agree exactly
// under a shared seed; they are evaluated through distinct expressions so that
// agreement is a checked fact rather than a definition.
enum class KillingMode { OuterClock, TimeChangedClock };

McEstimate solve_mc(const OperatorSpec& op, const InitialData& f, FracOrder beta,
                    double t, Point x0, const PathConfig& cfg, RngSpec rng,
                    KillingMode mode = KillingMode::OuterClock);

// Iterated-Brownian-motion form: clock |Y_t| with Y of variance 2t.
McEstimate solve_ibm(const OperatorSpec& op, const InitialData& f, double t,
                     Point x0, const PathConfig& cfg, RngSpec rng);

// Two-sided clock form: signed Y_t selects one of two independent outer paths.
McEstimate solve_ibm_twosided(const OperatorSpec& op, const InitialData& f,
                              double t, Point x0, const PathConfig& cfg,
                              RngSpec rng);

struct CtrwConfig {
  FracOrder beta;
  double scale_c = 1e4;
  double horizon_t = 1.0;
  long long n_walkers = 100000;
};

// Renewal counts N_{ct} of Pareto waits P(J>t)=t^-beta, normalized by
// Gamma(1-beta)/c^beta; the normalized counts converge in law to E_t.
// (The Gamma factor is the regular-variation constant of the stable limit:
// for these waits E[e^-sJ] = 1 - Gamma(1-beta) s^beta + O(s), so bare
// c^-beta counts converge to E_t/Gamma(1-beta) instead.)
std::vector<double> ctrw_scaled_counts(const CtrwConfig& cfg, RngSpec rng);

namespace detail {
// As solve_mc/solve_ibm but also collecting per-path contributions, for the
// path-level identity checks.
McEstimate solve_mc_collect(const OperatorSpec& op, const InitialData& f,
                            FracOrder beta, double t, Point x0,
                            const PathConfig& cfg, RngSpec rng, KillingMode mode,
                            std::vector<double>* per_path);
// mirror=true negates the signed clock and swaps the two outer streams; the
// estimate must be bitwise invariant.
McEstimate solve_ibm_twosided_impl(const OperatorSpec& op, const InitialData& f,
                                   double t, Point x0, const PathConfig& cfg,
                                   RngSpec rng, bool mirror);
}  // namespace detail

}  // namespace subdiff
