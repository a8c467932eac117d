#include "subdiff/spectral.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numeric>
#include <sstream>

#include "subdiff/quadrature.hpp"

namespace subdiff {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

int transform_panels(int n_modes) { return std::max(64, 4 * n_modes); }

double interval_phi(double M, int n1, double x) {
  return std::sqrt(2.0 / M) * std::sin(n1 * kPi * x / M);
}

struct FitResult {
  double c_log;  // intercept
  double k_hat;  // decay exponent: log|fbar| ~ c_log - k_hat log lambda
  int n_used;
};

FitResult fit_decay(const SpectralModel& model, const SpectralCoefficients& coeffs) {
  double scale = 0.0;
  for (double v : coeffs.values) scale = std::fmax(scale, std::abs(v));
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (size_t i = 0; i < coeffs.values.size(); ++i) {
    const double a = std::abs(coeffs.values[i]);
    if (a <= 1e-12 * scale) continue;
    const double lx = std::log(model.eigenvalue(static_cast<int>(i)));
    const double ly = std::log(a);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) return {0.0, std::numeric_limits<double>::infinity(), n};
  const double denom = n * sxx - sx * sx;
  if (denom <= 0.0) return {0.0, std::numeric_limits<double>::infinity(), n};
  const double slope = (n * sxy - sx * sy) / denom;
  return {(sy - slope * sx) / n, -slope, n};
}

}  // namespace

double SpectralModel::eigenvalue(int n) const { return eigenvalues_.at(n); }

double SpectralModel::eigenfunction(int n, Point p) const {
  if (const auto* iv = std::get_if<IntervalLaplacian>(&op_)) {
    if (p.x <= 0.0 || p.x >= iv->length) return 0.0;
    return interval_phi(iv->length, n + 1, p.x);
  }
  if (const auto* rc = std::get_if<RectangleLaplacian>(&op_)) {
    if (p.x <= 0.0 || p.x >= rc->lx || p.y <= 0.0 || p.y >= rc->ly) return 0.0;
    const auto [m, k] = rect_modes_[n];
    return interval_phi(rc->lx, m, p.x) * interval_phi(rc->ly, k, p.y);
  }
  const auto& dv = std::get<DivergenceForm1D>(op_);
  if (p.x <= 0.0 || p.x >= dv.length) return 0.0;
  const std::vector<double>& v = grid_vectors_[n];
  const int J = static_cast<int>(v.size());
  // grid points sit at (j+1) h, j = 0..J-1, with 0 at both walls
  const double s = p.x / grid_h_;
  const int cell = static_cast<int>(std::floor(s));  // between nodes cell-1, cell
  const double frac = s - cell;
  const double left = (cell >= 1 && cell <= J) ? v[cell - 1] : 0.0;
  const double right = (cell + 1 >= 1 && cell + 1 <= J) ? v[cell] : 0.0;
  return left + frac * (right - left);
}

Eigenmode SpectralModel::mode(int n) const {
  Eigenmode m;
  m.index = n + 1;
  m.eigenvalue = eigenvalue(n);
  SpectralModel self = *this;
  m.eigenfunction = [self, n](Point p) { return self.eigenfunction(n, p); };
  if (on_grid()) {
    const std::vector<double>& v = grid_vectors_[n];
    double s = 0.0;
    for (double vi : v) s += vi * vi;
    m.norm_check = std::sqrt(grid_h_ * s);
  } else if (const auto* iv = std::get_if<IntervalLaplacian>(&op_)) {
    const double M = iv->length;
    const int n1 = n + 1;
    m.norm_check = std::sqrt(quad::composite8(
        [&](double x) {
          const double p = interval_phi(M, n1, x);
          return p * p;
        },
        0.0, M, transform_panels(n_modes_)));
  } else {
    const auto& rc = std::get<RectangleLaplacian>(op_);
    const auto [mm, kk] = rect_modes_[n];
    const int panels = transform_panels(n_modes_);
    const double nx = quad::composite8(
        [&](double x) {
          const double p = interval_phi(rc.lx, mm, x);
          return p * p;
        },
        0.0, rc.lx, panels);
    const double ny = quad::composite8(
        [&](double y) {
          const double p = interval_phi(rc.ly, kk, y);
          return p * p;
        },
        0.0, rc.ly, panels);
    m.norm_check = std::sqrt(nx * ny);
  }
  return m;
}

std::vector<Point> SpectralModel::boundary_samples() const {
  std::vector<Point> pts;
  if (const auto* rc = std::get_if<RectangleLaplacian>(&op_)) {
    for (int i = 0; i <= 4; ++i) {
      const double fx = rc->lx * i / 4.0, fy = rc->ly * i / 4.0;
      pts.push_back({fx, 0.0});
      pts.push_back({fx, rc->ly});
      pts.push_back({0.0, fy});
      pts.push_back({rc->lx, fy});
    }
  } else {
    const double M = std::holds_alternative<IntervalLaplacian>(op_)
                         ? std::get<IntervalLaplacian>(op_).length
                         : std::get<DivergenceForm1D>(op_).length;
    pts.push_back({0.0, 0.0});
    pts.push_back({M, 0.0});
  }
  return pts;
}

SpectralModel eigenpairs(const OperatorSpec& op, int n_modes) {
  if (n_modes < 1) throw std::invalid_argument("eigenpairs: need at least one mode");
  SpectralModel model;
  model.op_ = op;
  model.n_modes_ = n_modes;

  if (const auto* iv = std::get_if<IntervalLaplacian>(&op)) {
    if (!(iv->length > 0.0)) throw std::invalid_argument("interval length must be positive");
    for (int n = 1; n <= n_modes; ++n) {
      const double q = n * kPi / iv->length;
      model.eigenvalues_.push_back(q * q);
    }
    return model;
  }

  if (const auto* rc = std::get_if<RectangleLaplacian>(&op)) {
    if (!(rc->lx > 0.0) || !(rc->ly > 0.0))
      throw std::invalid_argument("rectangle sides must be positive");
    // the N smallest tensor modes all have both indices <= N, since the N
    // single-index modes (k,1) are each smaller than anything with m > N
    struct Cand {
      double lambda;
      int m, n;
    };
    std::vector<Cand> cands;
    cands.reserve(static_cast<size_t>(n_modes) * n_modes);
    for (int m = 1; m <= n_modes; ++m)
      for (int n = 1; n <= n_modes; ++n) {
        const double qm = m * kPi / rc->lx, qn = n * kPi / rc->ly;
        cands.push_back({qm * qm + qn * qn, m, n});
      }
    std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
      if (a.lambda != b.lambda) return a.lambda < b.lambda;
      if (a.m != b.m) return a.m < b.m;
      return a.n < b.n;
    });
    for (int i = 0; i < n_modes; ++i) {
      model.eigenvalues_.push_back(cands[i].lambda);
      model.rect_modes_.emplace_back(cands[i].m, cands[i].n);
    }
    return model;
  }

  const auto& dv = std::get<DivergenceForm1D>(op);
  if (!(dv.length > 0.0)) throw std::invalid_argument("domain length must be positive");
  if (dv.grid_points < 16) throw std::invalid_argument("divergence-form grid needs >= 16 points");
  if (n_modes >= dv.grid_points)
    throw std::invalid_argument("mode count must stay below the grid resolution");
  if (!(dv.lambda_ell > 0.0)) throw std::invalid_argument("ellipticity bound must be positive");
  if (!dv.a.value) throw std::invalid_argument("coefficient function missing");

  const int J = dv.grid_points;
  const double h = dv.length / (J + 1);
  std::vector<double> amid(J + 1);  // a at (j + 1/2) h, j = 0..J
  for (int j = 0; j <= J; ++j) {
    const double x = (j + 0.5) * h;
    const double a = dv.a.value(x);
    if (!std::isfinite(a) || a < dv.lambda_ell || a > 1.0 / dv.lambda_ell ||
        std::abs(a) > dv.lambda_cap) {
      std::ostringstream os;
      os << "coefficient violates ellipticity bounds at x=" << x << " (a=" << a << ")";
      throw std::invalid_argument(os.str());
    }
    amid[j] = a;
  }

  std::vector<double> diag(J), off(J - 1);
  const double ih2 = 1.0 / (h * h);
  for (int j = 0; j < J; ++j) diag[j] = (amid[j] + amid[j + 1]) * ih2;
  for (int j = 0; j + 1 < J; ++j) off[j] = -amid[j + 1] * ih2;

  std::vector<double> evals(J), evecs(static_cast<size_t>(J) * n_modes);
  std::vector<lapack_int> isuppz(2 * static_cast<size_t>(n_modes));
  lapack_int found = 0;
  const lapack_int info = LAPACKE_dstevr(
      LAPACK_ROW_MAJOR, 'V', 'I', J, diag.data(), off.data(), 0.0, 0.0, 1,
      n_modes, 0.0, &found, evals.data(), evecs.data(), n_modes, isuppz.data());
  if (info != 0 || found < n_modes)
    throw std::runtime_error("tridiagonal eigensolver failed");

  model.grid_h_ = h;
  for (int n = 0; n < n_modes; ++n) {
    model.eigenvalues_.push_back(evals[n]);
    std::vector<double> v(J);
    double s = 0.0;
    for (int j = 0; j < J; ++j) {
      v[j] = evecs[static_cast<size_t>(j) * n_modes + n];
      s += v[j] * v[j];
    }
    double scale = 1.0 / std::sqrt(h * s);
    if (v[0] < 0.0) scale = -scale;  // deterministic sign
    for (int j = 0; j < J; ++j) v[j] *= scale;
    model.grid_vectors_.push_back(std::move(v));
  }
  return model;
}

SpectralCoefficients transform(const SpectralModel& model, const InitialData& f) {
  const int N = model.size();
  SpectralCoefficients out;
  out.values.resize(N);

  // boundary behavior check: the expansion assumes Dirichlet data
  Point center{0.0, 0.0};
  if (const auto* rc = std::get_if<RectangleLaplacian>(&model.op())) {
    center = {0.5 * rc->lx, 0.5 * rc->ly};
  } else if (const auto* iv = std::get_if<IntervalLaplacian>(&model.op())) {
    center = {0.5 * iv->length, 0.0};
  } else {
    center = {0.5 * std::get<DivergenceForm1D>(model.op()).length, 0.0};
  }
  const double fscale = std::fmax(1e-30, std::abs(f(center)));
  for (Point bp : model.boundary_samples()) {
    if (std::abs(f(bp)) > 1e-8 * std::fmax(1.0, fscale)) {
      std::cerr << "transform: initial datum does not vanish on the boundary ("
                << describe(model.op()) << ")\n";
      break;
    }
  }

  if (const auto* iv = std::get_if<IntervalLaplacian>(&model.op())) {
    const double M = iv->length;
    const int panels = transform_panels(N);
    for (int n = 0; n < N; ++n) {
      const int n1 = n + 1;
      const double v = quad::composite8(
          [&](double x) { return f({x, 0.0}) * interval_phi(M, n1, x); }, 0.0, M,
          panels);
      out.values[n] = v;
      if (!std::isfinite(v)) throw std::runtime_error("transform: non-finite integrand");
    }
  } else if (const auto* rc = std::get_if<RectangleLaplacian>(&model.op())) {
    int max_idx = 1;
    for (int n = 0; n < N; ++n) {
      const auto m = model.rect_mode(n);
      max_idx = std::max({max_idx, m.first, m.second});
    }
    const int panels = transform_panels(max_idx);
    const int px = panels * 8;
    std::vector<double> gx(px), gwx(px), gy(px), gwy(px);
    const double wx = rc->lx / panels, wy = rc->ly / panels;
    for (int p = 0; p < panels; ++p)
      for (int i = 0; i < 8; ++i) {
        gx[p * 8 + i] = p * wx + 0.5 * wx * (1.0 + quad::kGl8Node[i]);
        gwx[p * 8 + i] = 0.5 * wx * quad::kGl8Weight[i];
        gy[p * 8 + i] = p * wy + 0.5 * wy * (1.0 + quad::kGl8Node[i]);
        gwy[p * 8 + i] = 0.5 * wy * quad::kGl8Weight[i];
      }
    std::vector<double> F(static_cast<size_t>(px) * px);
    for (int i = 0; i < px; ++i)
      for (int j = 0; j < px; ++j) F[static_cast<size_t>(i) * px + j] = f({gx[i], gy[j]});
    std::vector<double> row(px);
    for (int n = 0; n < N; ++n) {
      const auto [mm, kk] = model.rect_mode(n);
      for (int j = 0; j < px; ++j) row[j] = gwy[j] * interval_phi(rc->ly, kk, gy[j]);
      double acc = 0.0;
      for (int i = 0; i < px; ++i) {
        double inner = 0.0;
        const double* Fr = &F[static_cast<size_t>(i) * px];
        for (int j = 0; j < px; ++j) inner += Fr[j] * row[j];
        acc += inner * gwx[i] * interval_phi(rc->lx, mm, gx[i]);
      }
      out.values[n] = acc;
      if (!std::isfinite(acc)) throw std::runtime_error("transform: non-finite integrand");
    }
  } else {
    const int J = model.grid_points();
    const double h = model.grid_h();
    std::vector<double> fv(J);
    for (int j = 0; j < J; ++j) fv[j] = f({(j + 1) * h, 0.0});
    for (int n = 0; n < N; ++n) {
      const std::vector<double>& v = model.grid_vector(n);
      double acc = 0.0;
      for (int j = 0; j < J; ++j) acc += v[j] * fv[j];
      out.values[n] = h * acc;
      if (!std::isfinite(out.values[n]))
        throw std::runtime_error("transform: non-finite integrand");
    }
  }

  out.l2_norm_sq = 0.0;
  for (double v : out.values) out.l2_norm_sq += v * v;
  return out;
}

SolutionGrid solve_fractional(const SpectralModel& model,
                              const SpectralCoefficients& coeffs, FracOrder beta,
                              const std::vector<double>& times,
                              const std::vector<Point>& points) {
  if (static_cast<int>(coeffs.values.size()) != model.size())
    throw std::invalid_argument("solve_fractional: coefficients not aligned with model");
  const int N = model.size();
  const double b = beta.value();
  SolutionGrid grid;
  grid.times = times;
  grid.points = points;
  grid.values.assign(times.size() * points.size(), 0.0);
  std::vector<double> mlf(N);
  for (size_t ti = 0; ti < times.size(); ++ti) {
    const double t = times[ti];
    if (!(t >= 0.0)) throw std::invalid_argument("solve_fractional: times must be >= 0");
    const double tb = (t == 0.0) ? 0.0 : std::pow(t, b);
    for (int n = 0; n < N; ++n)
      mlf[n] = (t == 0.0) ? 1.0 : detail::ml_e(b, model.eigenvalue(n) * tb);
    for (size_t pj = 0; pj < points.size(); ++pj) {
      double acc = 0.0;
      for (int n = 0; n < N; ++n)
        acc += coeffs.values[n] * mlf[n] * model.eigenfunction(n, points[pj]);
      grid.values[ti * points.size() + pj] = acc;
    }
  }
  return grid;
}

SolutionGrid solve_fourth_order(const SpectralModel& model,
                                const SpectralCoefficients& coeffs,
                                const std::vector<double>& times,
                                const std::vector<Point>& points) {
  if (static_cast<int>(coeffs.values.size()) != model.size())
    throw std::invalid_argument("solve_fourth_order: coefficients not aligned with model");
  const int N = model.size();
  SolutionGrid grid;
  grid.times = times;
  grid.points = points;
  grid.values.assign(times.size() * points.size(), 0.0);
  for (size_t ti = 0; ti < times.size(); ++ti) {
    const double t = times[ti];
    if (!(t >= 0.0)) throw std::invalid_argument("solve_fourth_order: times must be >= 0");
    const double rt = std::sqrt(t);
    for (size_t pj = 0; pj < points.size(); ++pj) {
      double acc = 0.0;
      for (int n = 0; n < N; ++n) {
        const double factor =
            (t == 0.0) ? 1.0 : detail::ml_e(0.5, model.eigenvalue(n) * rt);
        acc += coeffs.values[n] * factor * model.eigenfunction(n, points[pj]);
      }
      grid.values[ti * points.size() + pj] = acc;
    }
  }
  return grid;
}

double heat_kernel(const SpectralModel& model, double t, Point x, Point y,
                   double t_floor) {
  if (!(t >= t_floor)) {
    std::ostringstream os;
    os << "heat_kernel: t=" << t << " below the uniform-convergence floor " << t_floor;
    throw std::domain_error(os.str());
  }
  double acc = 0.0;
  for (int n = 0; n < model.size(); ++n)
    acc += std::exp(-model.eigenvalue(n) * t) * model.eigenfunction(n, x) *
           model.eigenfunction(n, y);
  return acc;
}

SpectralCoefficients semigroup_apply(const SpectralModel& model,
                                     const SpectralCoefficients& coeffs, double l) {
  if (!(l >= 0.0)) throw std::domain_error("semigroup_apply requires l >= 0");
  if (static_cast<int>(coeffs.values.size()) != model.size())
    throw std::invalid_argument("semigroup_apply: coefficients not aligned with model");
  SpectralCoefficients out;
  out.values.resize(coeffs.values.size());
  for (size_t n = 0; n < coeffs.values.size(); ++n)
    out.values[n] = coeffs.values[n] * std::exp(-model.eigenvalue(static_cast<int>(n)) * l);
  out.l2_norm_sq = 0.0;
  for (double v : out.values) out.l2_norm_sq += v * v;
  return out;
}

int truncation_select(const SpectralCoefficients& coeffs_full, double eps) {
  if (!(eps > 0.0)) throw std::domain_error("truncation_select requires eps > 0");
  const int Nf = static_cast<int>(coeffs_full.values.size());
  if (Nf < 1) throw std::invalid_argument("truncation_select: empty coefficients");
  const double eps2 = eps * eps;
  // suffix sums over the available list
  std::vector<double> suffix(Nf + 1, 0.0);
  for (int n = Nf - 1; n >= 0; --n)
    suffix[n] = suffix[n + 1] + coeffs_full.values[n] * coeffs_full.values[n];
  // the list certifies the tail only if its trailing quarter is already well
  // inside the budget; otherwise the unseen remainder could dominate
  const int q = std::max(1, Nf / 4);
  if (!(suffix[Nf - q] < 0.5 * eps2))
    throw TailNotCertified(
        "coefficient list too short to certify the truncation tail");
  for (int N = 1; N <= Nf; ++N)
    if (suffix[N] < eps2) return N;
  return Nf;
}

SmoothnessReport smoothness_diagnostic(const SpectralCoefficients& coeffs,
                                       const SpectralModel& model) {
  const int N = static_cast<int>(coeffs.values.size());
  if (N < 1) throw std::invalid_argument("smoothness_diagnostic: empty coefficients");
  double scale = 0.0;
  for (double v : coeffs.values) scale = std::fmax(scale, std::abs(v));
  if (scale == 0.0) throw std::invalid_argument("smoothness_diagnostic: all coefficients zero");

  SmoothnessReport rep;
  rep.threshold = 1.0 + 0.75 * model.dim();

  int last_nonzero = -1;
  for (int n = 0; n < N; ++n)
    if (std::abs(coeffs.values[n]) > 1e-12 * scale) last_nonzero = n;
  if (last_nonzero < N / 2) {
    // expansion terminates inside the resolved range: decay beyond resolution
    rep.finite_expansion = true;
    rep.k_hat = std::numeric_limits<double>::infinity();
    rep.meets_threshold = true;
    rep.n_fit = last_nonzero + 1;
    return rep;
  }
  const FitResult fit = fit_decay(model, coeffs);
  if (fit.n_used < 8)
    throw std::invalid_argument("smoothness_diagnostic: need >= 8 nonzero coefficients");
  rep.finite_expansion = false;
  rep.k_hat = fit.k_hat;
  rep.meets_threshold = fit.k_hat > rep.threshold;
  rep.n_fit = fit.n_used;
  return rep;
}

namespace detail {

double sup_phi(const SpectralModel& model, int n) {
  if (model.on_grid()) {
    double m = 0.0;
    for (double v : model.grid_vector(std::min(n, model.size() - 1)))
      m = std::fmax(m, std::abs(v));
    return m;
  }
  if (const auto* rc = std::get_if<RectangleLaplacian>(&model.op()))
    return 2.0 / std::sqrt(rc->lx * rc->ly);
  return std::sqrt(2.0 / std::get<IntervalLaplacian>(model.op()).length);
}

double coefficient_tail_estimate(const SpectralModel& model,
                                 const SpectralCoefficients& coeffs, double power) {
  const FitResult fit = fit_decay(model, coeffs);
  const int N = model.size();
  if (!std::isfinite(fit.k_hat)) return 0.0;  // expansion terminates
  const double sup = sup_phi(model, N - 1);
  const double d = model.dim();
  const double growth = model.eigenvalue(N - 1) / std::pow(N, 2.0 / d);
  const double expo = 2.0 / d * (power - fit.k_hat);
  auto term = [&](double n) {
    const double lam = growth * std::pow(n, 2.0 / d);
    return std::exp(fit.c_log) * std::pow(lam, power - fit.k_hat) * sup;
  };
  if (expo < -1.0) {
    double acc = 0.0;
    for (double n = N + 1; n < N + 200000; ++n) {
      const double tv = term(n);
      acc += tv;
      if (tv < 1e-18 * acc) break;
    }
    return acc;
  }
  // the absolute tail diverges (oscillatory series converges conditionally);
  // the first omitted term sets the honest magnitude scale
  return term(N + 1);
}

}  // namespace detail

}  // namespace subdiff
