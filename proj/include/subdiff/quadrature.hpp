#pragma once

#include <cmath>
#include <cstdlib>

namespace subdiff::quad {

// Gauss-Legendre nodes/weights on (-1,1).
inline constexpr double kGl8Node[8] = {
    -0.96028985649753618, -0.79666647741362673, -0.52553240991632899,
    -0.18343464249564978, 0.18343464249564978,  0.52553240991632899,
    0.79666647741362673,  0.96028985649753618};
inline constexpr double kGl8Weight[8] = {
    0.10122853629037669, 0.22238103445337434, 0.31370664587788705,
    0.36268378337836177, 0.36268378337836177, 0.31370664587788705,
    0.22238103445337434, 0.10122853629037669};

inline constexpr double kGl15Node[15] = {
    -0.98799251802048538, -0.93727339240070595, -0.84820658341042721,
    -0.72441773136017007, -0.57097217260853883, -0.39415134707756339,
    -0.20119409399743451, 0.0,                  0.20119409399743451,
    0.39415134707756339,  0.57097217260853883,  0.72441773136017007,
    0.84820658341042721,  0.93727339240070595,  0.98799251802048538};
inline constexpr double kGl15Weight[15] = {
    0.030753241996118647, 0.070366047488108069, 0.10715922046717177,
    0.13957067792615391,  0.16626920581699378,  0.18616100001556188,
    0.19843148532711125,  0.2025782419255609,   0.19843148532711125,
    0.18616100001556188,  0.16626920581699378,  0.13957067792615391,
    0.10715922046717177,  0.070366047488108069, 0.030753241996118647};

template <class F>
double panel15(F&& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < 15; ++i) s += kGl15Weight[i] * f(c + h * kGl15Node[i]);
  return s * h;
}

template <class F>
double composite8(F&& f, double a, double b, int panels) {
  const double w = (b - a) / panels;
  double s = 0.0, comp = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double pa = a + p * w, c = pa + 0.5 * w, h = 0.5 * w;
    double ps = 0.0;
    for (int i = 0; i < 8; ++i) ps += kGl8Weight[i] * f(c + h * kGl8Node[i]);
    // Neumaier-compensated accumulation across panels
    const double term = ps * h, t = s + term;
    comp += (std::abs(s) >= std::abs(term)) ? (s - t) + term : (term - t) + s;
    s = t;
  }
  return s + comp;
}

namespace detail {
template <class F>
double adapt15(F&& f, double a, double b, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double left = panel15(f, a, m), right = panel15(f, m, b);
  const double err = std::abs(left + right - whole);
  // terminate on the requested tolerance or the rounding floor of the halves;
  // without the floor the recursion can chase noise indefinitely
  if (err < tol || err < 2e-16 * (std::abs(left) + std::abs(right)) + 1e-305 ||
      depth <= 0)
    return left + right;
  const double child = std::fmax(0.5 * tol, 1e-17 * (std::abs(left) + std::abs(right)));
  return adapt15(f, a, m, left, child, depth - 1) +
         adapt15(f, m, b, right, child, depth - 1);
}
}  // namespace detail

// Adaptive 15-point Gauss-Legendre with absolute tolerance. Refinement is
// driven by sampled disagreement between a panel and its halves, so a feature
// much narrower than the panels that cover it can be missed entirely; callers
// must bracket such features themselves.
template <class F>
double adaptive15(F&& f, double a, double b, double abs_tol, int max_depth = 26) {
  if (!(b > a)) return 0.0;
  return detail::adapt15(f, a, b, panel15(f, a, b), abs_tol, max_depth);
}

}  // namespace subdiff::quad
