#include "subdiff/operators.hpp"

#include <cmath>
#include <sstream>

namespace subdiff {

Coefficient Coefficient::constant(double c) {
  Coefficient a;
  a.value = [c](double) { return c; };
  a.derivative = [](double) { return 0.0; };
  std::ostringstream os;
  os << "a(x)=" << c;
  a.description = os.str();
  return a;
}

Coefficient Coefficient::affine(double c0, double c1) {
  Coefficient a;
  a.value = [c0, c1](double x) { return c0 + c1 * x; };
  a.derivative = [c1](double) { return c1; };
  std::ostringstream os;
  os << "a(x)=" << c0 << (c1 >= 0 ? "+" : "") << c1 << "*x";
  a.description = os.str();
  return a;
}

Coefficient Coefficient::custom(std::function<double(double)> v,
                                std::function<double(double)> dv,
                                std::string desc) {
  Coefficient a;
  a.value = std::move(v);
  if (dv) {
    a.derivative = std::move(dv);
  } else {
    auto f = a.value;
    a.derivative = [f](double x) {
      const double h = 1e-6 * (1.0 + std::abs(x));
      return (f(x + h) - f(x - h)) / (2.0 * h);
    };
  }
  a.description = std::move(desc);
  return a;
}

int dimension(const OperatorSpec& op) {
  return std::holds_alternative<RectangleLaplacian>(op) ? 2 : 1;
}

bool contains(const OperatorSpec& op, Point p) {
  return std::visit(
      [&](const auto& o) -> bool {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, RectangleLaplacian>)
          return p.x > 0.0 && p.x < o.lx && p.y > 0.0 && p.y < o.ly;
        else if constexpr (std::is_same_v<T, IntervalLaplacian>)
          return p.x > 0.0 && p.x < o.length;
        else
          return p.x > 0.0 && p.x < o.length;
      },
      op);
}

bool strictly_inside(const OperatorSpec& op, Point p, double margin) {
  return std::visit(
      [&](const auto& o) -> bool {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, RectangleLaplacian>)
          return p.x > margin && p.x < o.lx - margin && p.y > margin &&
                 p.y < o.ly - margin;
        else
          return p.x > margin && p.x < o.length - margin;
      },
      op);
}

double domain_measure(const OperatorSpec& op) {
  return std::visit(
      [](const auto& o) -> double {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, RectangleLaplacian>)
          return o.lx * o.ly;
        else
          return o.length;
      },
      op);
}

std::string describe(const OperatorSpec& op) {
  std::ostringstream os;
  std::visit(
      [&](const auto& o) {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, IntervalLaplacian>)
          os << "interval(0," << o.length << ")";
        else if constexpr (std::is_same_v<T, RectangleLaplacian>)
          os << "rectangle(0," << o.lx << ")x(0," << o.ly << ")";
        else
          os << "divergence(0," << o.length << "), " << o.a.description
             << ", grid " << o.grid_points;
      },
      op);
  return os.str();
}

}  // namespace subdiff
