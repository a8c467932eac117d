#pragma once

#include <functional>
#include <string>
#include <variant>

namespace subdiff {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

// Scalar diffusion coefficient a(x) with derivative, for divergence-form
// operators (a u')'. Named constructors keep configurations serializable;
// custom callables fall back to a central difference when no derivative is
// supplied.
struct Coefficient {
  std::function<double(double)> value;
  std::function<double(double)> derivative;
  std::string description;

  static Coefficient constant(double c);
  static Coefficient affine(double c0, double c1);  // a(x) = c0 + c1 x
  static Coefficient custom(std::function<double(double)> v,
                            std::function<double(double)> dv = nullptr,
                            std::string desc = "custom");
};

struct IntervalLaplacian {
  double length;  // domain (0, length)
};

struct RectangleLaplacian {
  double lx;
  double ly;  // domain (0,lx) x (0,ly)
};

struct DivergenceForm1D {
  double length;
  Coefficient a;
  double lambda_ell;   // ellipticity lower bound: lambda_ell <= a(x) <= 1/lambda_ell
  double lambda_cap;   // bound on |a(x)|
  int grid_points;     // interior grid points of the discretization
};

using OperatorSpec =
    std::variant<IntervalLaplacian, RectangleLaplacian, DivergenceForm1D>;

int dimension(const OperatorSpec& op);
bool contains(const OperatorSpec& op, Point p);          // open-domain membership
bool strictly_inside(const OperatorSpec& op, Point p, double margin = 0.0);
double domain_measure(const OperatorSpec& op);
std::string describe(const OperatorSpec& op);

}  // namespace subdiff
