#pragma once

#include <functional>
#include <string>
#include <vector>

#include "subdiff/operators.hpp"

namespace subdiff {

class SpectralModel;

struct InitialData {
  std::function<double(Point)> eval;
  std::string name;
  double operator()(Point p) const { return eval(p); }
};

// The k-th eigenfunction of the model (0-based mode index). For grid models
// this is the interpolated discrete eigenvector.
InitialData mode_datum(const SpectralModel& model, int mode_index);

// x(M-x) on intervals and its tensor product on rectangles.
InitialData poly_datum(const OperatorSpec& op);

// Smooth compactly supported bump, vanishing to all orders at the boundary.
InitialData bump_datum(const OperatorSpec& op);

// Piecewise-linear interpolant of samples (1-D domains only); xs strictly
// increasing, f taken as 0 outside [xs.front(), xs.back()].
InitialData sampled_datum(std::vector<double> xs, std::vector<double> fs);

}  // namespace subdiff
