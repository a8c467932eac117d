#include "subdiff/initial_data.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "subdiff/spectral.hpp"

namespace subdiff {

InitialData mode_datum(const SpectralModel& model, int mode_index) {
  if (mode_index < 0 || mode_index >= model.size())
    throw std::out_of_range("mode_datum: mode index out of range");
  // SpectralModel instances share immutable data, so copying into the closure
  // is cheap and keeps the datum valid past the caller's model
  SpectralModel m = model;
  std::ostringstream os;
  os << "mode" << (mode_index + 1);
  return {[m, mode_index](Point p) { return m.eigenfunction(mode_index, p); },
          os.str()};
}

InitialData poly_datum(const OperatorSpec& op) {
  return std::visit(
      [](const auto& o) -> InitialData {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, RectangleLaplacian>) {
          const double lx = o.lx, ly = o.ly;
          return {[lx, ly](Point p) {
                    return p.x * (lx - p.x) * p.y * (ly - p.y);
                  },
                  "poly"};
        } else {
          const double M = o.length;
          return {[M](Point p) { return p.x * (M - p.x); }, "poly"};
        }
      },
      op);
}

namespace {
double bump1(double x, double M) {
  const double s = 2.0 * x / M - 1.0;
  if (std::abs(s) >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - s * s));
}
}  // namespace

InitialData bump_datum(const OperatorSpec& op) {
  return std::visit(
      [](const auto& o) -> InitialData {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, RectangleLaplacian>) {
          const double lx = o.lx, ly = o.ly;
          return {[lx, ly](Point p) { return bump1(p.x, lx) * bump1(p.y, ly); },
                  "bump"};
        } else {
          const double M = o.length;
          return {[M](Point p) { return bump1(p.x, M); }, "bump"};
        }
      },
      op);
}

InitialData sampled_datum(std::vector<double> xs, std::vector<double> fs) {
  if (xs.size() != fs.size() || xs.size() < 2)
    throw std::invalid_argument("sampled_datum: need matching xs/fs with >= 2 samples");
  for (size_t i = 1; i < xs.size(); ++i)
    if (!(xs[i] > xs[i - 1]))
      throw std::invalid_argument("sampled_datum: xs must be strictly increasing");
  auto eval = [xs = std::move(xs), fs = std::move(fs)](Point p) {
    const double x = p.x;
    if (x <= xs.front() || x >= xs.back()) {
      if (x == xs.front()) return fs.front();
      if (x == xs.back()) return fs.back();
      return 0.0;
    }
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    const size_t i = it - xs.begin();
    const double w = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
    return fs[i - 1] + w * (fs[i] - fs[i - 1]);
  };
  return {std::move(eval), "sampled"};
}

}  // namespace subdiff
