#pragma once

#include <span>
#include <vector>

namespace nlfp {

/// Continuous piecewise-linear interpolant through (knot, value) pairs.
/// Knots must be strictly increasing; queries outside the knot range are
/// clamped to the end values.
class PiecewiseLinear {
 public:
  PiecewiseLinear() = default;
  PiecewiseLinear(std::vector<double> knots, std::vector<double> values);

  double operator()(double x) const;
  /// Slope of the segment containing x (right segment at a knot); 0 outside
  /// the knot range.
  double slope(double x) const;

  std::span<const double> knots() const noexcept { return knots_; }
  std::span<const double> values() const noexcept { return values_; }

 private:
  std::vector<double> knots_;
  std::vector<double> values_;
};

}  // namespace nlfp
