#pragma once

#include <span>
#include <vector>

#include "nlfp/field.hpp"
#include "nlfp/geometry.hpp"
#include "nlfp/table.hpp"

namespace nlfp {

/// How a node's own cell and the cells of exactly tied nodes enter the
/// superlevel measure.
///   Closed:   h^n * #{v_j >= v_i}
///   HalfTies: h^n * (#{v_j > v_i} + #{v_j == v_i} / 2)
enum class TieRule { Closed, HalfTies };

/// The continuous profile g on [0, |Omega|].
class ProfileFunction {
 public:
  enum class Kind { Linear, Table };

  static ProfileFunction linear(double a, double b);
  static ProfileFunction table(std::vector<double> knots, std::vector<double> values);

  Kind kind() const noexcept { return kind_; }
  double slope() const noexcept { return a_; }
  double intercept() const noexcept { return b_; }
  const PiecewiseLinear& tabulated() const noexcept { return table_; }

  double operator()(double t) const;
  /// g'(t), one-sided at table knots.
  double derivative(double t) const;

  /// Throws InvalidParameter unless g is defined on all of [0, domain_max].
  void check_domain(double domain_max) const;

  /// sup of |g| over [0, domain_max].
  double max_abs(double domain_max) const;
  /// g < 0 on (0, domain_max].
  bool negative_on(double domain_max) const;
  bool is_constant() const;

 private:
  Kind kind_ = Kind::Linear;
  double a_ = 0.0;
  double b_ = 0.0;
  PiecewiseLinear table_;
};

/// Interior values sorted descending with O(log N) superlevel queries
/// G(t) = h^n * #{j : v_j >= t} and exact integrals of the step function G.
class LevelStats {
 public:
  LevelStats(std::span<const double> values, double cell);

  std::span<const double> sorted_desc() const noexcept { return sorted_; }
  double cell() const noexcept { return cell_; }
  double total() const noexcept { return cell_ * static_cast<double>(sorted_.size()); }

  std::size_t count_at_least(double t) const;
  std::size_t count_equal(double t) const;
  double superlevel(double t) const { return cell_ * static_cast<double>(count_at_least(t)); }

  /// Exact integral of G over [a, b].
  double integral(double a, double b) const;

  /// (1/eps) * integral of G over [top - eps, top]. Summed term by term in a
  /// fixed order so the result is monotone in eps to the last bit.
  double window_average(double top, double eps) const;
  /// window_average in units of cells.
  double window_count(double top, double eps) const;

  /// Distance from t down to the next strictly smaller value (inf if none).
  double gap_below(double t) const;
  /// Smallest positive difference between consecutive distinct values.
  double min_positive_gap() const;

 private:
  std::vector<double> sorted_;
  double cell_;
};

std::vector<double> superlevel_measures(std::span<const double> values, double cell,
                                        TieRule rule = TieRule::Closed);
ScalarField superlevel_measures(const ScalarField& v, const Grid& grid,
                                TieRule rule = TieRule::Closed);

/// Per node (1/eps) * integral_0^eps |{v >= v(x) - s}| ds, evaluated in closed
/// form. Throws InvalidParameter for eps <= 0.
std::vector<double> smoothed_superlevel_average(std::span<const double> values, double cell,
                                                double eps, TieRule rule = TieRule::Closed);
ScalarField smoothed_superlevel_average(const ScalarField& v, const Grid& grid, double eps,
                                        TieRule rule = TieRule::Closed);

/// g(clamp(mu_i, 0, |Omega|)).
std::vector<double> rhs_plain(std::span<const double> values, double cell,
                              const ProfileFunction& g, TieRule rule = TieRule::Closed);
ScalarField rhs_plain(const ScalarField& v, const Grid& grid, const ProfileFunction& g,
                      TieRule rule = TieRule::Closed);

std::vector<double> rhs_smoothed(std::span<const double> values, double cell,
                                 const ProfileFunction& g, double eps,
                                 TieRule rule = TieRule::Closed);
ScalarField rhs_smoothed(const ScalarField& v, const Grid& grid, const ProfileFunction& g,
                         double eps, TieRule rule = TieRule::Closed);

/// Merges values closer than rel_tol * osc(values) into exact ties (each
/// chain of near-equal values takes its largest member). Floating-point noise
/// in symmetric solutions otherwise splits ties arbitrarily.
std::vector<double> canonicalize_levels(std::span<const double> values, double rel_tol);

/// The increasing rearrangement u*(t) = inf{s : |{u < s}| >= t}: the sorted
/// values laid out on consecutive cells of width h^n over [0, |Omega|].
class StepFunction {
 public:
  StepFunction(std::vector<double> ascending, double cell)
      : values_(std::move(ascending)), cell_(cell) {}

  double operator()(double t) const;
  std::span<const double> values() const noexcept { return values_; }
  double cell() const noexcept { return cell_; }
  double support() const noexcept { return cell_ * static_cast<double>(values_.size()); }

 private:
  std::vector<double> values_;
  double cell_;
};

StepFunction increasing_rearrangement(std::span<const double> values, double cell);
StepFunction increasing_rearrangement(const ScalarField& v, const Grid& grid);

}  // namespace nlfp
