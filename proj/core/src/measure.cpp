#include "nlfp/measure.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <string>

#include "nlfp/error.hpp"

namespace nlfp {

// ProfileFunction

ProfileFunction ProfileFunction::linear(double a, double b) {
  if (!std::isfinite(a) || !std::isfinite(b)) {
    throw InvalidParameter("linear profile coefficients must be finite");
  }
  ProfileFunction g;
  g.kind_ = Kind::Linear;
  g.a_ = a;
  g.b_ = b;
  return g;
}

ProfileFunction ProfileFunction::table(std::vector<double> knots, std::vector<double> values) {
  ProfileFunction g;
  g.kind_ = Kind::Table;
  g.table_ = PiecewiseLinear(std::move(knots), std::move(values));
  return g;
}

double ProfileFunction::operator()(double t) const {
  return kind_ == Kind::Linear ? a_ * t + b_ : table_(t);
}

double ProfileFunction::derivative(double t) const {
  return kind_ == Kind::Linear ? a_ : table_.slope(t);
}

void ProfileFunction::check_domain(double domain_max) const {
  if (kind_ == Kind::Table) {
    const auto k = table_.knots();
    if (k.front() > 0.0 || k.back() < domain_max) {
      throw InvalidParameter("profile table must span [0, |Omega|] = [0, " +
                             std::to_string(domain_max) + "]");
    }
  }
}

namespace {
// Points at which a piecewise-linear g on [0, D] attains its extremes.
std::vector<double> breakpoints(const ProfileFunction& g, double D) {
  std::vector<double> pts{0.0, D};
  if (g.kind() == ProfileFunction::Kind::Table) {
    for (double k : g.tabulated().knots()) {
      if (k > 0.0 && k < D) pts.push_back(k);
    }
  }
  std::sort(pts.begin(), pts.end());
  return pts;
}
}  // namespace

double ProfileFunction::max_abs(double domain_max) const {
  double m = 0.0;
  for (double t : breakpoints(*this, domain_max)) m = std::max(m, std::abs((*this)(t)));
  return m;
}

bool ProfileFunction::negative_on(double domain_max) const {
  if ((*this)(0.0) > 0.0) return false;
  for (double t : breakpoints(*this, domain_max)) {
    if (t > 0.0 && !((*this)(t) < 0.0)) return false;
  }
  return true;
}

bool ProfileFunction::is_constant() const {
  if (kind_ == Kind::Linear) return a_ == 0.0;
  const auto v = table_.values();
  return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
}

// LevelStats

LevelStats::LevelStats(std::span<const double> values, double cell)
    : sorted_(values.begin(), values.end()), cell_(cell) {
  std::sort(sorted_.begin(), sorted_.end(), std::greater<>());
}

std::size_t LevelStats::count_at_least(double t) const {
  // sorted_ is descending: count the prefix with v >= t.
  const auto it = std::partition_point(sorted_.begin(), sorted_.end(),
                                       [t](double v) { return v >= t; });
  return static_cast<std::size_t>(it - sorted_.begin());
}

std::size_t LevelStats::count_equal(double t) const {
  const auto [lo, hi] = std::equal_range(sorted_.begin(), sorted_.end(), t, std::greater<>());
  return static_cast<std::size_t>(hi - lo);
}

double LevelStats::integral(double a, double b) const {
  if (!(b > a)) return 0.0;
  const double width = b - a;
  const std::size_t full = count_at_least(b);
  double partial = 0.0;
  for (std::size_t j = full; j < sorted_.size() && sorted_[j] > a; ++j) partial += sorted_[j] - a;
  return cell_ * (static_cast<double>(full) * width + partial);
}

double LevelStats::window_average(double top, double eps) const {
  return cell_ * window_count(top, eps);
}

double LevelStats::window_count(double top, double eps) const {
  // G(t) = cell * (#{v >= top}) on (.., top], plus one more cell for every
  // value v_j in (top - eps, top) over the part [top - eps, v_j] of the
  // window: a fraction 1 - (top - v_j)/eps of it.
  const std::size_t full = count_at_least(top);
  double frac = 0.0;
  for (std::size_t j = full; j < sorted_.size(); ++j) {
    const double term = 1.0 - (top - sorted_[j]) / eps;
    if (!(term > 0.0)) break;
    frac += term;
  }
  return static_cast<double>(full) + frac;
}

double LevelStats::gap_below(double t) const {
  const std::size_t full = count_at_least(t);
  if (full >= sorted_.size()) return std::numeric_limits<double>::infinity();
  return t - sorted_[full];
}

double LevelStats::min_positive_gap() const {
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t j = 1; j < sorted_.size(); ++j) {
    const double d = sorted_[j - 1] - sorted_[j];
    if (d > 0.0) gap = std::min(gap, d);
  }
  return gap;
}

// Superlevel measures

std::vector<double> superlevel_measures(std::span<const double> values, double cell,
                                        TieRule rule) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  std::vector<double> mu(n);
  std::size_t start = 0;
  while (start < n) {
    std::size_t end = start + 1;
    while (end < n && values[order[end]] == values[order[start]]) ++end;
    const double count = rule == TieRule::Closed
                             ? static_cast<double>(end)
                             : static_cast<double>(start) + 0.5 * static_cast<double>(end - start);
    for (std::size_t k = start; k < end; ++k) mu[order[k]] = cell * count;
    start = end;
  }
  return mu;
}

ScalarField superlevel_measures(const ScalarField& v, const Grid& grid, TieRule rule) {
  return ScalarField::from_interior(
      grid, superlevel_measures(v.interior_values(grid), grid.cell_measure(), rule));
}

std::vector<double> smoothed_superlevel_average(std::span<const double> values, double cell,
                                                double eps, TieRule rule) {
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw InvalidParameter("smoothing width eps must be positive");
  }
  const LevelStats stats(values, cell);
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    double count = stats.window_count(values[i], eps);
    if (rule == TieRule::HalfTies) count -= 0.5 * static_cast<double>(stats.count_equal(values[i]));
    out[i] = cell * count;
  }
  return out;
}

ScalarField smoothed_superlevel_average(const ScalarField& v, const Grid& grid, double eps,
                                        TieRule rule) {
  return ScalarField::from_interior(
      grid,
      smoothed_superlevel_average(v.interior_values(grid), grid.cell_measure(), eps, rule));
}

namespace {
std::vector<double> compose(std::vector<double> mu, double total, const ProfileFunction& g) {
  for (double& m : mu) m = g(std::clamp(m, 0.0, total));
  return mu;
}
}  // namespace

std::vector<double> rhs_plain(std::span<const double> values, double cell,
                              const ProfileFunction& g, TieRule rule) {
  const double total = cell * static_cast<double>(values.size());
  return compose(superlevel_measures(values, cell, rule), total, g);
}

ScalarField rhs_plain(const ScalarField& v, const Grid& grid, const ProfileFunction& g,
                      TieRule rule) {
  return ScalarField::from_interior(
      grid, rhs_plain(v.interior_values(grid), grid.cell_measure(), g, rule));
}

std::vector<double> rhs_smoothed(std::span<const double> values, double cell,
                                 const ProfileFunction& g, double eps, TieRule rule) {
  const double total = cell * static_cast<double>(values.size());
  return compose(smoothed_superlevel_average(values, cell, eps, rule), total, g);
}

ScalarField rhs_smoothed(const ScalarField& v, const Grid& grid, const ProfileFunction& g,
                         double eps, TieRule rule) {
  return ScalarField::from_interior(
      grid, rhs_smoothed(v.interior_values(grid), grid.cell_measure(), g, eps, rule));
}

std::vector<double> canonicalize_levels(std::span<const double> values, double rel_tol) {
  std::vector<double> out(values.begin(), values.end());
  if (out.size() < 2 || !(rel_tol > 0.0)) return out;
  std::vector<std::size_t> order(out.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  const double osc = values[order.front()] - values[order.back()];
  const double tol = rel_tol * osc;
  double level = values[order.front()];
  for (std::size_t k = 1; k < order.size(); ++k) {
    const double prev = values[order[k - 1]];
    const double cur = values[order[k]];
    if (prev - cur > tol) level = cur;
    out[order[k]] = level;
  }
  return out;
}

// Rearrangement

double StepFunction::operator()(double t) const {
  if (values_.empty()) return 0.0;
  if (!(t > 0.0)) return values_.front();
  const double last = static_cast<double>(values_.size() - 1);
  double k = std::min(std::floor(t / cell_), last);
  // The quotient can round across an integer; settle k against the products.
  while (k < last && (k + 1.0) * cell_ <= t) k += 1.0;
  while (k > 0.0 && k * cell_ > t) k -= 1.0;
  return values_[static_cast<std::size_t>(k)];
}

StepFunction increasing_rearrangement(std::span<const double> values, double cell) {
  std::vector<double> asc(values.begin(), values.end());
  std::sort(asc.begin(), asc.end());
  return StepFunction(std::move(asc), cell);
}

StepFunction increasing_rearrangement(const ScalarField& v, const Grid& grid) {
  return increasing_rearrangement(v.interior_values(grid), grid.cell_measure());
}

}  // namespace nlfp
