#include "nlfp/geometry.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <string>

#include "nlfp/error.hpp"

namespace nlfp {

namespace {

// Relative (to h) distance below which a lattice node counts as on a sphere.
constexpr double kOnSphere = 1e-9;

std::uint64_t next_grid_id() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1, std::memory_order_relaxed);
}

double norm2(const Point& p, int n) {
  double s = 0.0;
  for (int d = 0; d < n; ++d) s += p[d] * p[d];
  return s;
}

Point minus(const Point& a, const Point& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

void check_dimension(int n) {
  if (n < 1 || n > kMaxDimension) {
    throw InvalidGrid("dimension must be 1, 2 or 3, got " + std::to_string(n));
  }
}

// Distance t > 0 at which p + t*dir*e_axis reaches the sphere of radius r,
// leaving it (exit, p inside) or entering it (entry, p outside). Negative
// when the ray never meets the sphere.
double sphere_exit(const Point& p, int n, int axis, double dir, double r) {
  const double pe = p[axis] * dir;
  const double c = norm2(p, n) - r * r;  // < 0 inside
  const double disc = pe * pe - c;
  if (disc < 0.0) return -1.0;
  return -pe + std::sqrt(disc);
}

double sphere_entry(const Point& p, int n, int axis, double dir, double r) {
  const double pe = p[axis] * dir;
  const double c = norm2(p, n) - r * r;  // > 0 outside
  if (pe >= 0.0) return -1.0;
  const double disc = pe * pe - c;
  if (disc < 0.0) return -1.0;
  return -pe - std::sqrt(disc);
}

}  // namespace

// PiecewiseLinear

PiecewiseLinear::PiecewiseLinear(std::vector<double> knots, std::vector<double> values)
    : knots_(std::move(knots)), values_(std::move(values)) {
  if (knots_.empty() || knots_.size() != values_.size()) {
    throw InvalidParameter("table needs matching, nonempty knot and value lists");
  }
  for (std::size_t i = 1; i < knots_.size(); ++i) {
    if (!(knots_[i] > knots_[i - 1])) {
      throw InvalidParameter("table knots must be strictly increasing");
    }
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw InvalidParameter("table values must be finite");
  }
}

double PiecewiseLinear::operator()(double x) const {
  if (x <= knots_.front()) return values_.front();
  if (x >= knots_.back()) return values_.back();
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
  const auto k = static_cast<std::size_t>(it - knots_.begin());
  const double t = (x - knots_[k - 1]) / (knots_[k] - knots_[k - 1]);
  return values_[k - 1] + t * (values_[k] - values_[k - 1]);
}

double PiecewiseLinear::slope(double x) const {
  if (x < knots_.front() || x >= knots_.back()) return 0.0;
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
  const auto k = static_cast<std::size_t>(it - knots_.begin());
  return (values_[k] - values_[k - 1]) / (knots_[k] - knots_[k - 1]);
}

// Domain helpers

int domain_dimension(const DomainDescriptor& domain) {
  return std::visit(
      [](const auto& d) -> int {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, BoxDomain>) {
          return static_cast<int>(d.bounds.size());
        } else {
          return d.dimension;
        }
      },
      domain);
}

namespace {
double unit_ball(int n) {
  switch (n) {
    case 1: return 2.0;
    case 2: return std::numbers::pi;
    case 3: return 4.0 * std::numbers::pi / 3.0;
    default: throw InvalidParameter("unsupported dimension");
  }
}
}  // namespace

double continuum_measure(const DomainDescriptor& domain) {
  return std::visit(
      [](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, BoxDomain>) {
          double v = 1.0;
          for (const auto& iv : d.bounds) v *= iv.hi - iv.lo;
          return v;
        } else if constexpr (std::is_same_v<T, BallDomain>) {
          return unit_ball(d.dimension) * std::pow(d.radius, d.dimension);
        } else {
          return unit_ball(d.dimension) *
                 (std::pow(d.r_out, d.dimension) - std::pow(d.r_in, d.dimension));
        }
      },
      domain);
}

// Grid

Point Grid::position(std::size_t node) const {
  const Index idx = index_of(node);
  Point p{};
  for (int d = 0; d < dim_; ++d) p[d] = origin_[d] + h_ * idx[d];
  return p;
}

Index Grid::index_of(std::size_t node) const {
  Index idx{0, 0, 0};
  std::size_t rest = node;
  for (int d = 0; d < dim_; ++d) {
    const auto s = static_cast<std::size_t>(shape_[d]);
    idx[d] = static_cast<int>(rest % s);
    rest /= s;
  }
  return idx;
}

std::size_t Grid::node_at(const Index& idx) const {
  std::size_t node = 0;
  for (int d = dim_ - 1; d >= 0; --d) {
    node = node * static_cast<std::size_t>(shape_[d]) + static_cast<std::size_t>(idx[d]);
  }
  return node;
}

bool Grid::in_lattice(const Index& idx) const {
  for (int d = 0; d < dim_; ++d) {
    if (idx[d] < 0 || idx[d] >= shape_[d]) return false;
  }
  return true;
}

double Grid::boundary_distance(const Point& x) const {
  return std::visit(
      [&](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, BoxDomain>) {
          double dist = INFINITY;
          for (int a = 0; a < dim_; ++a) {
            dist = std::min({dist, x[a] - d.bounds[a].lo, d.bounds[a].hi - x[a]});
          }
          return dist;
        } else if constexpr (std::is_same_v<T, BallDomain>) {
          return d.radius - std::sqrt(norm2(minus(x, d.center), dim_));
        } else {
          const double r = std::sqrt(norm2(minus(x, d.center), dim_));
          return std::min(r - d.r_in, d.r_out - r);
        }
      },
      domain_);
}

bool Grid::contains(const Point& x) const {
  return std::visit(
      [&](const auto& d) -> bool {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, BoxDomain>) {
          for (int a = 0; a < dim_; ++a) {
            if (!(x[a] > d.bounds[a].lo && x[a] < d.bounds[a].hi)) return false;
          }
          return true;
        } else if constexpr (std::is_same_v<T, BallDomain>) {
          return norm2(minus(x, d.center), dim_) < d.radius * d.radius;
        } else {
          const double r2 = norm2(minus(x, d.center), dim_);
          return r2 > d.r_in * d.r_in && r2 < d.r_out * d.r_out;
        }
      },
      domain_);
}

void Grid::finalize_interior() {
  interior_.clear();
  interior_index_.assign(classes_.size(), -1);
  for (std::size_t node = 0; node < classes_.size(); ++node) {
    if (classes_[node] == NodeClass::Interior) {
      interior_index_[node] = static_cast<std::int32_t>(interior_.size());
      interior_.push_back(node);
    }
  }
  if (interior_.empty()) throw InvalidGrid("grid has no interior nodes");
  cell_ = std::pow(h_, dim_);
}

Grid build_box(const std::vector<Interval>& bounds, double h) {
  const int n = static_cast<int>(bounds.size());
  check_dimension(n);
  if (!(h > 0.0) || !std::isfinite(h)) throw InvalidGrid("spacing h must be positive");

  Grid g;
  g.dim_ = n;
  g.h_ = h;
  g.domain_ = BoxDomain{bounds};
  g.id_ = next_grid_id();
  for (int a = 0; a < n; ++a) {
    const double len = bounds[a].hi - bounds[a].lo;
    if (!(len > 0.0)) throw InvalidGrid("box bounds must be nonempty intervals");
    if (h > len) throw InvalidGrid("spacing h exceeds the shortest box side");
    const double cells = len / h;
    const double rounded = std::round(cells);
    if (std::abs(cells - rounded) > 1e-9 * std::max(1.0, cells)) {
      throw InvalidGrid("spacing h does not divide box side " + std::to_string(a));
    }
    if (rounded < 2.0) throw InvalidGrid("box side too short for an interior node");
    g.shape_[a] = static_cast<int>(rounded) + 1;
    g.origin_[a] = bounds[a].lo;
  }

  std::size_t count = 1;
  for (int a = 0; a < n; ++a) count *= static_cast<std::size_t>(g.shape_[a]);
  g.classes_.resize(count);
  for (std::size_t node = 0; node < count; ++node) {
    const Index idx = g.index_of(node);
    bool interior = true;
    for (int a = 0; a < n; ++a) {
      if (idx[a] == 0 || idx[a] == g.shape_[a] - 1) interior = false;
    }
    g.classes_[node] = interior ? NodeClass::Interior : NodeClass::Boundary;
  }
  g.finalize_interior();

  g.arms_.resize(g.interior_count() * static_cast<std::size_t>(n) * 2);
  for (std::size_t i = 0; i < g.interior_count(); ++i) {
    const Index idx = g.index_of(g.interior_[i]);
    for (int a = 0; a < n; ++a) {
      for (int side = 0; side < 2; ++side) {
        Index nb = idx;
        nb[a] += side == 0 ? -1 : 1;
        const std::size_t nb_node = g.node_at(nb);
        Arm& arm = g.arms_[(i * n + a) * 2 + side];
        arm.theta = 1.0;
        arm.neighbor = g.interior_index_[nb_node];
        if (arm.neighbor < 0) arm.boundary_point = g.position(nb_node);
      }
    }
  }
  return g;
}

Grid build_ball(const Point& center, double radius, double h, int dimension) {
  check_dimension(dimension);
  if (!(h > 0.0) || !std::isfinite(h)) throw InvalidGrid("spacing h must be positive");
  if (!(radius > 2.0 * h)) throw InvalidGrid("ball radius must exceed 2h");

  Grid g;
  g.dim_ = dimension;
  g.h_ = h;
  BallDomain dom;
  dom.dimension = dimension;
  dom.center = center;
  dom.radius = radius;
  for (int d = dimension; d < kMaxDimension; ++d) dom.center[d] = 0.0;
  g.domain_ = dom;
  g.id_ = next_grid_id();

  const int m = static_cast<int>(std::ceil(radius / h)) + 1;
  for (int d = 0; d < dimension; ++d) {
    g.shape_[d] = 2 * m + 1;
    g.origin_[d] = dom.center[d] - m * h;
  }
  std::size_t count = 1;
  for (int d = 0; d < dimension; ++d) count *= static_cast<std::size_t>(g.shape_[d]);
  g.classes_.resize(count);
  // Nodes within rounding distance of the sphere sit on it: an arm of
  // length ~1e-16 h would wreck the Shortley-Weller weights.
  const double snap = kOnSphere * h;
  for (std::size_t node = 0; node < count; ++node) {
    const double r = std::sqrt(norm2(minus(g.position(node), dom.center), dimension));
    g.classes_[node] = r < radius - snap    ? NodeClass::Interior
                       : r <= radius + snap ? NodeClass::Boundary
                                            : NodeClass::Exterior;
  }
  g.finalize_interior();

  g.arms_.resize(g.interior_count() * static_cast<std::size_t>(dimension) * 2);
  for (std::size_t i = 0; i < g.interior_count(); ++i) {
    const std::size_t node = g.interior_[i];
    const Index idx = g.index_of(node);
    const Point x = g.position(node);
    const Point p = minus(x, dom.center);
    for (int a = 0; a < dimension; ++a) {
      for (int side = 0; side < 2; ++side) {
        const double dir = side == 0 ? -1.0 : 1.0;
        Index nb = idx;
        nb[a] += side == 0 ? -1 : 1;
        Arm& arm = g.arms_[(i * dimension + a) * 2 + side];
        arm.neighbor = g.interior_index_[g.node_at(nb)];
        arm.theta = 1.0;
        if (arm.neighbor >= 0) continue;
        const double t = sphere_exit(p, dimension, a, dir, radius);
        arm.theta = std::clamp(t / h, 1e-14, 1.0);
        arm.boundary_point = x;
        arm.boundary_point[a] += dir * arm.theta * h;
      }
    }
  }
  return g;
}

Grid build_annulus(const Point& center, double r_in, double r_out, double h, int dimension) {
  check_dimension(dimension);
  if (!(h > 0.0) || !std::isfinite(h)) throw InvalidGrid("spacing h must be positive");
  if (!(r_in > 0.0) || !(r_out > r_in)) throw InvalidGrid("annulus needs 0 < r_in < r_out");
  if (!(r_out - r_in > 2.0 * h)) throw InvalidGrid("annulus width must exceed 2h");

  Grid g;
  g.dim_ = dimension;
  g.h_ = h;
  AnnulusDomain dom;
  dom.dimension = dimension;
  dom.center = center;
  dom.r_in = r_in;
  dom.r_out = r_out;
  for (int d = dimension; d < kMaxDimension; ++d) dom.center[d] = 0.0;
  g.domain_ = dom;
  g.id_ = next_grid_id();

  const int m = static_cast<int>(std::ceil(r_out / h)) + 1;
  for (int d = 0; d < dimension; ++d) {
    g.shape_[d] = 2 * m + 1;
    g.origin_[d] = dom.center[d] - m * h;
  }
  std::size_t count = 1;
  for (int d = 0; d < dimension; ++d) count *= static_cast<std::size_t>(g.shape_[d]);
  g.classes_.resize(count);
  const double snap = kOnSphere * h;
  for (std::size_t node = 0; node < count; ++node) {
    const double r = std::sqrt(norm2(minus(g.position(node), dom.center), dimension));
    if (r > r_in + snap && r < r_out - snap) {
      g.classes_[node] = NodeClass::Interior;
    } else if (std::abs(r - r_in) <= snap || std::abs(r - r_out) <= snap) {
      g.classes_[node] = NodeClass::Boundary;
    } else {
      g.classes_[node] = NodeClass::Exterior;
    }
  }
  g.finalize_interior();

  g.arms_.resize(g.interior_count() * static_cast<std::size_t>(dimension) * 2);
  for (std::size_t i = 0; i < g.interior_count(); ++i) {
    const std::size_t node = g.interior_[i];
    const Index idx = g.index_of(node);
    const Point x = g.position(node);
    const Point p = minus(x, dom.center);
    for (int a = 0; a < dimension; ++a) {
      for (int side = 0; side < 2; ++side) {
        const double dir = side == 0 ? -1.0 : 1.0;
        Index nb = idx;
        nb[a] += side == 0 ? -1 : 1;
        Arm& arm = g.arms_[(i * dimension + a) * 2 + side];
        const std::int32_t nb_interior = g.interior_index_[g.node_at(nb)];

        // An axis segment between two interior nodes can still clip the
        // inner sphere, so crossings are checked on every arm.
        double t = INFINITY;
        const double t_out = sphere_exit(p, dimension, a, dir, r_out);
        if (t_out > 0.0 && t_out <= h) t = t_out;
        const double t_in = sphere_entry(p, dimension, a, dir, r_in);
        if (t_in > 0.0 && t_in <= h) t = std::min(t, t_in);

        if (std::isfinite(t) && !(nb_interior >= 0 && t >= h)) {
          arm.neighbor = -1;
          arm.theta = std::clamp(t / h, 1e-14, 1.0);
          arm.boundary_point = x;
          arm.boundary_point[a] += dir * arm.theta * h;
        } else if (nb_interior >= 0) {
          arm.neighbor = nb_interior;
          arm.theta = 1.0;
        } else {
          arm.neighbor = -1;
          arm.theta = 1.0;
          arm.boundary_point = g.position(g.node_at(nb));
        }
      }
    }
  }
  return g;
}

Grid build_grid(const DomainDescriptor& domain, double h) {
  return std::visit(
      [h](const auto& d) -> Grid {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, BoxDomain>) {
          return build_box(d.bounds, h);
        } else if constexpr (std::is_same_v<T, BallDomain>) {
          return build_ball(d.center, d.radius, h, d.dimension);
        } else {
          return build_annulus(d.center, d.r_in, d.r_out, h, d.dimension);
        }
      },
      domain);
}

double domain_measure(const Grid& grid) {
  return grid.cell_measure() * static_cast<double>(grid.interior_count());
}

// BoundaryData

double BoundaryData::operator()(const Point& x) const {
  return std::visit(
      [&x](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, ZeroBoundary>) {
          return 0.0;
        } else if constexpr (std::is_same_v<T, RadialPolynomialBoundary>) {
          const Point p = minus(x, d.center);
          const double r = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
          double acc = 0.0;
          for (auto it = d.coeffs.rbegin(); it != d.coeffs.rend(); ++it) acc = acc * r + *it;
          return acc;
        } else if constexpr (std::is_same_v<T, AxisTableBoundary>) {
          return d.table(x[d.axis]);
        } else {
          return d.fn(x);
        }
      },
      desc_);
}

std::array<double, 2> boundary_range(const Grid& grid, const BoundaryData& psi) {
  double lo = INFINITY;
  double hi = -INFINITY;
  auto take = [&](const Point& p) {
    const double v = psi(p);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  };
  for (std::size_t node = 0; node < grid.node_count(); ++node) {
    if (grid.node_class(node) == NodeClass::Boundary) take(grid.position(node));
  }
  const int n = grid.dimension();
  for (std::size_t i = 0; i < grid.interior_count(); ++i) {
    for (int a = 0; a < n; ++a) {
      for (int side = 0; side < 2; ++side) {
        const Arm& arm = grid.arm(i, a, side);
        if (arm.neighbor < 0) take(arm.boundary_point);
      }
    }
  }
  return {lo, hi};
}

}  // namespace nlfp
