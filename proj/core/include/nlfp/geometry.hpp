#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <variant>
#include <vector>

#include "nlfp/table.hpp"

namespace nlfp {

inline constexpr int kMaxDimension = 3;

/// A point in R^n, n <= 3. Coordinates past the grid dimension are zero.
using Point = std::array<double, kMaxDimension>;
using Index = std::array<int, kMaxDimension>;

enum class NodeClass : std::uint8_t { Interior, Boundary, Exterior };

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct BoxDomain {
  std::vector<Interval> bounds;  // one interval per axis
};

struct BallDomain {
  int dimension = 2;
  Point center{};
  double radius = 1.0;
};

/// Region between two concentric spheres, r_in < |x - center| < r_out.
struct AnnulusDomain {
  int dimension = 2;
  Point center{};
  double r_in = 0.5;
  double r_out = 1.0;
};

using DomainDescriptor = std::variant<BoxDomain, BallDomain, AnnulusDomain>;

int domain_dimension(const DomainDescriptor& domain);

/// Lebesgue measure of the continuum domain.
double continuum_measure(const DomainDescriptor& domain);

/// One axis direction of the stencil at an Interior node. Either the lattice
/// neighbor is Interior (neighbor >= 0, theta == 1), or the arm ends on the
/// domain boundary at theta * h, where the Dirichlet value is taken.
struct Arm {
  std::int32_t neighbor = -1;  // interior index of the neighbor
  double theta = 1.0;
  Point boundary_point{};
};

/// Masked uniform lattice over a box, ball or annulus. Immutable once built.
class Grid {
 public:
  int dimension() const noexcept { return dim_; }
  double spacing() const noexcept { return h_; }
  const Point& origin() const noexcept { return origin_; }
  const Index& shape() const noexcept { return shape_; }
  const DomainDescriptor& domain() const noexcept { return domain_; }
  std::uint64_t id() const noexcept { return id_; }

  /// h^n
  double cell_measure() const noexcept { return cell_; }

  std::size_t node_count() const noexcept { return classes_.size(); }
  std::size_t interior_count() const noexcept { return interior_.size(); }

  NodeClass node_class(std::size_t node) const { return classes_[node]; }
  Point position(std::size_t node) const;
  Index index_of(std::size_t node) const;
  std::size_t node_at(const Index& idx) const;
  bool in_lattice(const Index& idx) const;

  /// Flat node ids of the Interior nodes, in lattice order.
  std::span<const std::size_t> interior_nodes() const noexcept { return interior_; }
  /// Position of a node in interior_nodes(), or -1.
  std::int32_t interior_index(std::size_t node) const { return interior_index_[node]; }

  /// side 0 points toward -e_axis, side 1 toward +e_axis.
  const Arm& arm(std::size_t interior, int axis, int side) const {
    return arms_[(interior * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(axis)) * 2 +
                 static_cast<std::size_t>(side)];
  }

  /// Distance from x to the boundary of the continuum domain.
  double boundary_distance(const Point& x) const;

  /// Strict interior test against the continuum domain.
  bool contains(const Point& x) const;

 private:
  friend Grid build_box(const std::vector<Interval>& bounds, double h);
  friend Grid build_ball(const Point& center, double radius, double h, int dimension);
  friend Grid build_annulus(const Point& center, double r_in, double r_out, double h,
                            int dimension);

  Grid() = default;
  void finalize_interior();

  int dim_ = 0;
  double h_ = 0.0;
  double cell_ = 0.0;
  Point origin_{};
  Index shape_{1, 1, 1};
  DomainDescriptor domain_;
  std::uint64_t id_ = 0;
  std::vector<NodeClass> classes_;
  std::vector<std::size_t> interior_;
  std::vector<std::int32_t> interior_index_;
  std::vector<Arm> arms_;
};

Grid build_box(const std::vector<Interval>& bounds, double h);
Grid build_ball(const Point& center, double radius, double h, int dimension);
Grid build_annulus(const Point& center, double r_in, double r_out, double h, int dimension);
Grid build_grid(const DomainDescriptor& domain, double h);

/// Discrete |Omega| = h^n * #Interior. Every level-set measure is taken
/// against this value.
double domain_measure(const Grid& grid);

// Dirichlet data

struct ZeroBoundary {};

/// psi(x) = sum_k coeffs[k] * |x - center|^k
struct RadialPolynomialBoundary {
  Point center{};
  std::vector<double> coeffs;
};

/// psi(x) = table(x[axis]), piecewise linear.
struct AxisTableBoundary {
  int axis = 0;
  PiecewiseLinear table;
};

struct FunctionBoundary {
  std::function<double(const Point&)> fn;
};

class BoundaryData {
 public:
  using Descriptor =
      std::variant<ZeroBoundary, RadialPolynomialBoundary, AxisTableBoundary, FunctionBoundary>;

  BoundaryData() = default;
  BoundaryData(Descriptor d) : desc_(std::move(d)) {}  // NOLINT(google-explicit-constructor)

  double operator()(const Point& x) const;
  const Descriptor& descriptor() const noexcept { return desc_; }

 private:
  Descriptor desc_ = ZeroBoundary{};
};

/// Dirichlet values at every boundary location the grid references: Boundary
/// nodes and arm endpoints. Returns {min, max}.
std::array<double, 2> boundary_range(const Grid& grid, const BoundaryData& psi);

}  // namespace nlfp
