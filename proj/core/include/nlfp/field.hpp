#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "nlfp/geometry.hpp"

namespace nlfp {

/// One value per lattice node of a specific grid. Interior values carry the
/// unknowns; Boundary nodes hold Dirichlet data when it has been applied;
/// Exterior nodes are zero.
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(const Grid& grid, double fill = 0.0);

  static ScalarField from_interior(const Grid& grid, std::span<const double> interior);

  std::uint64_t grid_id() const noexcept { return grid_id_; }
  std::size_t size() const noexcept { return values_.size(); }

  double operator[](std::size_t node) const { return values_[node]; }
  double& operator[](std::size_t node) { return values_[node]; }

  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

  std::vector<double> interior_values(const Grid& grid) const;
  void set_interior(const Grid& grid, std::span<const double> interior);

  /// Throws InvalidParameter if this field does not belong to `grid`.
  void check_grid(const Grid& grid) const;

  friend bool operator==(const ScalarField&, const ScalarField&) = default;

 private:
  std::uint64_t grid_id_ = 0;
  std::vector<double> values_;
};

/// Evaluates fn at every Interior and Boundary node.
ScalarField sample(const Grid& grid, const std::function<double(const Point&)>& fn);

/// Writes psi into the Boundary nodes of a box grid (no-op on curved grids,
/// whose Dirichlet data live on arm endpoints).
void apply_boundary(ScalarField& field, const Grid& grid, const BoundaryData& psi);

}  // namespace nlfp
