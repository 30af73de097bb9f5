#include "nlfp/field.hpp"

#include <string>

#include "nlfp/error.hpp"

namespace nlfp {

ScalarField::ScalarField(const Grid& grid, double fill)
    : grid_id_(grid.id()), values_(grid.node_count(), fill) {
  for (std::size_t node = 0; node < grid.node_count(); ++node) {
    if (grid.node_class(node) == NodeClass::Exterior) values_[node] = 0.0;
  }
}

ScalarField ScalarField::from_interior(const Grid& grid, std::span<const double> interior) {
  ScalarField f(grid, 0.0);
  f.set_interior(grid, interior);
  return f;
}

std::vector<double> ScalarField::interior_values(const Grid& grid) const {
  check_grid(grid);
  std::vector<double> out(grid.interior_count());
  const auto nodes = grid.interior_nodes();
  for (std::size_t i = 0; i < nodes.size(); ++i) out[i] = values_[nodes[i]];
  return out;
}

void ScalarField::set_interior(const Grid& grid, std::span<const double> interior) {
  check_grid(grid);
  if (interior.size() != grid.interior_count()) {
    throw InvalidParameter("interior vector has " + std::to_string(interior.size()) +
                           " entries, grid has " + std::to_string(grid.interior_count()));
  }
  const auto nodes = grid.interior_nodes();
  for (std::size_t i = 0; i < nodes.size(); ++i) values_[nodes[i]] = interior[i];
}

void ScalarField::check_grid(const Grid& grid) const {
  if (grid_id_ != grid.id() || values_.size() != grid.node_count()) {
    throw InvalidParameter("field does not belong to this grid");
  }
}

ScalarField sample(const Grid& grid, const std::function<double(const Point&)>& fn) {
  ScalarField f(grid, 0.0);
  for (std::size_t node = 0; node < grid.node_count(); ++node) {
    if (grid.node_class(node) != NodeClass::Exterior) f[node] = fn(grid.position(node));
  }
  return f;
}

void apply_boundary(ScalarField& field, const Grid& grid, const BoundaryData& psi) {
  field.check_grid(grid);
  for (std::size_t node = 0; node < grid.node_count(); ++node) {
    if (grid.node_class(node) == NodeClass::Boundary) field[node] = psi(grid.position(node));
  }
}

}  // namespace nlfp
