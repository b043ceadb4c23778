#include "star/terrain.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "star/errors.hpp"

namespace star {

TerrainGrid::TerrainGrid(int rows, int cols, double cell_size, std::vector<double> elevation,
                         double observer_eye_height)
    : rows_(rows), cols_(cols), cell_size_(cell_size), elevation_(std::move(elevation)) {
  if (rows < 1 || cols < 1) {
    throw StructuralError("terrain grid needs at least 1x1 cells, got " +
                          std::to_string(rows) + "x" + std::to_string(cols));
  }
  if (elevation_.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols)) {
    throw StructuralError("elevation has " + std::to_string(elevation_.size()) +
                          " values for a " + std::to_string(rows) + "x" +
                          std::to_string(cols) + " grid");
  }
  if (!(cell_size > 0.0) || !std::isfinite(cell_size)) {
    throw DomainError("cell size must be positive and finite");
  }
  for (double h : elevation_) {
    if (!std::isfinite(h)) throw DomainError("elevation must be finite at every cell");
  }
  set_eye_height(observer_eye_height);
  traversable_.assign(elevation_.size(), 1);
}

TerrainGrid TerrainGrid::flat(int rows, int cols, double cell_size) {
  return TerrainGrid(rows, cols, cell_size,
                     std::vector<double>(static_cast<std::size_t>(std::max(rows, 0)) *
                                             static_cast<std::size_t>(std::max(cols, 0)),
                                         0.0));
}

void TerrainGrid::set_eye_height(double meters) {
  if (!std::isfinite(meters) || meters < 0.0) {
    throw DomainError("observer eye height must be finite and non-negative");
  }
  eye_height_ = meters;
}

void TerrainGrid::set_elevation(Cell c, double meters) {
  if (!contains(c)) throw DomainError("set_elevation: cell out of bounds");
  if (!std::isfinite(meters)) throw DomainError("elevation must be finite");
  elevation_[static_cast<std::size_t>(index(c))] = meters;
}

void TerrainGrid::set_traversable(Cell c, bool value) {
  if (!contains(c)) throw DomainError("set_traversable: cell out of bounds");
  traversable_[static_cast<std::size_t>(index(c))] = value ? 1 : 0;
}

void TerrainGrid::set_traversable(const std::vector<std::uint8_t>& mask) {
  if (mask.size() != elevation_.size()) {
    throw StructuralError("traversability mask size does not match the grid");
  }
  for (std::size_t i = 0; i < mask.size(); ++i) traversable_[i] = mask[i] ? 1 : 0;
}

std::size_t TerrainGrid::traversable_count() const {
  return static_cast<std::size_t>(std::count(traversable_.begin(), traversable_.end(), 1));
}

double TerrainGrid::distance(CellIndex a, CellIndex b) const {
  const Cell ca = cell(a);
  const Cell cb = cell(b);
  return cell_size_ * std::hypot(static_cast<double>(ca.row - cb.row),
                                 static_cast<double>(ca.col - cb.col));
}

double ScalarField::max() const {
  return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
}

}  // namespace star
