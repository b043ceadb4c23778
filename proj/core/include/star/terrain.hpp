#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace star {

/// Row/column address of a grid cell. Row 0 is the north edge.
struct Cell {
  int row = 0;
  int col = 0;

  friend bool operator==(const Cell&, const Cell&) = default;
};

/// Flat row-major cell index in [0, M).
using CellIndex = std::int32_t;

/// 2.5-D heightmap. Every other module addresses cells through the flat
/// row-major index space defined here.
class TerrainGrid {
 public:
  TerrainGrid() = default;

  /// Throws StructuralError on bad dimensions, DomainError on non-finite
  /// heights or a non-positive cell size.
  TerrainGrid(int rows, int cols, double cell_size, std::vector<double> elevation,
              double observer_eye_height = 1.5);

  static TerrainGrid flat(int rows, int cols, double cell_size = 60.0);

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return elevation_.size(); }
  double cell_size() const noexcept { return cell_size_; }
  double eye_height() const noexcept { return eye_height_; }
  void set_eye_height(double meters);

  bool contains(Cell c) const noexcept {
    return c.row >= 0 && c.row < rows_ && c.col >= 0 && c.col < cols_;
  }
  bool contains(CellIndex i) const noexcept {
    return i >= 0 && static_cast<std::size_t>(i) < elevation_.size();
  }
  CellIndex index(Cell c) const noexcept { return c.row * cols_ + c.col; }
  Cell cell(CellIndex i) const noexcept { return {i / cols_, i % cols_}; }

  double elevation(CellIndex i) const { return elevation_[static_cast<std::size_t>(i)]; }
  double elevation(Cell c) const { return elevation(index(c)); }
  const std::vector<double>& elevations() const noexcept { return elevation_; }
  void set_elevation(Cell c, double meters);

  bool traversable(CellIndex i) const {
    return traversable_[static_cast<std::size_t>(i)] != 0;
  }
  bool traversable(Cell c) const { return traversable(index(c)); }
  void set_traversable(Cell c, bool value);
  /// Replaces the traversability overlay; must have size() entries.
  void set_traversable(const std::vector<std::uint8_t>& mask);
  std::size_t traversable_count() const;

  /// Center-to-center distance in meters.
  double distance(CellIndex a, CellIndex b) const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  double cell_size_ = 60.0;
  double eye_height_ = 1.5;
  std::vector<double> elevation_;
  std::vector<std::uint8_t> traversable_;
};

enum class FieldKind { kAverageVisibility, kRisk };

/// Per-cell non-negative scalar over all M cells.
struct ScalarField {
  FieldKind kind = FieldKind::kRisk;
  std::vector<double> values;

  double operator[](CellIndex i) const { return values[static_cast<std::size_t>(i)]; }
  std::size_t size() const noexcept { return values.size(); }
  double max() const;
};

}  // namespace star
