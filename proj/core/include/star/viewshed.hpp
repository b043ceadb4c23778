#pragma once

#include <array>
#include <optional>
#include <vector>

#include "star/terrain.hpp"

namespace star {

/// Field of view. Bearings are compass degrees, clockwise from north.
struct FieldOfView {
  bool omni = true;
  double heading_deg = 0.0;
  double width_deg = 360.0;

  static FieldOfView omnidirectional() { return {}; }
  static FieldOfView sector(double heading_deg, double width_deg) {
    return {false, heading_deg, width_deg};
  }
};

struct ViewLimits {
  double range_min = 0.0;
  double range_max = 300.0;
};

struct VisibleCell {
  CellIndex cell = 0;
  double fraction = 0.0;

  friend bool operator==(const VisibleCell&, const VisibleCell&) = default;
};

/// Cells seen from one origin, sorted by cell index. Only fractions in (0, 1]
/// are stored.
struct VisibilityMask {
  CellIndex origin = 0;
  FieldOfView fov;
  ViewLimits limits;
  std::vector<VisibleCell> entries;

  std::optional<double> fraction(CellIndex cell) const;
};

/// Ground-level sample points of a cell in grid units (x = column, y = row):
/// center followed by the four edge midpoints.
std::array<std::array<double, 2>, 5> cell_sample_points(Cell c);

/// Exact segment test against block terrain. Endpoints are in grid units
/// (x = column, y = row) with heights in meters. Every cell the segment
/// crosses over a positive length is an occluder candidate, the endpoint
/// cells included.
bool line_of_sight(const TerrainGrid& grid, double x0, double y0, double z0, double x1,
                   double y1, double z1);

/// Fraction of the five sample points of `target` visible from the observer's
/// eye over `origin`. A cell sees itself with fraction 1.
double visible_fraction(const TerrainGrid& grid, CellIndex origin, CellIndex target);

/// Ray-cast viewshed. Throws DomainError if the origin is outside the grid or
/// the limits are invalid.
VisibilityMask viewshed(const TerrainGrid& grid, CellIndex origin, const FieldOfView& fov,
                        const ViewLimits& limits);

/// Omnidirectional viewshed with fractions binarized at 0.5 (kept cells carry
/// fraction 1). This is the target sensing model.
VisibilityMask binary_viewshed(const TerrainGrid& grid, CellIndex origin,
                               const ViewLimits& limits);

/// Binarized omni viewsheds for every cell, built once and shared read-only.
class ViewshedTable {
 public:
  ViewshedTable() = default;
  ViewshedTable(const TerrainGrid& grid, const ViewLimits& limits);

  std::size_t size() const noexcept { return seen_.size(); }
  /// Cells that `observer` sees (sorted).
  const std::vector<CellIndex>& seen_from(CellIndex observer) const {
    return seen_[static_cast<std::size_t>(observer)];
  }

 private:
  std::vector<std::vector<CellIndex>> seen_;
};

/// Value at c: mean over all observers o of visible_fraction(o, c) under omni
/// viewsheds limited to `limits`. Values lie in [0, 1].
ScalarField average_visibility_map(const TerrainGrid& grid, const ViewLimits& limits);

/// Value at l: sum over cells i of weights[i] * [i sees l] with the binarized
/// target model. Throws DomainError on a wrong size or a negative weight.
ScalarField risk_landscape(const ViewshedTable& views, const std::vector<double>& weights);
ScalarField risk_landscape(const TerrainGrid& grid, const std::vector<double>& weights,
                           const ViewLimits& limits = {});

}  // namespace star
