#include "star/viewshed.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "star/errors.hpp"

namespace star {
namespace {

constexpr double kHeightTolerance = 1e-9;
constexpr double kRangeTolerance = 1e-9;
constexpr double kAngleTolerance = 1e-9;

// Parameters in (0, 1) at which x + t*dx crosses an integer.
void push_crossings(double start, double delta, std::vector<double>& ts) {
  if (delta == 0.0) return;
  const double end = start + delta;
  const double lo = std::min(start, end);
  const double hi = std::max(start, end);
  for (double k = std::floor(lo) + 1.0; k < hi; k += 1.0) {
    const double t = (k - start) / delta;
    if (t > 0.0 && t < 1.0) ts.push_back(t);
  }
}

double bearing_deg(Cell from, Cell to) {
  const double east = static_cast<double>(to.col - from.col);
  const double north = static_cast<double>(from.row - to.row);
  double deg = std::atan2(east, north) * 180.0 / std::numbers::pi;
  if (deg < 0.0) deg += 360.0;
  return deg;
}

bool in_sector(const FieldOfView& fov, Cell from, Cell to) {
  if (fov.omni || fov.width_deg >= 360.0) return true;
  double diff = std::fmod(bearing_deg(from, to) - fov.heading_deg, 360.0);
  if (diff > 180.0) diff -= 360.0;
  if (diff < -180.0) diff += 360.0;
  return std::abs(diff) <= fov.width_deg / 2.0 + kAngleTolerance;
}

void check_limits(const ViewLimits& limits) {
  if (!(limits.range_min >= 0.0) || !(limits.range_max > limits.range_min)) {
    throw DomainError("view limits need 0 <= range_min < range_max");
  }
}

}  // namespace

std::optional<double> VisibilityMask::fraction(CellIndex cell) const {
  const auto it = std::lower_bound(
      entries.begin(), entries.end(), cell,
      [](const VisibleCell& e, CellIndex c) { return e.cell < c; });
  if (it == entries.end() || it->cell != cell) return std::nullopt;
  return it->fraction;
}

std::array<std::array<double, 2>, 5> cell_sample_points(Cell c) {
  const double x = static_cast<double>(c.col);
  const double y = static_cast<double>(c.row);
  return {{{x + 0.5, y + 0.5},
           {x + 0.5, y},
           {x + 1.0, y + 0.5},
           {x + 0.5, y + 1.0},
           {x, y + 0.5}}};
}

bool line_of_sight(const TerrainGrid& grid, double x0, double y0, double z0, double x1,
                   double y1, double z1) {
  const double dx = x1 - x0;
  const double dy = y1 - y0;
  const double dz = z1 - z0;
  thread_local std::vector<double> ts;
  ts.clear();
  ts.push_back(0.0);
  push_crossings(x0, dx, ts);
  push_crossings(y0, dy, ts);
  ts.push_back(1.0);
  std::sort(ts.begin(), ts.end());

  for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
    const double ta = ts[k];
    const double tb = ts[k + 1];
    if (tb - ta <= 1e-12) continue;
    const double tm = 0.5 * (ta + tb);
    const Cell c{static_cast<int>(std::floor(y0 + tm * dy)),
                 static_cast<int>(std::floor(x0 + tm * dx))};
    if (!grid.contains(c)) continue;
    // The ray is linear inside the cell, so its lowest point is at an end.
    const double lowest = std::min(z0 + ta * dz, z0 + tb * dz);
    if (grid.elevation(c) > lowest + kHeightTolerance) return false;
  }
  return true;
}

double visible_fraction(const TerrainGrid& grid, CellIndex origin, CellIndex target) {
  if (origin == target) return 1.0;
  const Cell o = grid.cell(origin);
  const Cell t = grid.cell(target);
  const double ox = o.col + 0.5;
  const double oy = o.row + 0.5;
  const double oz = grid.elevation(origin) + grid.eye_height();
  const double tz = grid.elevation(target);
  int visible = 0;
  for (const auto& p : cell_sample_points(t)) {
    if (line_of_sight(grid, ox, oy, oz, p[0], p[1], tz)) ++visible;
  }
  return static_cast<double>(visible) / 5.0;
}

VisibilityMask viewshed(const TerrainGrid& grid, CellIndex origin, const FieldOfView& fov,
                        const ViewLimits& limits) {
  if (!grid.contains(origin)) throw DomainError("viewshed origin out of bounds");
  check_limits(limits);

  VisibilityMask mask;
  mask.origin = origin;
  mask.fov = fov;
  mask.limits = limits;

  const Cell o = grid.cell(origin);
  const int reach = static_cast<int>(std::floor(limits.range_max / grid.cell_size() + 1e-9));
  for (int r = std::max(0, o.row - reach); r <= std::min(grid.rows() - 1, o.row + reach); ++r) {
    for (int c = std::max(0, o.col - reach); c <= std::min(grid.cols() - 1, o.col + reach);
         ++c) {
      const Cell t{r, c};
      const CellIndex ti = grid.index(t);
      if (ti == origin) {
        mask.entries.push_back({ti, 1.0});
        continue;
      }
      const double d = grid.distance(origin, ti);
      if (d < limits.range_min - kRangeTolerance || d > limits.range_max + kRangeTolerance) {
        continue;
      }
      if (!in_sector(fov, o, t)) continue;
      const double f = visible_fraction(grid, origin, ti);
      if (f > 0.0) mask.entries.push_back({ti, f});
    }
  }
  return mask;
}

VisibilityMask binary_viewshed(const TerrainGrid& grid, CellIndex origin,
                               const ViewLimits& limits) {
  VisibilityMask mask = viewshed(grid, origin, FieldOfView::omnidirectional(), limits);
  std::erase_if(mask.entries, [](const VisibleCell& e) { return e.fraction < 0.5; });
  for (auto& e : mask.entries) e.fraction = 1.0;
  return mask;
}

ViewshedTable::ViewshedTable(const TerrainGrid& grid, const ViewLimits& limits) {
  seen_.resize(grid.size());
  for (CellIndex i = 0; i < static_cast<CellIndex>(grid.size()); ++i) {
    const auto mask = binary_viewshed(grid, i, limits);
    auto& cells = seen_[static_cast<std::size_t>(i)];
    cells.reserve(mask.entries.size());
    for (const auto& e : mask.entries) cells.push_back(e.cell);
  }
}

ScalarField average_visibility_map(const TerrainGrid& grid, const ViewLimits& limits) {
  ScalarField field{FieldKind::kAverageVisibility, std::vector<double>(grid.size(), 0.0)};
  for (CellIndex o = 0; o < static_cast<CellIndex>(grid.size()); ++o) {
    const auto mask = viewshed(grid, o, FieldOfView::omnidirectional(), limits);
    for (const auto& e : mask.entries) field.values[static_cast<std::size_t>(e.cell)] += e.fraction;
  }
  const double n = static_cast<double>(grid.size());
  for (double& v : field.values) v /= n;
  return field;
}

ScalarField risk_landscape(const ViewshedTable& views, const std::vector<double>& weights) {
  if (weights.size() != views.size()) {
    throw DomainError("risk weights must have one entry per cell");
  }
  ScalarField field{FieldKind::kRisk, std::vector<double>(weights.size(), 0.0)};
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] >= 0.0) || !std::isfinite(weights[i])) {
      throw DomainError("risk weight at cell " + std::to_string(i) +
                        " must be finite and non-negative");
    }
    if (weights[i] == 0.0) continue;
    for (CellIndex l : views.seen_from(static_cast<CellIndex>(i))) {
      field.values[static_cast<std::size_t>(l)] += weights[i];
    }
  }
  return field;
}

ScalarField risk_landscape(const TerrainGrid& grid, const std::vector<double>& weights,
                           const ViewLimits& limits) {
  return risk_landscape(ViewshedTable(grid, limits), weights);
}

}  // namespace star
