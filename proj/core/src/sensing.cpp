#include "star/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "star/errors.hpp"

namespace star {
namespace {

constexpr std::array<std::string_view, 8> kHeadingNames = {"N", "NE", "E", "SE",
                                                           "S", "SW", "W", "NW"};

// (d_row, d_col) of one step along each heading.
constexpr std::array<std::array<int, 2>, 8> kHeadingStep = {
    {{-1, 0}, {-1, 1}, {0, 1}, {1, 1}, {1, 0}, {1, -1}, {0, -1}, {-1, -1}}};

constexpr int kFootprintRings = 3;
constexpr double kSensorWidthDeg = 90.0;

}  // namespace

double heading_degrees(Heading h) { return 45.0 * static_cast<double>(h); }

std::string_view heading_name(Heading h) { return kHeadingNames[static_cast<std::size_t>(h)]; }

Heading parse_heading(std::string_view name) {
  for (std::size_t i = 0; i < kHeadingNames.size(); ++i) {
    if (kHeadingNames[i] == name) return static_cast<Heading>(i);
  }
  throw DomainError("unknown heading '" + std::string(name) + "'");
}

double noise_stddev(double distance, double visibility, double base_sigma,
                    double distance_scale, double cell_size) {
  if (!(visibility > 0.0) || visibility > 1.0) {
    throw DomainError("visibility must lie in (0, 1]");
  }
  if (!(distance >= 0.0)) throw DomainError("distance must be non-negative");
  const double cells = distance / cell_size;
  return base_sigma * (1.0 + distance_scale * cells * cells) / (visibility * visibility);
}

double NoiseModel::stddev(const SensingRow& row) const {
  return noise_stddev(row.distance, row.visibility, base_sigma, distance_scale, cell_size);
}

GroundTruth make_ground_truth(const TerrainGrid& grid, std::vector<CellIndex> targets,
                              const ViewLimits& limits) {
  GroundTruth truth;
  truth.beta.assign(grid.size(), 0);
  for (CellIndex t : targets) {
    if (!grid.contains(t)) throw DomainError("target cell out of bounds");
    if (!grid.traversable(t)) throw DomainError("target cell must be traversable");
    if (truth.beta[static_cast<std::size_t>(t)]) throw DomainError("duplicate target cell");
    truth.beta[static_cast<std::size_t>(t)] = 1;
    truth.target_views.push_back(binary_viewshed(grid, t, limits));
  }
  truth.targets = std::move(targets);
  return truth;
}

std::vector<Cell> trapezoid_footprint(const TerrainGrid& grid, const Pose& pose) {
  if (!grid.contains(pose.cell)) throw DomainError("pose cell out of bounds");
  const Cell o = grid.cell(pose.cell);
  const auto [fr, fc] = kHeadingStep[static_cast<std::size_t>(pose.heading)];
  std::vector<Cell> cells;
  for (int k = 1; k <= kFootprintRings; ++k) {
    if (fr == 0 || fc == 0) {
      // Cardinal: a row of 2k+1 cells perpendicular to the bearing.
      const int lr = fc;
      const int lc = -fr;
      for (int j = -k; j <= k; ++j) {
        cells.push_back({o.row + fr * k + lr * j, o.col + fc * k + lc * j});
      }
    } else {
      // Diagonal: the 2k+1 cells of Chebyshev ring k inside the quadrant.
      for (int j = 0; j <= k; ++j) cells.push_back({o.row + fr * k, o.col + fc * j});
      for (int i = 0; i < k; ++i) cells.push_back({o.row + fr * i, o.col + fc * k});
    }
  }
  std::erase_if(cells, [&](const Cell& c) { return !grid.contains(c); });
  return cells;
}

SensingAction robot_sensing_action(const TerrainGrid& grid, const Pose& pose,
                                   const ViewLimits& limits) {
  if (!grid.contains(pose.cell)) throw DomainError("pose cell out of bounds");
  if (!grid.traversable(pose.cell)) throw DomainError("pose cell is not traversable");
  const auto footprint = trapezoid_footprint(grid, pose);
  const auto mask = viewshed(grid, pose.cell,
                             FieldOfView::sector(heading_degrees(pose.heading), kSensorWidthDeg),
                             limits);
  SensingAction action;
  action.pose = pose;
  for (const Cell& c : footprint) {
    const CellIndex i = grid.index(c);
    if (const auto f = mask.fraction(i)) {
      action.rows.push_back({i, *f, grid.distance(pose.cell, i)});
    }
  }
  return action;
}

SensingAction target_sensing_action(const TerrainGrid& grid, CellIndex cell,
                                    const ViewLimits& limits) {
  const auto mask = binary_viewshed(grid, cell, limits);
  SensingAction action;
  action.pose = {cell, Heading::kN};
  for (const auto& e : mask.entries) {
    action.rows.push_back({e.cell, e.fraction, grid.distance(cell, e.cell)});
  }
  return action;
}

double clipped_measurement(bool target, double perturbation) {
  const double raw = target ? 1.0 - perturbation : perturbation;
  return std::clamp(raw, 0.0, 1.0);
}

Observation simulate_observation(const GroundTruth& truth, const SensingAction& action,
                                 const NoiseModel& noise, std::mt19937_64& rng) {
  Observation obs;
  obs.action = action;
  obs.y.reserve(action.size());
  obs.noise_variance.reserve(action.size());
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (const auto& row : action.rows) {
    const double sigma = noise.stddev(row);
    const double b = std::abs(gauss(rng)) * sigma;
    obs.y.push_back(clipped_measurement(truth.is_target(row.cell), b));
    obs.noise_variance.push_back(sigma * sigma);
  }
  return obs;
}

ActionTable::ActionTable(const TerrainGrid& grid, const ViewLimits& limits) {
  actions_.resize(grid.size() * 8);
  for (CellIndex i = 0; i < static_cast<CellIndex>(grid.size()); ++i) {
    if (!grid.traversable(i)) continue;
    for (Heading h : kAllHeadings) {
      actions_[static_cast<std::size_t>(i) * 8 + static_cast<std::size_t>(h)] =
          robot_sensing_action(grid, {i, h}, limits);
    }
  }
}

}  // namespace star
