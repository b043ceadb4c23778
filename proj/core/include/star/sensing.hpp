#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "star/terrain.hpp"
#include "star/viewshed.hpp"

namespace star {

/// The eight compass bearings a robot can face.
enum class Heading : std::uint8_t { kN, kNE, kE, kSE, kS, kSW, kW, kNW };

inline constexpr std::array<Heading, 8> kAllHeadings = {
    Heading::kN, Heading::kNE, Heading::kE, Heading::kSE,
    Heading::kS, Heading::kSW, Heading::kW, Heading::kNW};

double heading_degrees(Heading h);
std::string_view heading_name(Heading h);
/// Accepts the compass names ("N", "NE", ...). Throws DomainError otherwise.
Heading parse_heading(std::string_view name);

struct Pose {
  CellIndex cell = 0;
  Heading heading = Heading::kN;

  friend bool operator==(const Pose&, const Pose&) = default;
};

/// One one-hot row of a sensing matrix.
struct SensingRow {
  CellIndex cell = 0;
  double visibility = 1.0;  // fractional visibility in (0, 1]
  double distance = 0.0;    // observer-to-cell, meters
};

/// A sensing matrix as an ordered set of distinct cells, plus the pose that
/// produced it. Rows with zero visibility never appear.
struct SensingAction {
  Pose pose;
  std::vector<SensingRow> rows;

  std::size_t size() const noexcept { return rows.size(); }
};

/// Terrain-aware noise. The per-row standard deviation folds the squared
/// distance growth and the inverse-square visibility scaling together.
struct NoiseModel {
  double base_sigma = 0.1;
  double distance_scale = 0.05;
  double cell_size = 60.0;

  double stddev(const SensingRow& row) const;
  double variance(const SensingRow& row) const {
    const double s = stddev(row);
    return s * s;
  }
};

/// sigma = base_sigma * (1 + distance_scale * (distance / cell_size)^2) / visibility^2.
/// Throws DomainError for visibility outside (0, 1] or a negative distance.
double noise_stddev(double distance, double visibility, double base_sigma,
                    double distance_scale, double cell_size = 60.0);

/// Noisy clipped measurement of the rows of `action`.
struct Observation {
  SensingAction action;
  std::vector<double> y;
  std::vector<double> noise_variance;
  int source_agent = 0;
};

/// True target layout and each target's binarized viewshed.
struct GroundTruth {
  std::vector<std::uint8_t> beta;
  std::vector<CellIndex> targets;
  std::vector<VisibilityMask> target_views;

  std::size_t target_count() const noexcept { return targets.size(); }
  bool is_target(CellIndex i) const { return beta[static_cast<std::size_t>(i)] != 0; }
};

/// Throws DomainError for duplicate, out-of-bounds or non-traversable targets.
GroundTruth make_ground_truth(const TerrainGrid& grid, std::vector<CellIndex> targets,
                              const ViewLimits& limits = {});

/// Footprint offsets before clipping: rings at 1, 2 and 3 cells along the
/// bearing, 3, 5 and 7 cells wide (15 in total).
std::vector<Cell> trapezoid_footprint(const TerrainGrid& grid, const Pose& pose);

/// Footprint intersected with the 90-degree sector viewshed of the pose.
SensingAction robot_sensing_action(const TerrainGrid& grid, const Pose& pose,
                                   const ViewLimits& limits = {});

/// Omni, binarized viewshed of a target at `cell`.
SensingAction target_sensing_action(const TerrainGrid& grid, CellIndex cell,
                                    const ViewLimits& limits = {});

/// One measurement: clip(b) on empty cells, clip(1 - b) on target cells.
double clipped_measurement(bool target, double perturbation);

/// Draws a positive half-Gaussian perturbation per row from `rng`.
Observation simulate_observation(const GroundTruth& truth, const SensingAction& action,
                                 const NoiseModel& noise, std::mt19937_64& rng);

/// Robot actions for every traversable cell and heading, built once per map.
class ActionTable {
 public:
  ActionTable() = default;
  ActionTable(const TerrainGrid& grid, const ViewLimits& limits);

  const SensingAction& at(CellIndex cell, Heading h) const {
    return actions_[static_cast<std::size_t>(cell) * 8 + static_cast<std::size_t>(h)];
  }
  std::size_t cell_count() const noexcept { return actions_.size() / 8; }

 private:
  std::vector<SensingAction> actions_;
};

}  // namespace star
