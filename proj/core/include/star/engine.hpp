#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "star/belief.hpp"
#include "star/planner.hpp"
#include "star/policy.hpp"
#include "star/sensing.hpp"
#include "star/terrain.hpp"
#include "star/viewshed.hpp"

namespace star {

enum class Placement { kUniform, kAdversarial };

std::string placement_name(Placement p);
/// Throws ConfigError on an unknown name.
Placement parse_placement(const std::string& name);

/// Communication model between agents.
struct Comms {
  enum class Kind { kFull, kNone, kDrop };
  Kind kind = Kind::kFull;
  double drop_probability = 0.0;

  static Comms full() { return {}; }
  static Comms none() { return {Kind::kNone, 1.0}; }
  static Comms drop(double p) { return {Kind::kDrop, p}; }

  /// "full", "none" or "drop:<p>". Throws ConfigError otherwise.
  static Comms parse(const std::string& text);
  std::string name() const;

  friend bool operator==(const Comms&, const Comms&) = default;
};

struct MissionConfig {
  int agents = 2;
  int targets = 5;
  Placement placement = Placement::kUniform;
  Comms comms;
  PolicyParams policy;
  int budget = 60;
  std::uint64_t seed = 0;
  Cell start{0, 0};
  NoiseModel noise;
  Hyperparameters hyper;
  EmOptions em;
  ViewLimits limits;
  double found_threshold = 0.5;
  /// Planning cost of a cell at full (max-normalized) believed risk, in steps.
  double risk_weight = 5.0;
  int candidate_stride = 1;
  /// Id of the first agent. Random streams are keyed by id, so a lone agent
  /// with the same id replays the decisions it makes inside a team.
  int first_agent_id = 0;

  /// Throws ConfigError on violated invariants.
  void validate() const;
};

/// Per-map precomputation shared read-only by every mission on that map.
struct World {
  World(TerrainGrid grid, const ViewLimits& limits);

  TerrainGrid grid;
  ViewLimits limits;
  ViewshedTable target_views;
  ActionTable actions;
  ScalarField average_visibility;
};

/// Uniform: K distinct traversable cells. Adversarial: K distinct cells from
/// those below the median average visibility, weighted by (median - value).
/// Falls back to uniform over cells at or below the median when the weights
/// vanish. Throws ConfigError when too few cells are eligible.
GroundTruth place_targets(const World& world, int count, Placement mode, std::mt19937_64& rng);

struct AgentState {
  int id = 0;
  CellIndex cell = 0;
  Heading heading = Heading::kN;
  Dataset data;
  Eigen::VectorXd gamma;
  std::vector<int> visits;
  std::vector<Observation> outbox;
  std::mt19937_64 decision_rng;
  std::mt19937_64 sensor_rng;
  double ready_time = 0.0;
  double penalty = 0.0;
};

struct DeliveryStats {
  std::size_t attempted = 0;
  std::size_t delivered = 0;
};

/// Moves every outbox message to the other agents' datasets per the comms
/// model and clears the outboxes.
DeliveryStats deliver_messages(std::vector<AgentState>& agents, const Comms& comms,
                               std::mt19937_64& rng);

struct DecisionRow {
  int step = 0;
  int agent = 0;
  CellIndex goal = 0;
  int goal_row = 0;
  int goal_col = 0;
  Heading heading = Heading::kN;
  double raw_reward = 0.0;
  double raw_penalty = 0.0;
  int targets_found = 0;
  double cum_true_penalty = 0.0;
  int path_steps = 0;
  double agent_penalty = 0.0;
  std::vector<CellIndex> sensed;
  std::vector<double> measurements;
};

struct RecoveryEvent {
  int step = 0;
  int agent = 0;
  CellIndex cell = 0;
};

struct RunRecord {
  std::vector<DecisionRow> rows;
  std::vector<RecoveryEvent> recoveries;
  std::vector<CellIndex> target_cells;
  std::vector<double> agent_penalties;
  int targets = 0;
  int targets_found = 0;
  double initial_penalty = 0.0;
  double final_penalty = 0.0;
  int decisions() const noexcept { return static_cast<int>(rows.size()); }
};

/// Runs the asynchronous mission loop until the decision budget is spent or
/// every target is found.
RunRecord run_mission(const World& world, const MissionConfig& config);
RunRecord run_mission(const TerrainGrid& grid, const MissionConfig& config);

struct CurvePoint {
  int step = 0;
  double recovery = 0.0;
  double penalty = 0.0;
};

/// Recovery (F/K) and cumulative penalty after each decision. With
/// length > rows, the last values carry forward.
std::vector<CurvePoint> metric_curves(const RunRecord& record, int targets, int length = 0);

/// Independent stream for (seed, agent id, purpose).
std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t id, std::uint64_t purpose);

}  // namespace star
