#include "star/engine.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>
#include <tuple>

#include "star/errors.hpp"

namespace star {
namespace {

enum StreamPurpose : std::uint64_t {
  kDecisionStream = 1,
  kSensorStream = 2,
  kPlacementStream = 3,
  kCommsStream = 4,
};

std::vector<CellIndex> draw_uniform(const std::vector<CellIndex>& pool, int count,
                                    std::mt19937_64& rng) {
  std::vector<CellIndex> remaining = pool;
  std::vector<CellIndex> out;
  for (int k = 0; k < count; ++k) {
    std::uniform_int_distribution<std::size_t> pick(0, remaining.size() - 1);
    const std::size_t i = pick(rng);
    out.push_back(remaining[i]);
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(i));
  }
  return out;
}

std::vector<CellIndex> draw_weighted(std::vector<CellIndex> pool, std::vector<double> weights,
                                     int count, std::mt19937_64& rng) {
  std::vector<CellIndex> out;
  for (int k = 0; k < count; ++k) {
    std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
    const std::size_t i = pick(rng);
    out.push_back(pool[i]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(i));
    weights.erase(weights.begin() + static_cast<std::ptrdiff_t>(i));
  }
  return out;
}

double median(std::vector<double> values) {
  const std::size_t n = values.size();
  std::sort(values.begin(), values.end());
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace

std::string placement_name(Placement p) {
  return p == Placement::kUniform ? "uniform" : "adversarial";
}

Placement parse_placement(const std::string& name) {
  if (name == "uniform") return Placement::kUniform;
  if (name == "adversarial") return Placement::kAdversarial;
  throw ConfigError("unknown placement '" + name + "' (expected uniform or adversarial)");
}

Comms Comms::parse(const std::string& text) {
  if (text == "full") return full();
  if (text == "none") return none();
  if (text.rfind("drop:", 0) == 0) {
    const std::string num = text.substr(5);
    char* end = nullptr;
    const double p = std::strtod(num.c_str(), &end);
    if (num.empty() || end != num.c_str() + num.size() || !(p >= 0.0 && p <= 1.0)) {
      throw ConfigError("comms drop probability must be a number in [0, 1]: '" + text + "'");
    }
    return drop(p);
  }
  throw ConfigError("unknown comms mode '" + text + "' (expected full, none or drop:<p>)");
}

std::string Comms::name() const {
  switch (kind) {
    case Kind::kFull:
      return "full";
    case Kind::kNone:
      return "none";
    case Kind::kDrop: {
      std::string p = std::to_string(drop_probability);
      p.erase(p.find_last_not_of('0') + 1);
      if (!p.empty() && p.back() == '.') p.pop_back();
      return "drop:" + p;
    }
  }
  return "full";
}

void MissionConfig::validate() const {
  if (agents < 1) throw ConfigError("agents must be >= 1");
  if (targets < 1) throw ConfigError("targets must be >= 1");
  if (budget < 0) throw ConfigError("budget must be >= 0");
  if (comms.kind == Comms::Kind::kDrop &&
      !(comms.drop_probability >= 0.0 && comms.drop_probability <= 1.0)) {
    throw ConfigError("comms drop probability must lie in [0, 1]");
  }
  if (!(found_threshold > 0.0)) throw ConfigError("found_threshold must be > 0");
  if (!(risk_weight >= 0.0)) throw ConfigError("risk_weight must be >= 0");
  if (candidate_stride < 1) throw ConfigError("candidate_stride must be >= 1");
  if (!(noise.base_sigma > 0.0)) throw ConfigError("noise base_sigma must be > 0");
  if (!(noise.distance_scale >= 0.0)) throw ConfigError("noise distance_scale must be >= 0");
  if (!(hyper.a >= 0.0) || !(hyper.b > 0.0)) {
    throw ConfigError("hyperparameters need a >= 0 and b > 0");
  }
  if (em.max_iter < 1 || !(em.tol > 0.0)) throw ConfigError("EM needs max_iter >= 1, tol > 0");
  try {
    policy.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
}

World::World(TerrainGrid g, const ViewLimits& view_limits)
    : grid(std::move(g)),
      limits(view_limits),
      target_views(grid, limits),
      actions(grid, limits),
      average_visibility(average_visibility_map(grid, limits)) {}

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t id, std::uint64_t purpose) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(id), static_cast<std::uint32_t>(purpose)};
  return std::mt19937_64(seq);
}

GroundTruth place_targets(const World& world, int count, Placement mode, std::mt19937_64& rng) {
  const auto& grid = world.grid;
  if (count < 1) throw ConfigError("target count must be >= 1");
  std::vector<CellIndex> open;
  for (CellIndex i = 0; i < static_cast<CellIndex>(grid.size()); ++i) {
    if (grid.traversable(i)) open.push_back(i);
  }
  if (open.size() < static_cast<std::size_t>(count)) {
    throw ConfigError("cannot place " + std::to_string(count) + " targets on " +
                      std::to_string(open.size()) + " traversable cells");
  }

  std::vector<CellIndex> chosen;
  if (mode == Placement::kUniform) {
    chosen = draw_uniform(open, count, rng);
  } else {
    std::vector<double> vis;
    for (CellIndex i : open) vis.push_back(world.average_visibility[i]);
    const double med = median(vis);
    std::vector<CellIndex> below;
    std::vector<double> weights;
    std::vector<CellIndex> at_or_below;
    for (std::size_t k = 0; k < open.size(); ++k) {
      if (vis[k] <= med) at_or_below.push_back(open[k]);
      if (vis[k] < med) {
        below.push_back(open[k]);
        weights.push_back(med - vis[k]);
      }
    }
    if (below.size() >= static_cast<std::size_t>(count)) {
      chosen = draw_weighted(std::move(below), std::move(weights), count, rng);
    } else if (at_or_below.size() >= static_cast<std::size_t>(count)) {
      chosen = draw_uniform(at_or_below, count, rng);
    } else {
      throw ConfigError("too few low-visibility cells for " + std::to_string(count) +
                        " adversarial targets");
    }
  }
  std::sort(chosen.begin(), chosen.end());
  return make_ground_truth(grid, std::move(chosen), world.limits);
}

DeliveryStats deliver_messages(std::vector<AgentState>& agents, const Comms& comms,
                               std::mt19937_64& rng) {
  DeliveryStats stats;
  std::bernoulli_distribution keep(comms.kind == Comms::Kind::kDrop ? 1.0 - comms.drop_probability
                                                                    : 1.0);
  for (std::size_t s = 0; s < agents.size(); ++s) {
    auto outbox = std::move(agents[s].outbox);
    agents[s].outbox.clear();
    for (const auto& msg : outbox) {
      for (std::size_t r = 0; r < agents.size(); ++r) {
        if (r == s) continue;
        ++stats.attempted;
        bool delivered = false;
        switch (comms.kind) {
          case Comms::Kind::kFull:
            delivered = true;
            break;
          case Comms::Kind::kNone:
            delivered = false;
            break;
          case Comms::Kind::kDrop:
            delivered = keep(rng);
            break;
        }
        if (delivered) {
          agents[r].data.append(msg);
          ++stats.delivered;
        }
      }
    }
  }
  return stats;
}

RunRecord run_mission(const TerrainGrid& grid, const MissionConfig& config) {
  config.validate();
  return run_mission(World(grid, config.limits), config);
}

RunRecord run_mission(const World& world, const MissionConfig& config) {
  config.validate();
  const auto& grid = world.grid;
  if (!grid.contains(config.start) || !grid.traversable(config.start)) {
    throw ConfigError("start cell must be inside the grid and traversable");
  }
  const CellIndex start = grid.index(config.start);
  const auto cells = grid.size();

  NoiseModel noise = config.noise;
  noise.cell_size = grid.cell_size();

  auto placement_rng = make_stream(config.seed, 0, kPlacementStream);
  const GroundTruth truth = place_targets(world, config.targets, config.placement, placement_rng);
  auto comms_rng = make_stream(config.seed, 0, kCommsStream);

  RunRecord record;
  record.targets = config.targets;
  record.target_cells = truth.targets;

  std::vector<AgentState> agents;
  agents.reserve(static_cast<std::size_t>(config.agents));
  double team_penalty = 0.0;
  for (int k = 0; k < config.agents; ++k) {
    const int id = config.first_agent_id + k;
    AgentState a;
    a.id = id;
    a.cell = start;
    a.data = Dataset(cells, id);
    a.gamma = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(cells));
    a.visits.assign(cells, 0);
    a.visits[static_cast<std::size_t>(start)] = 1;
    a.decision_rng = make_stream(config.seed, static_cast<std::uint64_t>(id), kDecisionStream);
    a.sensor_rng = make_stream(config.seed, static_cast<std::uint64_t>(id), kSensorStream);
    a.penalty = true_stealth_penalty(a.visits, truth);
    team_penalty += a.penalty;
    agents.push_back(std::move(a));
  }
  record.initial_penalty = team_penalty;

  // Next-free agent: earliest ready time, then lowest id.
  using Slot = std::tuple<double, int, std::size_t>;
  std::priority_queue<Slot, std::vector<Slot>, std::greater<>> queue;
  for (std::size_t k = 0; k < agents.size(); ++k) queue.emplace(0.0, agents[k].id, k);

  std::vector<std::uint8_t> found(cells, 0);
  int found_count = 0;
  const auto kind = config.policy.kind;

  for (int step = 1; step <= config.budget && found_count < config.targets; ++step) {
    const auto [time, id, slot] = queue.top();
    queue.pop();
    AgentState& agent = agents[slot];

    const Posterior post = fit_posterior(agent.data, agent.gamma, config.em, config.hyper);
    agent.gamma = post.gamma;
    const Eigen::VectorXd mu_vis = visibility_mean(post);
    const ScalarField risk = risk_landscape(
        world.target_views, std::vector<double>(mu_vis.data(), mu_vis.data() + mu_vis.size()));

    const auto reach = bfs_distances(grid, agent.cell);
    std::vector<std::uint8_t> reachable(cells, 0);
    std::vector<double> goal_distance(cells, 0.0);
    for (std::size_t c = 0; c < cells; ++c) {
      reachable[c] = reach[c] >= 0 ? 1 : 0;
      goal_distance[c] = static_cast<double>(reach[c]);
    }
    const CandidateSet candidates =
        build_candidates(grid, world.actions, config.candidate_stride, &reachable);
    if (candidates.empty()) {
      throw ConfigError("no reachable candidate goals from the agent's cell");
    }

    Selection sel;
    switch (kind) {
      case PolicyKind::kStar:
        sel = select_action_star(post, candidates, config.policy, risk, noise, agent.decision_rng);
        break;
      case PolicyKind::kGuts:
        sel = select_action_guts(post, candidates, config.policy, risk, noise, agent.decision_rng);
        break;
      case PolicyKind::kRsi:
        sel = select_action_rsi(post, candidates, noise);
        break;
      case PolicyKind::kCoverage:
        sel = select_action_coverage(agent.data.sensed(), candidates, goal_distance);
        break;
      case PolicyKind::kRandom:
        sel = select_action_random(candidates, agent.decision_rng);
        break;
    }
    const Candidate& chosen = candidates[sel.index];
    if (kind != PolicyKind::kStar && kind != PolicyKind::kGuts) {
      sel.raw_penalty = stealth_penalty(chosen.goal, risk);
    }

    // Only STAR plans against believed risk; the baselines take shortest paths.
    ScalarField planning_risk = risk;
    const double peak = risk.max();
    if (peak > 0.0) {
      for (double& v : planning_risk.values) v /= peak;
    }
    const double weight = kind == PolicyKind::kStar ? config.risk_weight : 0.0;
    const Path path = plan_path(grid, planning_risk, agent.cell, chosen.goal, weight);

    Path travelled;
    travelled.cells.assign(path.cells.begin() + 1, path.cells.end());
    const std::vector<int> delta = accumulate_visits(std::vector<int>(cells, 0), travelled);
    const double gained = true_stealth_penalty(delta, truth);
    for (std::size_t c = 0; c < cells; ++c) agent.visits[c] += delta[c];
    agent.penalty += gained;
    team_penalty += gained;

    Observation obs = simulate_observation(truth, *chosen.action, noise, agent.sensor_rng);
    obs.source_agent = agent.id;

    DecisionRow row;
    row.step = step;
    row.agent = agent.id;
    row.goal = chosen.goal;
    row.goal_row = grid.cell(chosen.goal).row;
    row.goal_col = grid.cell(chosen.goal).col;
    row.heading = chosen.action->pose.heading;
    row.raw_reward = sel.raw_reward;
    row.raw_penalty = sel.raw_penalty;
    row.path_steps = static_cast<int>(path.steps());
    for (const auto& r : obs.action.rows) row.sensed.push_back(r.cell);
    row.measurements = obs.y;

    agent.data.append(obs);
    agent.outbox.push_back(std::move(obs));
    deliver_messages(agents, config.comms, comms_rng);

    agent.gamma = m_step(e_step(agent.data, agent.gamma, config.hyper));
    // A target counts as found once any agent's mean crosses the threshold;
    // receivers are checked under their current gamma.
    for (const auto& a : agents) {
      if (found_count == config.targets) break;
      const Posterior updated = e_step(a.data, a.gamma, config.hyper);
      for (CellIndex t : truth.targets) {
        if (!found[static_cast<std::size_t>(t)] && updated.mu[t] >= config.found_threshold) {
          found[static_cast<std::size_t>(t)] = 1;
          ++found_count;
          record.recoveries.push_back({step, a.id, t});
        }
      }
    }

    row.targets_found = found_count;
    row.cum_true_penalty = team_penalty;
    row.agent_penalty = agent.penalty;
    record.rows.push_back(std::move(row));

    agent.cell = chosen.goal;
    agent.heading = chosen.action->pose.heading;
    agent.ready_time = time + static_cast<double>(path.steps());
    queue.emplace(agent.ready_time, agent.id, slot);
  }

  record.targets_found = found_count;
  record.final_penalty = team_penalty;
  for (const auto& a : agents) record.agent_penalties.push_back(a.penalty);
  return record;
}

std::vector<CurvePoint> metric_curves(const RunRecord& record, int targets, int length) {
  if (targets < 1) throw DomainError("metric curves need targets >= 1");
  const int n = std::max(length, record.decisions());
  std::vector<CurvePoint> curve;
  curve.reserve(static_cast<std::size_t>(n));
  int found = 0;
  double penalty = record.initial_penalty;
  for (int s = 1; s <= n; ++s) {
    if (s <= record.decisions()) {
      const auto& row = record.rows[static_cast<std::size_t>(s - 1)];
      found = row.targets_found;
      penalty = row.cum_true_penalty;
    }
    curve.push_back({s, static_cast<double>(found) / targets, penalty});
  }
  return curve;
}

}  // namespace star
