#include "star/planner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <queue>
#include <string>
#include <tuple>

#include "star/errors.hpp"

namespace star {
namespace {

constexpr std::array<std::array<int, 2>, 4> kMoves = {{{-1, 0}, {0, 1}, {1, 0}, {0, -1}}};

}  // namespace

double step_cost(const ScalarField& risk, CellIndex cell, double risk_weight) {
  return 1.0 + risk_weight * risk[cell];
}

Path plan_path(const TerrainGrid& grid, const ScalarField& risk, CellIndex start, CellIndex goal,
               double risk_weight) {
  if (!grid.contains(start) || !grid.contains(goal)) {
    throw DomainError("plan_path endpoints must be inside the grid");
  }
  if (!grid.traversable(start) || !grid.traversable(goal)) {
    throw DomainError("plan_path endpoints must be traversable");
  }
  if (!(risk_weight >= 0.0)) throw DomainError("risk weight must be >= 0");
  if (risk.size() != grid.size()) throw DomainError("risk field does not match the grid");

  const Cell goal_cell = grid.cell(goal);
  auto heuristic = [&](CellIndex i) {
    const Cell c = grid.cell(i);
    return static_cast<double>(std::abs(c.row - goal_cell.row) + std::abs(c.col - goal_cell.col));
  };

  const auto n = grid.size();
  std::vector<double> g(n, std::numeric_limits<double>::infinity());
  std::vector<CellIndex> parent(n, -1);
  std::vector<std::uint8_t> closed(n, 0);
  // (f, g, cell): ties favour deeper nodes, then the lower cell index.
  using Entry = std::tuple<double, double, CellIndex>;
  auto worse = [](const Entry& a, const Entry& b) {
    if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) > std::get<0>(b);
    if (std::get<1>(a) != std::get<1>(b)) return std::get<1>(a) < std::get<1>(b);
    return std::get<2>(a) > std::get<2>(b);
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> open(worse);

  g[static_cast<std::size_t>(start)] = 0.0;
  open.emplace(heuristic(start), 0.0, start);
  while (!open.empty()) {
    const auto [f, gc, cur] = open.top();
    open.pop();
    auto& done = closed[static_cast<std::size_t>(cur)];
    if (done) continue;
    done = 1;
    if (cur == goal) break;
    const Cell c = grid.cell(cur);
    for (const auto& [dr, dc] : kMoves) {
      const Cell nc{c.row + dr, c.col + dc};
      if (!grid.contains(nc)) continue;
      const CellIndex nb = grid.index(nc);
      if (!grid.traversable(nb) || closed[static_cast<std::size_t>(nb)]) continue;
      const double r = risk[nb];
      if (r < 0.0) throw DomainError("risk field must be non-negative");
      const double cand = gc + 1.0 + risk_weight * r;
      if (cand < g[static_cast<std::size_t>(nb)]) {
        g[static_cast<std::size_t>(nb)] = cand;
        parent[static_cast<std::size_t>(nb)] = cur;
        open.emplace(cand + heuristic(nb), cand, nb);
      }
    }
  }
  if (!closed[static_cast<std::size_t>(goal)]) {
    throw UnreachableError("no traversable path from cell " + std::to_string(start) +
                           " to cell " + std::to_string(goal));
  }

  Path path;
  path.cost = g[static_cast<std::size_t>(goal)];
  for (CellIndex at = goal; at != -1; at = parent[static_cast<std::size_t>(at)]) {
    path.cells.push_back(at);
    if (at == start) break;
  }
  std::reverse(path.cells.begin(), path.cells.end());
  return path;
}

std::vector<int> bfs_distances(const TerrainGrid& grid, CellIndex start) {
  std::vector<int> dist(grid.size(), -1);
  if (!grid.contains(start) || !grid.traversable(start)) return dist;
  std::queue<CellIndex> frontier;
  dist[static_cast<std::size_t>(start)] = 0;
  frontier.push(start);
  while (!frontier.empty()) {
    const CellIndex cur = frontier.front();
    frontier.pop();
    const Cell c = grid.cell(cur);
    for (const auto& [dr, dc] : kMoves) {
      const Cell nc{c.row + dr, c.col + dc};
      if (!grid.contains(nc)) continue;
      const CellIndex nb = grid.index(nc);
      if (!grid.traversable(nb) || dist[static_cast<std::size_t>(nb)] >= 0) continue;
      dist[static_cast<std::size_t>(nb)] = dist[static_cast<std::size_t>(cur)] + 1;
      frontier.push(nb);
    }
  }
  return dist;
}

std::vector<int> accumulate_visits(std::vector<int> counts, const Path& path) {
  for (CellIndex c : path.cells) {
    if (c < 0 || static_cast<std::size_t>(c) >= counts.size()) {
      throw DomainError("path cell outside the visit-count vector");
    }
    ++counts[static_cast<std::size_t>(c)];
  }
  return counts;
}

double true_stealth_penalty(const std::vector<int>& counts, const GroundTruth& truth) {
  double total = 0.0;
  for (const auto& view : truth.target_views) {
    for (const auto& e : view.entries) {
      total += static_cast<double>(counts[static_cast<std::size_t>(e.cell)]);
    }
  }
  return total;
}

}  // namespace star
