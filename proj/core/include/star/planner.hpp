#pragma once

#include <vector>

#include "star/sensing.hpp"
#include "star/terrain.hpp"

namespace star {

/// 4-connected cell sequence from start to goal.
struct Path {
  std::vector<CellIndex> cells;
  double cost = 0.0;

  /// Number of moves (cells - 1).
  std::size_t steps() const noexcept { return cells.empty() ? 0 : cells.size() - 1; }
};

/// Cost of entering a cell: 1 + risk_weight * risk(cell).
double step_cost(const ScalarField& risk, CellIndex cell, double risk_weight);

/// A* over traversable cells, Manhattan heuristic. Throws DomainError for
/// non-traversable endpoints, a negative weight or negative risk, and
/// UnreachableError when no path exists.
Path plan_path(const TerrainGrid& grid, const ScalarField& risk, CellIndex start, CellIndex goal,
               double risk_weight);

/// Breadth-first move counts from `start`; -1 where unreachable.
std::vector<int> bfs_distances(const TerrainGrid& grid, CellIndex start);

/// counts[c] += multiplicity of c in path.
std::vector<int> accumulate_visits(std::vector<int> counts, const Path& path);

/// Sum over targets and cells of [cell in target viewshed] * counts[cell].
double true_stealth_penalty(const std::vector<int>& counts, const GroundTruth& truth);

}  // namespace star
