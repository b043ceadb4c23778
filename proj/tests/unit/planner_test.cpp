#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "star/errors.hpp"
#include "star/planner.hpp"

namespace star {
namespace {

ScalarField zero_risk(std::size_t n) { return {FieldKind::kRisk, std::vector<double>(n, 0.0)}; }

// Risk in multiples of 1/64 keeps every path sum exact in floating point.
ScalarField dyadic_risk(std::size_t n, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> k(0, 64);
  ScalarField f = zero_risk(n);
  for (auto& v : f.values) v = k(rng) / 64.0;
  return f;
}

void expect_valid(const TerrainGrid& g, const Path& p, CellIndex s, CellIndex t) {
  ASSERT_FALSE(p.cells.empty());
  EXPECT_EQ(p.cells.front(), s);
  EXPECT_EQ(p.cells.back(), t);
  for (std::size_t i = 0; i < p.cells.size(); ++i) {
    EXPECT_TRUE(g.traversable(p.cells[i]));
    if (i == 0) continue;
    const Cell a = g.cell(p.cells[i - 1]);
    const Cell b = g.cell(p.cells[i]);
    EXPECT_EQ(std::abs(a.row - b.row) + std::abs(a.col - b.col), 1);
  }
}

TEST(PlanPath, OpenGridIsManhattan) {
  const auto g = TerrainGrid::flat(8, 8);
  const auto p = plan_path(g, zero_risk(64), g.index({1, 1}), g.index({6, 4}), 5.0);
  EXPECT_EQ(p.cells.size(), 5u + 3u + 1u);
  EXPECT_EQ(p.cost, 8.0);
  expect_valid(g, p, g.index({1, 1}), g.index({6, 4}));
}

TEST(PlanPath, GoalEqualsStart) {
  const auto g = TerrainGrid::flat(4, 4);
  const auto p = plan_path(g, zero_risk(16), 5, 5, 1.0);
  EXPECT_EQ(p.cells, std::vector<CellIndex>{5});
  EXPECT_EQ(p.cost, 0.0);
  EXPECT_EQ(p.steps(), 0u);
}

TEST(PlanPath, DetoursAroundRiskyCorridor) {
  // Straight row 0 is risky; the long way round through row 7 is safe.
  auto g = TerrainGrid::flat(8, 8);
  for (int r = 1; r < 7; ++r) {
    for (int c = 1; c < 7; ++c) g.set_traversable({r, c}, false);
  }
  ScalarField risk = zero_risk(64);
  for (int c = 1; c < 7; ++c) risk.values[static_cast<std::size_t>(g.index({0, c}))] = 1.0;
  const CellIndex s = g.index({0, 0});
  const CellIndex t = g.index({0, 7});
  const auto cheap = plan_path(g, risk, s, t, 0.1);
  EXPECT_EQ(cheap.steps(), 7u);
  const auto safe = plan_path(g, risk, s, t, 10.0);
  EXPECT_EQ(safe.steps(), 21u);
  EXPECT_EQ(safe.cost, oracle::dijkstra_cost(g, risk.values, s, t, 10.0));
  expect_valid(g, safe, s, t);
}

TEST(PlanPath, MatchesDijkstraExactly) {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    auto g = TerrainGrid::flat(8, 8);
    for (CellIndex i = 0; i < 64; ++i) {
      if (u(rng) < 0.2) g.set_traversable(g.cell(i), false);
    }
    const auto risk = dyadic_risk(64, rng);
    const double w = std::floor(u(rng) * 9.0);
    std::uniform_int_distribution<CellIndex> pick(0, 63);
    const CellIndex s = pick(rng);
    const CellIndex t = pick(rng);
    if (!g.traversable(s) || !g.traversable(t)) continue;
    const double ref = oracle::dijkstra_cost(g, risk.values, s, t, w);
    if (std::isinf(ref)) {
      EXPECT_THROW(plan_path(g, risk, s, t, w), UnreachableError);
      continue;
    }
    const auto p = plan_path(g, risk, s, t, w);
    EXPECT_EQ(p.cost, ref);
    expect_valid(g, p, s, t);
    double along = 0.0;
    for (std::size_t i = 1; i < p.cells.size(); ++i) along += step_cost(risk, p.cells[i], w);
    EXPECT_EQ(along, p.cost);
  }
}

TEST(PlanPath, PathRiskNonIncreasingInWeight) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 40; ++trial) {
    const auto g = TerrainGrid::flat(8, 8);
    const auto risk = dyadic_risk(64, rng);
    std::uniform_int_distribution<CellIndex> pick(0, 63);
    const CellIndex s = pick(rng);
    const CellIndex t = pick(rng);
    double prev = std::numeric_limits<double>::infinity();
    for (double w : {0.0, 0.5, 1.0, 2.0, 4.0, 16.0}) {
      const auto p = plan_path(g, risk, s, t, w);
      double r = 0.0;
      for (std::size_t i = 1; i < p.cells.size(); ++i) r += risk[p.cells[i]];
      EXPECT_LE(r, prev);
      prev = r;
    }
  }
}

TEST(PlanPath, Errors) {
  auto g = TerrainGrid::flat(3, 3);
  g.set_traversable({1, 0}, false);
  g.set_traversable({1, 1}, false);
  g.set_traversable({1, 2}, false);
  EXPECT_THROW(plan_path(g, zero_risk(9), 0, 8, 1.0), UnreachableError);
  EXPECT_THROW(plan_path(g, zero_risk(9), 0, 3, 1.0), DomainError);
  EXPECT_THROW(plan_path(g, zero_risk(9), 0, 1, -1.0), DomainError);
  EXPECT_THROW(plan_path(g, zero_risk(9), 0, 42, 1.0), DomainError);
  ScalarField neg = zero_risk(9);
  neg.values[1] = -0.5;
  EXPECT_THROW(plan_path(g, neg, 0, 2, 1.0), DomainError);
}

TEST(BfsDistances, MatchesUnitDijkstra) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto g = TerrainGrid::flat(9, 9);
  for (CellIndex i = 1; i < 81; ++i) {
    if (u(rng) < 0.25) g.set_traversable(g.cell(i), false);
  }
  const auto d = bfs_distances(g, 0);
  const std::vector<double> none(81, 0.0);
  for (CellIndex i = 0; i < 81; ++i) {
    if (!g.traversable(i)) {
      EXPECT_EQ(d[static_cast<std::size_t>(i)], -1);
      continue;
    }
    const double ref = oracle::dijkstra_cost(g, none, 0, i, 0.0);
    if (std::isinf(ref)) {
      EXPECT_EQ(d[static_cast<std::size_t>(i)], -1);
    } else {
      EXPECT_EQ(d[static_cast<std::size_t>(i)], static_cast<int>(ref));
    }
  }
}

TEST(AccumulateVisits, CountsAndAdditivity) {
  Path a;
  a.cells = {0, 1, 2};
  auto c = accumulate_visits(std::vector<int>(5, 0), a);
  EXPECT_EQ(c, (std::vector<int>{1, 1, 1, 0, 0}));

  Path loop;
  loop.cells = {3, 4, 3};
  EXPECT_EQ(accumulate_visits(std::vector<int>(5, 0), loop)[3], 2);

  Path both;
  both.cells = a.cells;
  both.cells.insert(both.cells.end(), loop.cells.begin(), loop.cells.end());
  EXPECT_EQ(accumulate_visits(accumulate_visits(std::vector<int>(5, 0), a), loop),
            accumulate_visits(std::vector<int>(5, 0), both));
}

TEST(TrueStealthPenalty, Examples) {
  const auto g = TerrainGrid::flat(1, 12);
  const auto one = make_ground_truth(g, {0});
  EXPECT_EQ(true_stealth_penalty(std::vector<int>(12, 0), one), 0.0);
  std::vector<int> counts(12, 0);
  counts[2] = 1;
  EXPECT_EQ(true_stealth_penalty(counts, one), 1.0);
  const auto two = make_ground_truth(g, {0, 4});
  counts[2] = 2;
  EXPECT_EQ(true_stealth_penalty(counts, two), 4.0);
  counts[11] = 3;  // out of both viewsheds
  EXPECT_EQ(true_stealth_penalty(counts, two), 4.0);
}

TEST(TrueStealthPenalty, LinearInCounts) {
  const auto g = TerrainGrid::flat(6, 6);
  const auto t = make_ground_truth(g, {3, 20, 33});
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> k(0, 4);
  std::vector<int> a(36), b(36), ab(36);
  for (std::size_t i = 0; i < 36; ++i) {
    a[i] = k(rng);
    b[i] = k(rng);
    ab[i] = a[i] + b[i];
  }
  EXPECT_EQ(true_stealth_penalty(ab, t), true_stealth_penalty(a, t) + true_stealth_penalty(b, t));
}

}  // namespace
}  // namespace star
