#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "oracles.hpp"
#include "star/errors.hpp"
#include "star/maps.hpp"
#include "star/sensing.hpp"

namespace star {
namespace {

std::set<CellIndex> cells_of(const SensingAction& a) {
  std::set<CellIndex> out;
  for (const auto& r : a.rows) out.insert(r.cell);
  return out;
}

TEST(Headings, NamesRoundTrip) {
  for (Heading h : kAllHeadings) EXPECT_EQ(parse_heading(heading_name(h)), h);
  EXPECT_DOUBLE_EQ(heading_degrees(Heading::kE), 90.0);
  EXPECT_DOUBLE_EQ(heading_degrees(Heading::kNW), 315.0);
  EXPECT_THROW(parse_heading("north"), DomainError);
}

TEST(RobotSensing, FlatNorthHasFifteenFullRows) {
  const auto g = TerrainGrid::flat(10, 10);
  const auto a = robot_sensing_action(g, {g.index({6, 5}), Heading::kN});
  ASSERT_EQ(a.size(), 15u);
  for (const auto& r : a.rows) {
    EXPECT_EQ(r.visibility, 1.0);
    EXPECT_LE(r.distance, 300.0 + 1e-9);
    EXPECT_LT(g.cell(r.cell).row, 6);
  }
  EXPECT_EQ(cells_of(a).size(), 15u);
}

TEST(RobotSensing, EveryHeadingHasFifteenInTheOpen) {
  const auto g = TerrainGrid::flat(11, 11);
  for (Heading h : kAllHeadings) {
    const auto a = robot_sensing_action(g, {g.index({5, 5}), h});
    EXPECT_EQ(a.size(), 15u) << heading_name(h);
    EXPECT_EQ(cells_of(a).size(), a.size());
  }
}

TEST(RobotSensing, CliffAheadCutsTheFootprint) {
  auto g = TerrainGrid::flat(10, 10);
  for (int c = 0; c < 10; ++c) g.set_elevation({4, c}, 30.0);
  const CellIndex pose = g.index({5, 5});
  const auto a = robot_sensing_action(g, {pose, Heading::kN});
  EXPECT_LT(a.size(), 15u);
  // Rows equal the footprint intersected with the oracle's sector viewshed.
  const auto view = oracle::dense_viewshed(g, pose, FieldOfView::sector(0.0, 90.0), {});
  std::set<CellIndex> expect;
  for (const Cell& c : trapezoid_footprint(g, {pose, Heading::kN})) {
    if (view[static_cast<std::size_t>(g.index(c))] > 0.0) expect.insert(g.index(c));
  }
  EXPECT_EQ(cells_of(a), expect);
}

TEST(RobotSensing, OppositeHeadingsAreDisjoint) {
  const auto g = TerrainGrid::flat(12, 12);
  const CellIndex p = g.index({6, 6});
  const std::pair<Heading, Heading> pairs[] = {{Heading::kN, Heading::kS},
                                                {Heading::kE, Heading::kW},
                                                {Heading::kNE, Heading::kSW},
                                                {Heading::kSE, Heading::kNW}};
  for (auto [a, b] : pairs) {
    const auto sa = cells_of(robot_sensing_action(g, {p, a}));
    const auto sb = cells_of(robot_sensing_action(g, {p, b}));
    for (CellIndex c : sa) EXPECT_FALSE(sb.count(c));
  }
}

TEST(RobotSensing, RejectsBadPoses) {
  auto g = TerrainGrid::flat(4, 4);
  EXPECT_THROW(robot_sensing_action(g, {16, Heading::kN}), DomainError);
  g.set_traversable({1, 1}, false);
  EXPECT_THROW(robot_sensing_action(g, {g.index({1, 1}), Heading::kN}), DomainError);
}

TEST(TargetSensing, FlatSeesFiveCellRadius) {
  const auto g = TerrainGrid::flat(13, 13);
  const CellIndex c = g.index({6, 6});
  const auto a = target_sensing_action(g, c);
  int disc = 0;
  for (int dr = -5; dr <= 5; ++dr) {
    for (int dc = -5; dc <= 5; ++dc) {
      if (dr * dr + dc * dc <= 25) ++disc;
    }
  }
  EXPECT_EQ(a.size(), static_cast<std::size_t>(disc));
  for (const auto& r : a.rows) EXPECT_EQ(r.visibility, 1.0);
}

TEST(TargetSensing, PitSeesLessThanFlat) {
  const auto pit = maps::pit_and_wall8();
  const auto flat = TerrainGrid::flat(8, 8);
  const CellIndex c = pit.index({3, 3});
  EXPECT_LT(target_sensing_action(pit, c).size(), target_sensing_action(flat, c).size());
}

TEST(TargetSensing, CornerIsAboutAQuarter) {
  const auto g = TerrainGrid::flat(13, 13);
  const double interior = static_cast<double>(target_sensing_action(g, g.index({6, 6})).size());
  const double corner = static_cast<double>(target_sensing_action(g, 0).size());
  // A quarter disc plus the two boundary half-axes.
  EXPECT_NEAR(corner / interior, 0.25, 0.1);
}

TEST(TargetSensing, OutOfBoundsIsDomainError) {
  const auto g = TerrainGrid::flat(4, 4);
  EXPECT_THROW(target_sensing_action(g, 99), DomainError);
}

TEST(NoiseStddev, SpecExamples) {
  EXPECT_DOUBLE_EQ(noise_stddev(0.0, 1.0, 0.1, 0.05), 0.1);
  // Distance-dominated regime: doubling distance roughly quadruples sigma.
  const double near = noise_stddev(6000.0, 1.0, 0.1, 0.05);
  const double far = noise_stddev(12000.0, 1.0, 0.1, 0.05);
  EXPECT_NEAR(far / near, 4.0, 0.01);
  EXPECT_DOUBLE_EQ(noise_stddev(120.0, 0.5, 0.1, 0.05) / noise_stddev(120.0, 1.0, 0.1, 0.05),
                   4.0);
  EXPECT_THROW(noise_stddev(0.0, 0.0, 0.1, 0.05), DomainError);
  EXPECT_THROW(noise_stddev(0.0, -0.5, 0.1, 0.05), DomainError);
  EXPECT_THROW(noise_stddev(-1.0, 1.0, 0.1, 0.05), DomainError);
}

TEST(NoiseStddev, NonDecreasingInDistance) {
  double prev = 0.0;
  for (int k = 0; k <= 10; ++k) {
    const double s = noise_stddev(30.0 * k, 0.6, 0.1, 0.05);
    EXPECT_GE(s, prev);
    prev = s;
  }
}

TEST(ClippedMeasurement, SpecExamples) {
  EXPECT_EQ(clipped_measurement(true, 0.0), 1.0);
  EXPECT_EQ(clipped_measurement(false, 1.4), 1.0);
  EXPECT_DOUBLE_EQ(clipped_measurement(true, 0.4), 0.6);
  EXPECT_EQ(clipped_measurement(true, 1.7), 0.0);
  EXPECT_DOUBLE_EQ(clipped_measurement(false, 0.3), 0.3);
}

TEST(SimulateObservation, BoundedAndRecordsVariance) {
  std::mt19937_64 rng(12);
  auto g = oracle::random_terrain(12, 12, rng);
  const auto truth = make_ground_truth(g, {g.index({4, 4}), g.index({2, 7})});
  NoiseModel noise{0.4, 0.2, 60.0};
  for (CellIndex c = 0; c < 144; c += 7) {
    for (Heading h : kAllHeadings) {
      const auto a = robot_sensing_action(g, {c, h});
      const auto obs = simulate_observation(truth, a, noise, rng);
      ASSERT_EQ(obs.y.size(), a.size());
      for (std::size_t q = 0; q < a.size(); ++q) {
        EXPECT_GE(obs.y[q], 0.0);
        EXPECT_LE(obs.y[q], 1.0);
        EXPECT_DOUBLE_EQ(obs.noise_variance[q], std::pow(noise.stddev(a.rows[q]), 2));
      }
    }
  }
}

TEST(SimulateObservation, NoiselessEqualsIndicator) {
  const auto g = TerrainGrid::flat(9, 9);
  const auto truth = make_ground_truth(g, {g.index({2, 4}), g.index({1, 3})});
  NoiseModel noise{1e-300, 0.0, 60.0};
  std::mt19937_64 rng(4);
  const auto a = robot_sensing_action(g, {g.index({5, 4}), Heading::kN});
  const auto obs = simulate_observation(truth, a, noise, rng);
  for (std::size_t q = 0; q < a.size(); ++q) {
    EXPECT_NEAR(obs.y[q], truth.is_target(a.rows[q].cell) ? 1.0 : 0.0, 1e-12);
  }
}

TEST(SimulateObservation, HalfNormalMeanOnEmptyCell) {
  const auto g = TerrainGrid::flat(3, 3);
  const auto truth = make_ground_truth(g, {8});
  SensingAction a;
  a.rows.push_back({0, 1.0, 0.0});
  const NoiseModel noise{0.05, 0.0, 60.0};
  std::mt19937_64 rng(99);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) sum += simulate_observation(truth, a, noise, rng).y[0];
  EXPECT_NEAR(sum / n, 0.05 * std::sqrt(2.0 / std::numbers::pi), 0.02 * 0.05 * 0.8);
}

TEST(SimulateObservation, SeededIsReproducible) {
  const auto g = TerrainGrid::flat(8, 8);
  const auto truth = make_ground_truth(g, {10});
  const auto a = robot_sensing_action(g, {g.index({4, 4}), Heading::kNE});
  std::mt19937_64 r1(5), r2(5);
  EXPECT_EQ(simulate_observation(truth, a, {}, r1).y, simulate_observation(truth, a, {}, r2).y);
}

TEST(GroundTruth, Validation) {
  auto g = TerrainGrid::flat(4, 4);
  g.set_traversable({0, 1}, false);
  EXPECT_THROW(make_ground_truth(g, {1}), DomainError);
  EXPECT_THROW(make_ground_truth(g, {2, 2}), DomainError);
  EXPECT_THROW(make_ground_truth(g, {20}), DomainError);
  const auto t = make_ground_truth(g, {3, 5});
  EXPECT_EQ(std::count(t.beta.begin(), t.beta.end(), 1), 2);
  EXPECT_EQ(t.target_views.size(), 2u);
}

TEST(ActionTable, MatchesDirectConstruction) {
  const auto g = maps::corridor16();
  const ActionTable table(g, {});
  EXPECT_EQ(table.cell_count(), 256u);
  for (CellIndex c = 0; c < 256; c += 5) {
    if (!g.traversable(c)) continue;
    for (Heading h : kAllHeadings) {
      const auto direct = robot_sensing_action(g, {c, h});
      EXPECT_EQ(cells_of(table.at(c, h)), cells_of(direct));
    }
  }
}

}  // namespace
}  // namespace star
