#include <benchmark/benchmark.h>

#include <random>

#include "star/belief.hpp"
#include "star/engine.hpp"
#include "star/maps.hpp"
#include "star/policy.hpp"
#include "star/viewshed.hpp"

namespace {

using namespace star;

void BM_Viewshed(benchmark::State& state) {
  const auto n = static_cast<int>(state.range(0));
  const auto g = maps::random_dem(n, n, 1, 40.0);
  CellIndex o = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(viewshed(g, o, FieldOfView::omnidirectional(), {}));
    o = (o + 37) % static_cast<CellIndex>(g.size());
  }
}
BENCHMARK(BM_Viewshed)->Arg(16)->Arg(32)->Arg(64);

void BM_ViewshedTable(benchmark::State& state) {
  const auto g = maps::random_dem(32, 32, 2, 40.0);
  for (auto _ : state) benchmark::DoNotOptimize(ViewshedTable(g, {}));
}
BENCHMARK(BM_ViewshedTable)->Unit(benchmark::kMillisecond);

Dataset random_dataset(std::size_t cells, int records, std::mt19937_64& rng) {
  std::uniform_int_distribution<CellIndex> pick(0, static_cast<CellIndex>(cells) - 16);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Dataset d(cells, 0);
  for (int r = 0; r < records; ++r) {
    Observation o;
    const CellIndex base = pick(rng);
    for (CellIndex c = base; c < base + 15; ++c) {
      o.action.rows.push_back({c, 1.0, 0.0});
      o.y.push_back(u(rng));
      o.noise_variance.push_back(0.01 + 0.1 * u(rng));
    }
    d.append(std::move(o));
  }
  return d;
}

void BM_EStep(benchmark::State& state) {
  const auto cells = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(3);
  const auto d = random_dataset(cells, 60, rng);
  const Eigen::VectorXd gamma = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(cells));
  for (auto _ : state) benchmark::DoNotOptimize(e_step(d, gamma));
}
BENCHMARK(BM_EStep)->Arg(256)->Arg(1024)->Arg(4096);

void BM_FitPosterior(benchmark::State& state) {
  std::mt19937_64 rng(3);
  const auto d = random_dataset(1024, 60, rng);
  const Eigen::VectorXd gamma = Eigen::VectorXd::Ones(1024);
  for (auto _ : state) benchmark::DoNotOptimize(fit_posterior(d, gamma));
}
BENCHMARK(BM_FitPosterior);

void BM_SelectStar(benchmark::State& state) {
  const World world(maps::corridor16(), {});
  const auto cands = build_candidates(world.grid, world.actions);
  std::mt19937_64 rng(5);
  const auto d = random_dataset(world.grid.size(), 20, rng);
  const auto post = fit_posterior(d, Eigen::VectorXd::Ones(256));
  const auto mu_vis = visibility_mean(post);
  const auto risk = risk_landscape(world.target_views,
                                   std::vector<double>(mu_vis.data(), mu_vis.data() + 256));
  for (auto _ : state) {
    benchmark::DoNotOptimize(select_action_star(post, cands, {}, risk, {}, rng));
  }
}
BENCHMARK(BM_SelectStar)->Unit(benchmark::kMicrosecond);

void BM_Mission(benchmark::State& state) {
  const World world(maps::corridor16(), {});
  MissionConfig c;
  c.agents = 2;
  c.targets = 5;
  c.placement = Placement::kAdversarial;
  c.budget = 60;
  c.policy.kind = static_cast<PolicyKind>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) {
    c.seed = ++seed;
    benchmark::DoNotOptimize(run_mission(world, c));
  }
  state.SetLabel(std::string(policy_name(c.policy.kind)));
}
BENCHMARK(BM_Mission)
    ->Arg(static_cast<int>(PolicyKind::kStar))
    ->Arg(static_cast<int>(PolicyKind::kCoverage))
    ->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
