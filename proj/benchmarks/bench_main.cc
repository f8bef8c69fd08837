#include <benchmark/benchmark.h>

#include "strategist/avalon.h"
#include "strategist/gops.h"
#include "strategist/search.h"

using namespace strategist;

namespace {

StrategicProfile random_profile(int players) {
  std::vector<PolicyPtr> policies;
  for (int i = 0; i < players; ++i) policies.push_back(std::make_shared<UniformRandomPolicy>());
  return StrategicProfile(policies);
}

void BM_GopsRandomRollout(benchmark::State& st) {
  const gops::GopsState root(static_cast<int>(st.range(0)));
  const auto profile = random_profile(2);
  std::uint64_t seed = 0;
  for (auto _ : st) benchmark::DoNotOptimize(rollout(root, profile, seed++).final_returns);
}
BENCHMARK(BM_GopsRandomRollout)->Arg(6)->Arg(13);

void BM_AvalonRandomRollout(benchmark::State& st) {
  const int players = static_cast<int>(st.range(0));
  const auto profile = random_profile(players);
  std::uint64_t seed = 0;
  for (auto _ : st) {
    const auto root = avalon::new_game(players, seed, 0);
    benchmark::DoNotOptimize(rollout(root, profile, seed++).final_returns);
  }
}
BENCHMARK(BM_AvalonRandomRollout)->Arg(5)->Arg(6);

void BM_GopsSearch(benchmark::State& st) {
  const auto h = load_heuristic(HeuristicSpec::builtin("gops_current_score", GameKind::kGops));
  const auto root = gops::new_game(6, 1);
  SearchConfig cfg;
  cfg.budget = static_cast<int>(st.range(0));
  for (auto _ : st) {
    benchmark::DoNotOptimize(run_search(root, h, cfg).chosen_action);
    ++cfg.seed;
  }
}
BENCHMARK(BM_GopsSearch)->Arg(64)->Arg(256);

void BM_AvalonSearch(benchmark::State& st) {
  const auto h = load_heuristic(HeuristicSpec::builtin("avalon_quest_progress", GameKind::kAvalon));
  const auto root = avalon::new_game(5, 1, 0);
  SearchConfig cfg;
  cfg.budget = static_cast<int>(st.range(0));
  for (auto _ : st) {
    benchmark::DoNotOptimize(run_search(root, h, cfg).chosen_action);
    ++cfg.seed;
  }
}
BENCHMARK(BM_AvalonSearch)->Arg(64);

}  // namespace

BENCHMARK_MAIN();
