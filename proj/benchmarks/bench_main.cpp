#include <benchmark/benchmark.h>

#include "sarm/codec.hpp"
#include "sarm/harness.hpp"
#include "sarm/key_maze.hpp"
#include "sarm/miner.hpp"
#include "sarm/qlearn.hpp"

namespace {

void BM_CodecRoundTrip(benchmark::State& state) {
  const sarm::DomainSpec spec({25, 5, 4});
  for (auto _ : state) {
    for (sarm::StateId id = spec.min_id(); id <= spec.max_id(); ++id) {
      benchmark::DoNotOptimize(sarm::encode(spec, sarm::decode(spec, id)));
    }
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(spec.state_count()));
}
BENCHMARK(BM_CodecRoundTrip);

void BM_FpGrowth(benchmark::State& state) {
  // Synthetic transactions: a shared chain plus per-transaction noise.
  std::vector<std::vector<sarm::StateId>> trajs;
  sarm::Rng rng(7);
  std::uniform_int_distribution<sarm::StateId> noise(100, 400);
  for (int i = 0; i < 64; ++i) {
    std::vector<sarm::StateId> t{5, 17, 42, 77};
    for (int j = 0; j < static_cast<int>(state.range(0)); ++j) {
      t.push_back(noise(rng));
    }
    trajs.push_back(std::move(t));
  }
  const auto transactions = sarm::trajectories_to_transactions(trajs);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sarm::fp_growth(transactions, 0.5));
  }
}
BENCHMARK(BM_FpGrowth)->Arg(8)->Arg(32);

void BM_QLearningEpisodes(benchmark::State& state) {
  sarm::GridMap map = sarm::GridMap::open_grid(8, 8);
  map.set_subgoal('1', {4, 4});
  sarm::KeyMaze env(std::move(map), sarm::ProgressSpec::chain({'1'}), {0, 0},
                    {7, 7});
  sarm::LearnerParams params;
  params.episodes = static_cast<int>(state.range(0));
  params.max_steps = 200;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sarm::train(env, params));
  }
}
BENCHMARK(BM_QLearningEpisodes)->Arg(10)->Arg(100);

}  // namespace

BENCHMARK_MAIN();
