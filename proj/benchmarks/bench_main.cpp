#include <benchmark/benchmark.h>

#include <numeric>

#include "edgegen/agents.hpp"
#include "edgegen/catalog.hpp"
#include "edgegen/episode.hpp"
#include "edgegen/perception.hpp"
#include "edgegen/ppo.hpp"
#include "edgegen/world.hpp"

namespace {

using namespace edgegen;

Scene bench_scene() {
  GeneratorConfig g;
  g.count = 1;
  return generate(g, 7).scenes.front();
}

void BM_WorldStep(benchmark::State& state) {
  const SimConfig sim;
  const Scene scene = bench_scene();
  WorldState w = initial_world(scene, sim);
  for (auto _ : state) {
    w = step(w, ControlSignal::throttle(0.3), scene, sim);
    if (w.tick > 500) w = initial_world(scene, sim);
    benchmark::DoNotOptimize(w);
  }
}
BENCHMARK(BM_WorldStep);

void BM_Sense(benchmark::State& state) {
  const PerceptionConfig cfg;
  RngStream rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(sense(40.0, 0.7, cfg, rng));
}
BENCHMARK(BM_Sense);

void BM_EpisodeRandomAgent(benchmark::State& state) {
  const Scene scene = bench_scene();
  EnvConfig env;
  env.episode_len = state.range(0);
  for (auto _ : state) {
    RandomAgent agent(RngStream(3));
    benchmark::DoNotOptimize(run_episode(agent, scene, env, RunMode::kEval));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EpisodeRandomAgent)->Arg(256)->Arg(512);

void BM_PpoUpdate(benchmark::State& state) {
  RngStream rng(1);
  const std::vector<std::size_t> hidden{64, 64};
  const PolicyParams init = PolicyParams::create(kFeatureCount, hidden, kKnobCount, rng);
  RolloutBuffer buf;
  for (int i = 0; i < 1024; ++i) {
    std::vector<double> x(kFeatureCount);
    for (double& v : x) v = rng.uniform(-1, 1);
    const PolicyOutput out = policy_forward(init, x);
    const SampledAction s = sample_action(out.mean, out.log_std, rng);
    buf.push(x, s.raw, s.log_prob, rng.uniform(0, 2), out.value, i % 256 == 255);
  }
  PpoConfig cfg;
  for (auto _ : state) {
    PolicyParams p = init;
    Adam opt(p.size(), cfg.learn_rate);
    RngStream shuffle(2);
    benchmark::DoNotOptimize(ppo_update(p, opt, buf, cfg, shuffle));
  }
}
BENCHMARK(BM_PpoUpdate)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
