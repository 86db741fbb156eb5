#include <benchmark/benchmark.h>

#include "oppsim/rng.hpp"
#include "oppsim/social.hpp"

using namespace oppsim;

static void BM_AccrueAndClose(benchmark::State& state) {
  const int keys = static_cast<int>(state.range(0));
  Rng rng(1);
  for (auto _ : state) {
    SampleAverager acc(24);
    for (int day = 1; day <= 7; ++day) {
      for (int i = 0; i < 24; ++i) {
        for (int k = 0; k < keys; ++k)
          acc.accrue(static_cast<std::uint32_t>(k), i, rng.uniform(0, 3600));
        acc.close_sample_all(i, day);
      }
    }
    benchmark::DoNotOptimize(acc);
  }
}
BENCHMARK(BM_AccrueAndClose)->Arg(8)->Arg(64)->Arg(512);

static void BM_TeciWeight(benchmark::State& state) {
  SampleAverager acc(24);
  Rng rng(2);
  for (std::uint32_t k = 0; k < 64; ++k)
    for (int i = 0; i < 24; ++i) {
      acc.accrue(k, i, rng.uniform(0, 3600));
      acc.close_sample(k, i, 1);
    }
  std::uint32_t key = 0;
  int sample = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(acc.weight(key, sample));
    key = (key + 1) % 64;
    sample = (sample + 7) % 24;
  }
}
BENCHMARK(BM_TeciWeight);

static void BM_KCliqueUpdate(benchmark::State& state) {
  const NodeId n = static_cast<NodeId>(state.range(0));
  Rng rng(3);
  for (auto _ : state) {
    state.PauseTiming();
    std::vector<CommunityState> nodes;
    for (NodeId i = 0; i < n; ++i) nodes.emplace_back(i, 5, 7200);
    state.ResumeTiming();
    for (int step = 0; step < 2000; ++step) {
      NodeId a = static_cast<NodeId>(rng.below(n));
      NodeId b = static_cast<NodeId>(rng.below(n));
      if (a == b) continue;
      double start = rng.uniform(0, 86400);
      kclique_update(nodes[std::min(a, b)], nodes[std::max(a, b)],
                     make_contact(a, b, start, start + rng.uniform(60, 3600)));
    }
    benchmark::DoNotOptimize(nodes);
  }
}
BENCHMARK(BM_KCliqueUpdate)->Arg(16)->Arg(64);
