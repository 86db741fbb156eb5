#include <benchmark/benchmark.h>

#include <sstream>

#include "oppsim/traces.hpp"

using namespace oppsim;

static void BM_ParseTrace(benchmark::State& state) {
  SyntheticConfig config;
  config.nodes = 40;
  config.days = 7;
  config.seed = 23;
  SyntheticGroup g;
  for (NodeId n = 0; n < 40; ++n) g.members.push_back(n);
  g.intra_rate_per_hour = 0.4;
  config.groups.push_back(g);
  std::ostringstream out;
  serialize_trace(out, generate_synthetic(config));
  const std::string text = out.str();
  for (auto _ : state) {
    std::istringstream in(text);
    auto trace = parse_trace(in);
    benchmark::DoNotOptimize(trace);
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_ParseTrace);

static void BM_GenerateSynthetic(benchmark::State& state) {
  SyntheticConfig config;
  config.nodes = static_cast<std::uint32_t>(state.range(0));
  config.days = 3;
  config.seed = 5;
  SyntheticGroup g;
  for (NodeId n = 0; n < config.nodes; ++n) g.members.push_back(n);
  g.intra_rate_per_hour = 0.5;
  config.groups.push_back(g);
  for (auto _ : state) {
    auto trace = generate_synthetic(config);
    benchmark::DoNotOptimize(trace);
  }
}
BENCHMARK(BM_GenerateSynthetic)->Arg(20)->Arg(60);

BENCHMARK_MAIN();
