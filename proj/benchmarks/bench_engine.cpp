#include <benchmark/benchmark.h>

#include "oppsim/engine.hpp"
#include "oppsim/traces.hpp"

using namespace oppsim;

namespace {

std::vector<Contact> dense_trace(std::uint32_t nodes, int days, std::uint64_t seed) {
  SyntheticConfig config;
  config.nodes = nodes;
  config.days = days;
  config.seed = seed;
  SyntheticGroup g;
  for (NodeId n = 0; n < nodes; ++n) g.members.push_back(n);
  g.intra_rate_per_hour = 1.0;
  config.groups.push_back(g);
  config.active_windows = {{28800, 57600}};
  config.duration_min_s = 60;
  config.duration_max_s = 300;
  return generate_synthetic(config);
}

Scenario bench_scenario(Protocol protocol, std::uint32_t nodes, int days) {
  Scenario sc;
  sc.name = "bench";
  sc.nodes = nodes;
  sc.protocol = protocol;
  sc.duration_s = days * kSecondsPerDay;
  sc.ttl_s = kSecondsPerDay;
  sc.interests.assign(nodes, {});
  if (protocol == Protocol::Scorp) {
    for (NodeId r = 1; r < nodes; ++r)
      for (int i = 0; i < 3; ++i)
        sc.interests[r].insert(static_cast<InterestId>((r - 1 + i) % (nodes - 1)));
    for (InterestId t = 0; t < nodes - 1; ++t) {
      PlannedMessage m;
      m.source = 0;
      m.addressing = ContentAddress{t};
      m.created_at = 0;
      sc.traffic.push_back(m);
    }
  } else {
    for (std::size_t k = 0; k < 3u * (nodes - 1); ++k) {
      PlannedMessage m;
      m.source = 0;
      m.addressing = DestinationAddress{static_cast<NodeId>(1 + k % (nodes - 1))};
      m.created_at = static_cast<double>(k) * 300.0;
      sc.traffic.push_back(m);
    }
  }
  sc.audit = false;
  return sc;
}

}  // namespace

static void BM_Run(benchmark::State& state, Protocol protocol) {
  const std::uint32_t nodes = 20;
  const int days = 2;
  auto trace = dense_trace(nodes, days, 17);
  auto sc = bench_scenario(protocol, nodes, days);
  for (auto _ : state) {
    auto result = run(sc, trace, 1);
    benchmark::DoNotOptimize(result);
  }
  state.counters["contacts"] = static_cast<double>(trace.size());
}
BENCHMARK_CAPTURE(BM_Run, scorp, Protocol::Scorp);
BENCHMARK_CAPTURE(BM_Run, dlife, Protocol::Dlife);
BENCHMARK_CAPTURE(BM_Run, bubble, Protocol::BubbleRap);
BENCHMARK_CAPTURE(BM_Run, snw, Protocol::SprayWait);
