#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "oppsim/protocols.hpp"
#include "oppsim/types.hpp"

namespace oppsim {

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct TraceError : std::runtime_error {
  explicit TraceError(const std::string& what) : std::runtime_error(what) {}
};

// A message the scenario will create: its size is drawn per run seed, its
// creation time is part of the scenario. Message ids are assigned in
// schedule order.
struct PlannedMessage {
  NodeId source = 0;
  Addressing addressing;
  SimTime created_at = 0;
};

// Full description of one simulation run, already resolved to a single
// protocol, TTL and traffic schedule (experiment sweeps produce one
// Scenario per sweep point).
struct Scenario {
  std::string name = "scenario";
  std::uint32_t nodes = 0;
  Protocol protocol = Protocol::Scorp;
  ProtocolParams params;
  std::vector<std::set<InterestId>> interests;  // one set per node
  std::vector<PlannedMessage> traffic;
  double ttl_s = 86400;
  std::optional<std::uint64_t> buffer_bytes = 2000000;  // nullopt = unlimited
  std::map<NodeId, std::optional<std::uint64_t>> buffer_overrides;
  std::uint64_t msg_size_min = 1000;
  std::uint64_t msg_size_max = 100000;
  std::optional<double> bandwidth_bytes_per_sec;  // nullopt = instantaneous
  double duration_s = 0;
  bool audit = true;

  double sample_duration_s() const { return kSecondsPerDay / params.samples_per_day; }
  bool receiver_driven() const { return protocol == Protocol::Scorp; }

  // Sorted key=value view of every parameter, used for result metadata and
  // the mixed-scenario guard when aggregating runs.
  std::vector<std::pair<std::string, std::string>> echo() const;
};

// Throws ConfigError explaining the first problem found.
void validate_scenario(const Scenario& scenario);

// Messages that should reach a destination or an interested node: the
// traffic count for source-driven runs, the number of (message, interested
// node != source) pairs for receiver-driven ones.
std::uint64_t expected_deliveries(const Scenario& scenario);

// One completed message hop (audit mode only).
struct TransferRecord {
  MessageId message_id = 0;
  NodeId from = 0;
  NodeId to = 0;
  SimTime completed_at = 0;
};

struct RunAudit {
  std::uint64_t decisions_to_holders = 0;   // actions targeting a peer that had the message
  std::uint64_t buffer_violations = 0;      // occupancy observed above capacity
  std::uint32_t max_copies_per_message = 0; // Spray and Wait copy-sum high-water mark
  std::map<MessageId, std::uint32_t> final_copy_sums;  // Spray and Wait, at end of run
};

struct RunResult {
  std::vector<DeliveryRecord> deliveries;
  std::uint64_t forwardings = 0;  // completed replicas, deliveries included
  std::uint64_t drops_ttl = 0;
  std::uint64_t drops_evicted = 0;
  std::uint64_t drops_nofit = 0;
  std::uint64_t expected = 0;
  std::vector<std::uint64_t> peak_buffer_occupancy;  // per node
  std::vector<std::pair<std::string, std::string>> config_echo;
  std::vector<TransferRecord> transfers;  // populated when scenario.audit
  RunAudit audit;
};

// Replays the contact trace through the selected protocol. Deterministic:
// identical (scenario, trace, seed) gives identical results. The trace must
// be canonical (see traces.hpp) and lie within [0, duration].
RunResult run(const Scenario& scenario, const std::vector<Contact>& trace, std::uint64_t seed);

struct CausalityReport {
  bool ok = true;
  std::string diagnostic;
};

// Post-run check that every recorded hop happened inside a trace contact
// interval and that every delivery is reachable from the message source
// through time-ordered hops.
CausalityReport validate_causality(const RunResult& result, const Scenario& scenario,
                                   const std::vector<Contact>& trace);

}  // namespace oppsim
