#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "oppsim/engine.hpp"
#include "oppsim/report.hpp"
#include "oppsim/traces.hpp"

namespace oppsim {

struct SpecError : std::runtime_error {
  explicit SpecError(const std::string& what) : std::runtime_error(what) {}
};

// One source node sends to every other node. The msg_int sweep axis sets,
// per destination, the number of distinct messages (source-driven runs) or
// the number of interests per receiver (receiver-driven runs), which keeps
// the expected delivery count identical across protocol families.
struct FanoutTraffic {
  NodeId source = 0;
  std::map<int, double> rate_per_day;  // keyed by msg_int; missing -> default
  double default_rate_per_day = 35;
};

struct FlowsTraffic {
  struct Flow {
    NodeId src = 0;
    NodeId dst = 0;
    int count = 1;
  };
  std::vector<Flow> flows;
  double rate_per_day = 35;
};

// Explicit receiver-driven traffic: content-tagged messages plus per-node
// interest lists.
struct ContentTraffic {
  std::vector<PlannedMessage> messages;
  std::map<NodeId, std::set<InterestId>> interests;
};

// Load-equalized traffic with a target expected-delivery count. The
// receiver-driven side creates `unique_types` one-type messages and assigns
// interests round-robin until exactly `target_expected` (message,
// interested-node) pairs exist; the source-driven side sends
// `target_expected` messages round-robin over the receivers.
struct GroupContentTraffic {
  NodeId source = 0;
  int unique_types = 0;
  std::uint64_t target_expected = 0;
  double rate_per_day = 35;
  double created_at_s = 0;  // receiver-driven creation instant
};

using TrafficSpec = std::variant<FanoutTraffic, FlowsTraffic, ContentTraffic, GroupContentTraffic>;

struct ExperimentSpec {
  std::string name = "experiment";
  std::uint32_t nodes = 0;
  double duration_days = 0;
  std::vector<Protocol> protocols;
  std::vector<double> ttl_days;
  std::vector<int> msg_int{0};  // 0 = axis not applicable
  int seeds = 1;
  std::uint64_t seed_base = 1;
  std::optional<std::uint64_t> buffer_bytes = 2000000;
  std::map<NodeId, std::optional<std::uint64_t>> buffer_overrides;
  std::uint64_t msg_size_min = 1000;
  std::uint64_t msg_size_max = 100000;
  std::optional<double> bandwidth_bytes_per_sec;
  TrafficSpec traffic;
  std::optional<std::filesystem::path> trace_file;  // resolved against the spec's directory
  std::optional<SyntheticConfig> synthetic;
  ProtocolParams params;
  CiMethod ci = CiMethod::Normal;

  double duration_s() const { return duration_days * kSecondsPerDay; }
};

// Parses the JSON experiment file. Field problems throw SpecError naming
// the offending key.
ExperimentSpec load_spec(const std::filesystem::path& path);

struct Diagnostic {
  enum class Severity { Error, Warning };
  Severity severity = Severity::Error;
  std::string message;
};

// Full dry-run check: every error and warning, nothing executed.
std::vector<Diagnostic> validate_spec(const ExperimentSpec& spec);

// Resolves one sweep point into a runnable scenario (traffic built for the
// protocol's family, equalized by msg_int).
Scenario make_scenario(const ExperimentSpec& spec, Protocol protocol, double ttl_days,
                       int msg_int);

// Trace for one seed: the clipped trace file, or a synthetic trace drawn
// from a seed-specific substream.
std::vector<Contact> trace_for_seed(const ExperimentSpec& spec, std::uint64_t seed);

struct ExperimentOutput {
  std::filesystem::path csv_path;
  std::filesystem::path metadata_path;
  std::vector<CsvRow> rows;
};

// Runs every (protocol x ttl x msg_int) point with `seeds` runs each,
// aggregates, and writes results.csv plus metadata.txt under out_dir.
// Deterministic for a given spec and seed base regardless of job count.
// Partial outputs are removed on failure.
ExperimentOutput run_experiment(const ExperimentSpec& spec, const std::filesystem::path& out_dir,
                                int jobs, std::optional<std::uint64_t> seed_base_override,
                                std::ostream* progress);

}  // namespace oppsim
