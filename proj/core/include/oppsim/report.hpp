#pragma once

#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "oppsim/engine.hpp"

namespace oppsim {

struct EmptyInput : std::runtime_error {
  EmptyInput() : std::runtime_error("no runs to summarize") {}
};
struct MixedScenarios : std::runtime_error {
  MixedScenarios() : std::runtime_error("runs come from different scenarios") {}
};
struct Overflow : std::overflow_error {
  Overflow() : std::overflow_error("allocation size overflows 64 bits") {}
};

enum class CiMethod { Normal, StudentT };

struct Stat {
  double mean = 0;
  double ci_half_width = 0;  // 95% interval half width; 0 when n == 1
  int n = 0;

  double lower() const { return mean - ci_half_width; }
  double upper() const { return mean + ci_half_width; }
};

// mean and 95% CI half-width of a sample; n == 1 collapses to the point
Stat mean_ci95(const std::vector<double>& values, CiMethod method = CiMethod::Normal);

struct MetricsSummary {
  Stat delivery_probability;  // over all runs
  Stat cost;                  // replicas per delivered message; zero-delivery runs excluded
  Stat latency_s;             // mean seconds per delivery; zero-delivery runs excluded
  int runs = 0;
  int zero_delivery_runs = 0;
  double drops_ttl_mean = 0;
  double drops_evicted_mean = 0;
  double drops_nofit_mean = 0;
  std::uint64_t expected = 0;
};

// Aggregates per-seed runs of one sweep point. All runs must share a
// scenario (their config echoes must match).
MetricsSummary summarize(const std::vector<RunResult>& results,
                         CiMethod method = CiMethod::Normal);

// Worst-case social-state footprint for m interests over k time slots with
// x-bit variables: m*(k+2)*x bits. Overflow-checked.
std::uint64_t teci_alloc_bits(std::uint64_t interests, std::uint64_t time_slots,
                              std::uint64_t bits_per_variable);

// binary units for the allocation figure
double bits_to_kib(std::uint64_t bits);
double bits_to_gib(std::uint64_t bits);

// Estimated steady-state buffer occupancy per node given total forwardings:
// forwardings / (days * nodes) * average message size, in bytes.
double buffer_estimate_bytes(double forwardings, double days, double nodes,
                             double avg_msg_bytes);
double bytes_to_mb_decimal(double bytes);

// One aggregated sweep point, as written to the results CSV.
struct CsvRow {
  std::string scenario;
  std::string protocol;
  double ttl_days = 0;
  int msg_int = 0;
  MetricsSummary metrics;
};

extern const char* kCsvHeader;

// `%.6g` numeric rendering, header mandatory, cost/latency empty when no
// run of the point delivered anything.
void write_csv(std::ostream& os, const std::vector<CsvRow>& rows);

// key=value lines, sorted by key
void write_metadata(std::ostream& os,
                    const std::vector<std::pair<std::string, std::string>>& entries);

}  // namespace oppsim
