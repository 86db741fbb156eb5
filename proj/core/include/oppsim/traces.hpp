#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "oppsim/types.hpp"

namespace oppsim {

struct ParseError : std::runtime_error {
  ParseError(int line, const std::string& what)
      : std::runtime_error("trace line " + std::to_string(line) + ": " + what), line(line) {}
  int line;
};

// Reads lines of `a b start end` (whitespace separated, `#` starts a
// comment, blank lines ignored). Records are canonicalized to a < b, sorted
// by start time, and same-pair intervals that overlap or touch are merged.
std::vector<Contact> parse_trace(std::istream& in);

std::vector<Contact> load_trace_file(const std::string& path);

// Canonicalizes an arbitrary contact list the same way parse_trace does.
std::vector<Contact> canonicalize(std::vector<Contact> records);

// Emits canonical records as `a b start end` with times at millisecond
// precision. parse(serialize(t)) == t for canonical traces.
void serialize_trace(std::ostream& out, const std::vector<Contact>& records);

struct SyntheticGroup {
  std::vector<NodeId> members;
  double intra_rate_per_hour = 0;  // contact arrivals between two members
  double inter_rate_per_hour = 0;  // toward members of other groups
};

struct SyntheticConfig {
  std::uint32_t nodes = 0;
  int days = 1;
  std::uint64_t seed = 0;
  std::vector<SyntheticGroup> groups;
  // Seconds-of-day windows during which contacts may start, e.g. one
  // 8-hour working window. Empty means the whole day.
  std::vector<std::pair<double, double>> active_windows;
  double duration_min_s = 60;
  double duration_max_s = 600;
};

// Poisson contact arrivals per node pair inside each active window, with
// uniform durations clipped to the window. Fully determined by the seed:
// every pair draws from its own substream, so the output is independent of
// generation order.
std::vector<Contact> generate_synthetic(const SyntheticConfig& config);

struct EmptyTrace : std::runtime_error {
  EmptyTrace() : std::runtime_error("empty trace") {}
};

struct TraceStats {
  std::size_t contacts = 0;
  double span_hours = 0;
  double contacts_per_hour = 0;
  std::map<std::pair<NodeId, NodeId>, double> per_pair_total_s;
  // duration histogram: parallel arrays of upper edges (seconds) and counts;
  // the last bucket is open-ended
  std::vector<double> histogram_edges_s;
  std::vector<std::size_t> histogram_counts;
};

TraceStats trace_stats(const std::vector<Contact>& records);

}  // namespace oppsim
