#include "oppsim/traces.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "oppsim/rng.hpp"

namespace oppsim {

std::vector<Contact> parse_trace(std::istream& in) {
  std::vector<Contact> records;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    long long a, b;
    double start, end;
    if (!(fields >> a)) continue;  // blank or comment-only line
    if (!(fields >> b >> start >> end)) throw ParseError(lineno, "expected `a b start end`");
    std::string extra;
    if (fields >> extra) throw ParseError(lineno, "trailing field `" + extra + "`");
    if (a < 0 || b < 0) throw ParseError(lineno, "negative node id");
    if (a == b) throw ParseError(lineno, "self contact");
    if (start < 0) throw ParseError(lineno, "negative start time");
    if (!(start < end)) throw ParseError(lineno, "start >= end");
    records.push_back(make_contact(static_cast<NodeId>(a), static_cast<NodeId>(b), start, end));
  }
  return canonicalize(std::move(records));
}

std::vector<Contact> load_trace_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open " + path);
  return parse_trace(in);
}

std::vector<Contact> canonicalize(std::vector<Contact> records) {
  for (auto& r : records)
    if (r.a > r.b) std::swap(r.a, r.b);
  std::sort(records.begin(), records.end(), [](const Contact& x, const Contact& y) {
    return std::tie(x.a, x.b, x.start, x.end) < std::tie(y.a, y.b, y.start, y.end);
  });
  // merge overlapping or touching intervals of the same pair
  std::vector<Contact> merged;
  for (const auto& r : records) {
    if (!merged.empty() && merged.back().a == r.a && merged.back().b == r.b &&
        r.start <= merged.back().end) {
      merged.back().end = std::max(merged.back().end, r.end);
    } else {
      merged.push_back(r);
    }
  }
  std::sort(merged.begin(), merged.end(), [](const Contact& x, const Contact& y) {
    return std::tie(x.start, x.end, x.a, x.b) < std::tie(y.start, y.end, y.a, y.b);
  });
  return merged;
}

void serialize_trace(std::ostream& out, const std::vector<Contact>& records) {
  char buf[128];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof buf, "%u %u %.3f %.3f\n", r.a, r.b, r.start, r.end);
    out << buf;
  }
}

std::vector<Contact> generate_synthetic(const SyntheticConfig& config) {
  std::vector<std::pair<double, double>> windows = config.active_windows;
  if (windows.empty()) windows.push_back({0.0, kSecondsPerDay});

  // group id per node; UINT32_MAX = ungrouped (never generates contacts)
  std::vector<std::uint32_t> group_of(config.nodes, UINT32_MAX);
  for (std::uint32_t g = 0; g < config.groups.size(); ++g)
    for (NodeId n : config.groups[g].members) group_of.at(n) = g;

  std::vector<Contact> records;
  for (NodeId a = 0; a < config.nodes; ++a) {
    for (NodeId b = a + 1; b < config.nodes; ++b) {
      if (group_of[a] == UINT32_MAX || group_of[b] == UINT32_MAX) continue;
      const auto& ga = config.groups[group_of[a]];
      const auto& gb = config.groups[group_of[b]];
      double rate_per_hour = group_of[a] == group_of[b]
                                 ? ga.intra_rate_per_hour
                                 : 0.5 * (ga.inter_rate_per_hour + gb.inter_rate_per_hour);
      if (rate_per_hour <= 0) continue;
      double rate = rate_per_hour / 3600.0;
      Rng rng(mix_seed(config.seed, (static_cast<std::uint64_t>(a) << 32) | b));
      for (int day = 0; day < config.days; ++day) {
        for (const auto& [wstart, wend] : windows) {
          double t = day * kSecondsPerDay + wstart;
          double window_end = day * kSecondsPerDay + wend;
          for (;;) {
            t += rng.exponential(rate);
            if (t >= window_end) break;
            double dur = rng.uniform(config.duration_min_s, config.duration_max_s);
            double end = std::min(t + dur, window_end);
            if (end > t) records.push_back({a, b, t, end});
          }
        }
      }
    }
  }
  return canonicalize(std::move(records));
}

TraceStats trace_stats(const std::vector<Contact>& records) {
  if (records.empty()) throw EmptyTrace();
  TraceStats stats;
  stats.contacts = records.size();
  double first = records.front().start, last = 0;
  for (const auto& r : records) {
    first = std::min(first, r.start);
    last = std::max(last, r.end);
    stats.per_pair_total_s[{r.a, r.b}] += r.duration();
  }
  stats.span_hours = (last - first) / 3600.0;
  stats.contacts_per_hour =
      stats.span_hours > 0 ? static_cast<double>(stats.contacts) / stats.span_hours : 0.0;
  stats.histogram_edges_s = {30, 60, 120, 300, 600, 1800, 3600};
  stats.histogram_counts.assign(stats.histogram_edges_s.size() + 1, 0);
  for (const auto& r : records) {
    std::size_t bucket = 0;
    while (bucket < stats.histogram_edges_s.size() &&
           r.duration() > stats.histogram_edges_s[bucket])
      ++bucket;
    ++stats.histogram_counts[bucket];
  }
  return stats;
}

}  // namespace oppsim
