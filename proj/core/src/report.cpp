#include "oppsim/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace oppsim {

namespace {

// two-sided 95% Student-t quantiles for df 1..30, then the normal value
constexpr double kT95[] = {12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306,
                           2.262,  2.228, 2.201, 2.179, 2.160, 2.145, 2.131, 2.120,
                           2.110,  2.101, 2.093, 2.086, 2.080, 2.074, 2.069, 2.064,
                           2.060,  2.056, 2.052, 2.048, 2.045, 2.042};

double z95(CiMethod method, int n) {
  if (method == CiMethod::Normal || n < 2) return 1.96;
  int df = n - 1;
  return df <= 30 ? kT95[df - 1] : 1.96;
}

std::string g6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

Stat mean_ci95(const std::vector<double>& values, CiMethod method) {
  if (values.empty()) throw EmptyInput();
  Stat s;
  s.n = static_cast<int>(values.size());
  double sum = 0;
  for (double v : values) sum += v;
  s.mean = sum / s.n;
  if (s.n > 1) {
    double ss = 0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    double stddev = std::sqrt(ss / (s.n - 1));
    s.ci_half_width = z95(method, s.n) * stddev / std::sqrt(static_cast<double>(s.n));
  }
  return s;
}

MetricsSummary summarize(const std::vector<RunResult>& results, CiMethod method) {
  if (results.empty()) throw EmptyInput();
  for (const auto& r : results)
    if (r.config_echo != results.front().config_echo) throw MixedScenarios();

  MetricsSummary out;
  out.runs = static_cast<int>(results.size());
  out.expected = results.front().expected;

  std::vector<double> dp, cost, latency, dttl, devict, dnofit;
  for (const auto& r : results) {
    if (r.deliveries.size() > r.expected)
      throw std::invalid_argument("run delivered more than its expected count");
    double deliveries = static_cast<double>(r.deliveries.size());
    dp.push_back(r.expected > 0 ? deliveries / static_cast<double>(r.expected) : 0.0);
    dttl.push_back(static_cast<double>(r.drops_ttl));
    devict.push_back(static_cast<double>(r.drops_evicted));
    dnofit.push_back(static_cast<double>(r.drops_nofit));
    if (r.deliveries.empty()) {
      ++out.zero_delivery_runs;  // dp counts the zero; ratios are undefined
      continue;
    }
    cost.push_back(static_cast<double>(r.forwardings) / deliveries);
    double total_latency = 0;
    for (const auto& d : r.deliveries) total_latency += d.latency();
    latency.push_back(total_latency / deliveries);
  }
  out.delivery_probability = mean_ci95(dp, method);
  if (!cost.empty()) {
    out.cost = mean_ci95(cost, method);
    out.latency_s = mean_ci95(latency, method);
  }
  out.drops_ttl_mean = mean_ci95(dttl, method).mean;
  out.drops_evicted_mean = mean_ci95(devict, method).mean;
  out.drops_nofit_mean = mean_ci95(dnofit, method).mean;
  return out;
}

std::uint64_t teci_alloc_bits(std::uint64_t interests, std::uint64_t time_slots,
                              std::uint64_t bits_per_variable) {
  if (interests < 1 || time_slots < 1 || bits_per_variable < 1)
    throw std::invalid_argument("teci_alloc arguments must be >= 1");
  unsigned __int128 bits = static_cast<unsigned __int128>(interests) * (time_slots + 2);
  bits *= bits_per_variable;
  if (bits > UINT64_MAX) throw Overflow();
  return static_cast<std::uint64_t>(bits);
}

double bits_to_kib(std::uint64_t bits) { return static_cast<double>(bits) / 8.0 / 1024.0; }

double bits_to_gib(std::uint64_t bits) {
  return static_cast<double>(bits) / 8.0 / (1024.0 * 1024.0 * 1024.0);
}

double buffer_estimate_bytes(double forwardings, double days, double nodes,
                             double avg_msg_bytes) {
  if (forwardings == 0) return 0;
  if (!(forwardings > 0) || !(days > 0) || !(nodes > 0) || !(avg_msg_bytes > 0))
    throw std::invalid_argument("buffer_estimate arguments must be positive");
  return forwardings / (days * nodes) * avg_msg_bytes;
}

double bytes_to_mb_decimal(double bytes) { return bytes / 1e6; }

const char* kCsvHeader =
    "scenario,protocol,ttl,msg_int,dp_mean,dp_ci,cost_mean,cost_ci,lat_mean_s,lat_ci,"
    "runs,drops_ttl,drops_evict,expected";

void write_csv(std::ostream& os, const std::vector<CsvRow>& rows) {
  os << kCsvHeader << '\n';
  for (const auto& row : rows) {
    const auto& m = row.metrics;
    os << row.scenario << ',' << row.protocol << ',' << g6(row.ttl_days) << ',' << row.msg_int
       << ',' << g6(m.delivery_probability.mean) << ',' << g6(m.delivery_probability.ci_half_width)
       << ',';
    if (m.cost.n > 0)
      os << g6(m.cost.mean) << ',' << g6(m.cost.ci_half_width) << ',' << g6(m.latency_s.mean)
         << ',' << g6(m.latency_s.ci_half_width);
    else
      os << ",,,";  // no run delivered anything
    os << ',' << m.runs << ',' << g6(m.drops_ttl_mean) << ',' << g6(m.drops_evicted_mean) << ','
       << m.expected << '\n';
  }
}

void write_metadata(std::ostream& os,
                    const std::vector<std::pair<std::string, std::string>>& entries) {
  auto sorted = entries;
  std::sort(sorted.begin(), sorted.end());
  for (const auto& [key, value] : sorted) os << key << '=' << value << '\n';
}

}  // namespace oppsim
