#include "oppsim/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "oppsim/rng.hpp"

namespace oppsim {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& what) { throw SpecError(what); }

const json& need(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) bad(std::string("missing field `") + key + "`");
  return *it;
}

std::optional<std::uint64_t> parse_capacity(const json& j, const char* key) {
  if (j.is_string()) {
    if (j.get<std::string>() == "unlimited") return std::nullopt;
    bad(std::string(key) + ": expected a byte count or \"unlimited\"");
  }
  if (!j.is_number_unsigned()) bad(std::string(key) + ": expected a byte count");
  return j.get<std::uint64_t>();
}

TrafficSpec parse_traffic(const json& j) {
  std::string kind = need(j, "kind").get<std::string>();
  if (kind == "fanout") {
    FanoutTraffic t;
    t.source = need(j, "source").get<NodeId>();
    if (auto it = j.find("rate_per_day"); it != j.end()) {
      if (it->is_number()) {
        t.default_rate_per_day = it->get<double>();
      } else {
        for (const auto& [key, value] : it->items())
          t.rate_per_day[std::stoi(key)] = value.get<double>();
      }
    }
    return t;
  }
  if (kind == "flows") {
    FlowsTraffic t;
    for (const auto& f : need(j, "flows")) {
      t.flows.push_back({need(f, "src").get<NodeId>(), need(f, "dst").get<NodeId>(),
                         f.value("count", 1)});
    }
    t.rate_per_day = j.value("rate_per_day", 35.0);
    return t;
  }
  if (kind == "content") {
    ContentTraffic t;
    for (const auto& m : need(j, "messages")) {
      PlannedMessage p;
      p.source = need(m, "src").get<NodeId>();
      p.addressing = ContentAddress{need(m, "type").get<InterestId>()};
      p.created_at = m.value("created_at_s", 0.0);
      t.messages.push_back(p);
    }
    for (const auto& [node, list] : need(j, "interests").items()) {
      std::set<InterestId>& s = t.interests[static_cast<NodeId>(std::stoul(node))];
      for (const auto& x : list) s.insert(x.get<InterestId>());
    }
    return t;
  }
  if (kind == "group_content") {
    GroupContentTraffic t;
    t.source = need(j, "source").get<NodeId>();
    t.unique_types = need(j, "unique_types").get<int>();
    t.target_expected = need(j, "target_expected").get<std::uint64_t>();
    t.rate_per_day = j.value("rate_per_day", 35.0);
    t.created_at_s = j.value("created_at_s", 0.0);
    return t;
  }
  bad("traffic.kind must be fanout, flows, content or group_content");
}

SyntheticConfig parse_synthetic(const json& j, std::uint32_t nodes, double duration_days) {
  SyntheticConfig c;
  c.nodes = nodes;
  c.days = j.value("days", static_cast<int>(std::ceil(duration_days)));
  c.seed = j.value("seed", 0ULL);
  for (const auto& g : need(j, "groups")) {
    SyntheticGroup group;
    for (const auto& m : need(g, "members")) group.members.push_back(m.get<NodeId>());
    group.intra_rate_per_hour = g.value("intra_rate_per_hour", 0.0);
    group.inter_rate_per_hour = g.value("inter_rate_per_hour", 0.0);
    c.groups.push_back(group);
  }
  if (auto it = j.find("active_windows"); it != j.end()) {
    for (const auto& w : *it) c.active_windows.push_back({w.at(0), w.at(1)});
  }
  if (auto it = j.find("contact_duration_s"); it != j.end()) {
    c.duration_min_s = need(*it, "min").get<double>();
    c.duration_max_s = need(*it, "max").get<double>();
  }
  return c;
}

}  // namespace

ExperimentSpec load_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open spec file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    bad("spec is not valid JSON: " + std::string(e.what()));
  }
  ExperimentSpec spec;
  try {
    spec.name = j.value("name", path.stem().string());
    spec.nodes = need(j, "nodes").get<std::uint32_t>();
    spec.duration_days = need(j, "duration_days").get<double>();
    for (const auto& p : need(j, "protocols"))
      spec.protocols.push_back(protocol_from_name(p.get<std::string>()));
    for (const auto& t : need(j, "ttl_days")) spec.ttl_days.push_back(t.get<double>());
    if (auto it = j.find("msg_int"); it != j.end()) {
      spec.msg_int.clear();
      for (const auto& m : *it) spec.msg_int.push_back(m.get<int>());
    }
    spec.seeds = j.value("seeds", 1);
    spec.seed_base = j.value("seed_base", 1ULL);
    if (auto it = j.find("buffer_bytes"); it != j.end())
      spec.buffer_bytes = parse_capacity(*it, "buffer_bytes");
    if (auto it = j.find("buffer_overrides"); it != j.end()) {
      for (const auto& [node, cap] : it->items())
        spec.buffer_overrides[static_cast<NodeId>(std::stoul(node))] =
            parse_capacity(cap, "buffer_overrides");
    }
    if (auto it = j.find("message_size_bytes"); it != j.end()) {
      spec.msg_size_min = need(*it, "min").get<std::uint64_t>();
      spec.msg_size_max = need(*it, "max").get<std::uint64_t>();
    }
    if (auto it = j.find("transfer"); it != j.end()) {
      if (it->is_string() && it->get<std::string>() == "instant") {
        spec.bandwidth_bytes_per_sec.reset();
      } else if (it->is_object()) {
        spec.bandwidth_bytes_per_sec = need(*it, "bandwidth_bytes_per_sec").get<double>();
      } else {
        bad("transfer: expected \"instant\" or {bandwidth_bytes_per_sec: N}");
      }
    }
    spec.traffic = parse_traffic(need(j, "traffic"));
    const json& trace = need(j, "trace");
    if (auto it = trace.find("file"); it != trace.end()) {
      std::filesystem::path p = it->get<std::string>();
      spec.trace_file = p.is_absolute() ? p : path.parent_path() / p;
    } else if (auto syn = trace.find("synthetic"); syn != trace.end()) {
      spec.synthetic = parse_synthetic(*syn, spec.nodes, spec.duration_days);
    } else {
      bad("trace: expected {file: path} or {synthetic: {...}}");
    }
    if (auto it = j.find("params"); it != j.end()) {
      spec.params.snw_copies = it->value("snw_copies", spec.params.snw_copies);
      spec.params.kclique_k = it->value("kclique_k", spec.params.kclique_k);
      spec.params.familiar_threshold_s =
          it->value("familiar_threshold_s", spec.params.familiar_threshold_s);
      spec.params.centrality_window_s =
          it->value("centrality_window_s", spec.params.centrality_window_s);
      spec.params.dlife_alpha = it->value("dlife_alpha", spec.params.dlife_alpha);
      spec.params.samples_per_day = it->value("samples_per_day", spec.params.samples_per_day);
    }
    std::string ci = j.value("ci", "normal");
    if (ci == "normal") spec.ci = CiMethod::Normal;
    else if (ci == "student_t") spec.ci = CiMethod::StudentT;
    else bad("ci must be normal or student_t");
  } catch (const json::exception& e) {
    bad("spec field error: " + std::string(e.what()));
  }
  return spec;
}

namespace {

std::vector<NodeId> receivers_of(const ExperimentSpec& spec, NodeId source) {
  std::vector<NodeId> out;
  for (NodeId n = 0; n < spec.nodes; ++n)
    if (n != source) out.push_back(n);
  return out;
}

void build_fanout(const ExperimentSpec& spec, const FanoutTraffic& t, Protocol protocol,
                  int msg_int, Scenario& sc) {
  auto receivers = receivers_of(spec, t.source);
  auto r_count = receivers.size();
  double rate = t.default_rate_per_day;
  if (auto it = t.rate_per_day.find(msg_int); it != t.rate_per_day.end()) rate = it->second;
  if (protocol == Protocol::Scorp) {
    // one message per receiver-count type, created once; interests rotate
    for (std::size_t j = 0; j < r_count; ++j) {
      PlannedMessage m;
      m.source = t.source;
      m.addressing = ContentAddress{static_cast<InterestId>(j)};
      m.created_at = 0;
      sc.traffic.push_back(m);
    }
    for (std::size_t idx = 0; idx < r_count; ++idx)
      for (int i = 0; i < msg_int; ++i)
        sc.interests[receivers[idx]].insert(
            static_cast<InterestId>((idx + static_cast<std::size_t>(i)) % r_count));
  } else {
    // msg_int messages per destination, round-robin, evenly spaced at `rate`
    std::size_t total = r_count * static_cast<std::size_t>(msg_int);
    double spacing = kSecondsPerDay / rate;
    for (std::size_t k = 0; k < total; ++k) {
      PlannedMessage m;
      m.source = t.source;
      m.addressing = DestinationAddress{receivers[k % r_count]};
      m.created_at = static_cast<double>(k) * spacing;
      sc.traffic.push_back(m);
    }
  }
}

void build_flows(const FlowsTraffic& t, Scenario& sc) {
  double spacing = kSecondsPerDay / t.rate_per_day;
  std::size_t k = 0;
  int remaining = 0;
  for (const auto& f : t.flows) remaining += f.count;
  std::vector<int> left;
  for (const auto& f : t.flows) left.push_back(f.count);
  while (remaining > 0) {  // round-robin over flows
    for (std::size_t i = 0; i < t.flows.size(); ++i) {
      if (left[i] == 0) continue;
      PlannedMessage m;
      m.source = t.flows[i].src;
      m.addressing = DestinationAddress{t.flows[i].dst};
      m.created_at = static_cast<double>(k++) * spacing;
      sc.traffic.push_back(m);
      --left[i];
      --remaining;
    }
  }
}

void build_group_content(const ExperimentSpec& spec, const GroupContentTraffic& t,
                         Protocol protocol, Scenario& sc) {
  auto receivers = receivers_of(spec, t.source);
  if (protocol == Protocol::Scorp) {
    for (int j = 0; j < t.unique_types; ++j) {
      PlannedMessage m;
      m.source = t.source;
      m.addressing = ContentAddress{static_cast<InterestId>(j)};
      m.created_at = t.created_at_s;
      sc.traffic.push_back(m);
    }
    // one (message, interested node) pair per step until the target holds
    std::uint64_t pairs = 0;
    std::vector<int> assigned(receivers.size(), 0);
    std::size_t idx = 0;
    while (pairs < t.target_expected) {
      if (assigned[idx] < t.unique_types) {
        auto type = static_cast<InterestId>((idx + static_cast<std::size_t>(assigned[idx])) %
                                            static_cast<std::size_t>(t.unique_types));
        sc.interests[receivers[idx]].insert(type);
        ++assigned[idx];
        ++pairs;
      }
      idx = (idx + 1) % receivers.size();
    }
  } else {
    double spacing = kSecondsPerDay / t.rate_per_day;
    for (std::uint64_t k = 0; k < t.target_expected; ++k) {
      PlannedMessage m;
      m.source = t.source;
      m.addressing = DestinationAddress{receivers[k % receivers.size()]};
      m.created_at = static_cast<double>(k) * spacing;
      sc.traffic.push_back(m);
    }
  }
}

}  // namespace

Scenario make_scenario(const ExperimentSpec& spec, Protocol protocol, double ttl_days,
                       int msg_int) {
  Scenario sc;
  sc.name = spec.name;
  sc.nodes = spec.nodes;
  sc.protocol = protocol;
  sc.params = spec.params;
  sc.interests.assign(spec.nodes, {});
  sc.ttl_s = ttl_days * kSecondsPerDay;
  sc.buffer_bytes = spec.buffer_bytes;
  sc.buffer_overrides = spec.buffer_overrides;
  sc.msg_size_min = spec.msg_size_min;
  sc.msg_size_max = spec.msg_size_max;
  sc.bandwidth_bytes_per_sec = spec.bandwidth_bytes_per_sec;
  sc.duration_s = spec.duration_s();
  sc.audit = false;  // no transfer log during sweeps

  if (const auto* fanout = std::get_if<FanoutTraffic>(&spec.traffic)) {
    build_fanout(spec, *fanout, protocol, msg_int, sc);
  } else if (const auto* flows = std::get_if<FlowsTraffic>(&spec.traffic)) {
    build_flows(*flows, sc);
  } else if (const auto* content = std::get_if<ContentTraffic>(&spec.traffic)) {
    sc.traffic = content->messages;
    for (const auto& [node, set] : content->interests)
      if (node < spec.nodes) sc.interests[node] = set;
  } else if (const auto* group = std::get_if<GroupContentTraffic>(&spec.traffic)) {
    build_group_content(spec, *group, protocol, sc);
  }
  return sc;
}

std::vector<Contact> trace_for_seed(const ExperimentSpec& spec, std::uint64_t seed) {
  std::vector<Contact> trace;
  if (spec.trace_file) {
    trace = load_trace_file(spec.trace_file->string());
  } else if (spec.synthetic) {
    SyntheticConfig config = *spec.synthetic;
    config.seed = mix_seed(config.seed, seed);
    trace = generate_synthetic(config);
  }
  // clip to the scenario duration
  double duration = spec.duration_s();
  std::vector<Contact> clipped;
  for (auto c : trace) {
    if (c.start >= duration) continue;
    c.end = std::min(c.end, duration);
    if (c.end > c.start) clipped.push_back(c);
  }
  return clipped;
}

std::vector<Diagnostic> validate_spec(const ExperimentSpec& spec) {
  std::vector<Diagnostic> out;
  auto error = [&](const std::string& m) {
    out.push_back({Diagnostic::Severity::Error, m});
  };
  auto warning = [&](const std::string& m) {
    out.push_back({Diagnostic::Severity::Warning, m});
  };

  if (spec.nodes < 2) error("nodes must be >= 2");
  if (!(spec.duration_days > 0)) error("duration_days must be positive");
  if (spec.protocols.empty()) error("protocols list is empty");
  if (spec.ttl_days.empty()) error("ttl_days list is empty");
  if (spec.msg_int.empty()) error("msg_int list is empty");
  if (spec.seeds < 1) error("seeds must be >= 1");
  if (spec.msg_size_min < 1 || spec.msg_size_min > spec.msg_size_max)
    error("message_size_bytes range invalid");
  if (spec.trace_file && !std::filesystem::exists(*spec.trace_file))
    error("trace file not found: " + spec.trace_file->string());
  if (spec.synthetic) {
    std::vector<bool> covered(spec.nodes, false);
    for (const auto& g : spec.synthetic->groups) {
      if (g.intra_rate_per_hour < 0 || g.inter_rate_per_hour < 0)
        error("synthetic rates must be >= 0");
      for (NodeId n : g.members) {
        if (n >= spec.nodes) error("synthetic group member beyond node count");
        else if (covered[n]) error("node " + std::to_string(n) + " in two synthetic groups");
        else covered[n] = true;
      }
    }
    for (NodeId n = 0; n < spec.nodes; ++n)
      if (!covered[n]) warning("node " + std::to_string(n) + " not in any synthetic group");
    for (const auto& [ws, we] : spec.synthetic->active_windows)
      if (!(ws >= 0 && ws < we && we <= kSecondsPerDay))
        error("active window outside [0, 86400)");
    if (spec.synthetic->duration_min_s > spec.synthetic->duration_max_s)
      error("contact duration min > max");
  }

  const bool source_driven_present =
      std::any_of(spec.protocols.begin(), spec.protocols.end(),
                  [](Protocol p) { return p != Protocol::Scorp; });
  const bool scorp_present =
      std::any_of(spec.protocols.begin(), spec.protocols.end(),
                  [](Protocol p) { return p == Protocol::Scorp; });
  if (const auto* content = std::get_if<ContentTraffic>(&spec.traffic)) {
    if (source_driven_present)
      error("content traffic is receiver-driven; it cannot drive a source-driven protocol");
    for (const auto& [node, set] : content->interests) {
      (void)set;
      if (node >= spec.nodes)
        error("interest list for unknown node " + std::to_string(node));
    }
  }
  if (std::holds_alternative<FlowsTraffic>(spec.traffic) && scorp_present)
    error("flows traffic is destination-addressed; it cannot drive a receiver-driven protocol");

  if (const auto* fanout = std::get_if<FanoutTraffic>(&spec.traffic)) {
    if (fanout->source >= spec.nodes) error("fanout source beyond node count");
    for (int m : spec.msg_int) {
      if (m < 1) error("fanout traffic needs msg_int >= 1");
      else if (static_cast<std::uint32_t>(m) > spec.nodes - 1)
        error("msg_int " + std::to_string(m) + " exceeds receiver count");
    }
  }
  if (const auto* group = std::get_if<GroupContentTraffic>(&spec.traffic)) {
    if (group->unique_types < 1) error("group_content needs unique_types >= 1");
    std::uint64_t max_pairs = static_cast<std::uint64_t>(spec.nodes - 1) *
                              static_cast<std::uint64_t>(group->unique_types);
    if (group->target_expected > max_pairs)
      error("target_expected " + std::to_string(group->target_expected) +
            " unreachable: at most " + std::to_string(max_pairs) + " pairs");
  }

  // cross-check every sweep point against the engine's own validation
  for (Protocol p : spec.protocols) {
    for (double ttl : spec.ttl_days) {
      for (int m : spec.msg_int) {
        try {
          Scenario sc = make_scenario(spec, p, ttl, m);
          validate_scenario(sc);
          if (expected_deliveries(sc) == 0)
            warning("sweep point " + protocol_name(p) + "/ttl=" + std::to_string(ttl) +
                    "/msg_int=" + std::to_string(m) + " expects zero deliveries");
          for (const auto& planned : sc.traffic)
            if (planned.created_at >= sc.duration_s) {
              error("traffic extends past scenario duration at " + protocol_name(p) +
                    "/msg_int=" + std::to_string(m));
              break;
            }
        } catch (const ConfigError& e) {
          error(std::string(e.what()) + " (" + protocol_name(p) + "/ttl=" + std::to_string(ttl) +
                "/msg_int=" + std::to_string(m) + ")");
        }
      }
    }
  }

  if (spec.buffer_bytes && spec.msg_size_min > *spec.buffer_bytes)
    warning("every message exceeds the buffer capacity; all inserts will be NoFit drops");
  else if (spec.buffer_bytes && spec.msg_size_max > *spec.buffer_bytes)
    warning("some messages exceed the buffer capacity and will be NoFit drops");
  return out;
}

namespace {

struct PointKey {
  Protocol protocol;
  double ttl_days;
  int msg_int;
};

}  // namespace

ExperimentOutput run_experiment(const ExperimentSpec& spec, const std::filesystem::path& out_dir,
                                int jobs, std::optional<std::uint64_t> seed_base_override,
                                std::ostream* progress) {
  std::uint64_t seed_base = seed_base_override.value_or(spec.seed_base);

  // trace problems surface first (and as trace errors, not config errors)
  std::vector<std::vector<Contact>> traces;  // per seed, shared by every sweep point
  traces.reserve(static_cast<std::size_t>(std::max(spec.seeds, 0)));
  for (int s = 0; s < spec.seeds; ++s) traces.push_back(trace_for_seed(spec, seed_base + s));

  auto diagnostics = validate_spec(spec);
  for (const auto& d : diagnostics)
    if (d.severity == Diagnostic::Severity::Error) throw SpecError(d.message);

  std::vector<PointKey> points;
  for (Protocol p : spec.protocols)
    for (double ttl : spec.ttl_days)
      for (int m : spec.msg_int) points.push_back({p, ttl, m});

  struct Task {
    std::size_t point;
    int seed_index;
  };
  std::vector<Task> tasks;
  for (std::size_t p = 0; p < points.size(); ++p)
    for (int s = 0; s < spec.seeds; ++s) tasks.push_back({p, s});

  std::vector<std::vector<RunResult>> results(points.size(),
                                              std::vector<RunResult>(spec.seeds));
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex io_mutex;
  std::exception_ptr failure;

  if (jobs < 1) jobs = static_cast<int>(std::thread::hardware_concurrency());
  if (jobs < 1) jobs = 1;
  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      const Task& task = tasks[i];
      const PointKey& point = points[task.point];
      try {
        Scenario sc = make_scenario(spec, point.protocol, point.ttl_days, point.msg_int);
        results[task.point][task.seed_index] =
            run(sc, traces[static_cast<std::size_t>(task.seed_index)],
                seed_base + static_cast<std::uint64_t>(task.seed_index));
      } catch (...) {
        std::lock_guard<std::mutex> lock(io_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
      std::size_t finished = done.fetch_add(1) + 1;
      if (progress) {
        std::lock_guard<std::mutex> lock(io_mutex);
        *progress << "run " << finished << "/" << tasks.size() << " "
                  << protocol_name(point.protocol) << " ttl=" << point.ttl_days
                  << " msg_int=" << point.msg_int << " seed=" << seed_base + task.seed_index
                  << "\n";
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  ExperimentOutput output;
  for (std::size_t p = 0; p < points.size(); ++p) {
    CsvRow row;
    row.scenario = spec.name;
    row.protocol = protocol_name(points[p].protocol);
    row.ttl_days = points[p].ttl_days;
    row.msg_int = points[p].msg_int;
    row.metrics = summarize(results[p], spec.ci);
    output.rows.push_back(row);
  }

  std::filesystem::create_directories(out_dir);
  output.csv_path = out_dir / "results.csv";
  output.metadata_path = out_dir / "metadata.txt";
  std::filesystem::path csv_tmp = out_dir / "results.csv.tmp";
  std::filesystem::path meta_tmp = out_dir / "metadata.txt.tmp";
  try {
    {
      std::ofstream csv(csv_tmp);
      if (!csv) throw SpecError("cannot write " + csv_tmp.string());
      write_csv(csv, output.rows);
    }
    {
      std::ofstream meta(meta_tmp);
      if (!meta) throw SpecError("cannot write " + meta_tmp.string());
      auto entries = make_scenario(spec, spec.protocols.front(), spec.ttl_days.front(),
                                   spec.msg_int.front())
                         .echo();
      entries.emplace_back("spec_name", spec.name);
      entries.emplace_back("seeds", std::to_string(spec.seeds));
      entries.emplace_back("seed_base", std::to_string(seed_base));
      entries.emplace_back("ci_method", spec.ci == CiMethod::Normal ? "normal_z1.96"
                                                                    : "student_t_95");
      entries.emplace_back("trace_source",
                           spec.trace_file ? "file:" + spec.trace_file->string() : "synthetic");
      if (spec.synthetic) {
        entries.emplace_back("synthetic_seed", std::to_string(spec.synthetic->seed));
        entries.emplace_back("synthetic_days", std::to_string(spec.synthetic->days));
        entries.emplace_back("synthetic_groups", std::to_string(spec.synthetic->groups.size()));
      }
      std::ostringstream protocols;
      for (Protocol p : spec.protocols) protocols << protocol_name(p) << ' ';
      entries.emplace_back("protocols", protocols.str());
      std::ostringstream ttls;
      for (double t : spec.ttl_days) ttls << t << ' ';
      entries.emplace_back("ttl_days", ttls.str());
      std::ostringstream loads;
      for (int m : spec.msg_int) loads << m << ' ';
      entries.emplace_back("msg_int", loads.str());
      write_metadata(meta, entries);
    }
    std::filesystem::rename(csv_tmp, output.csv_path);
    std::filesystem::rename(meta_tmp, output.metadata_path);
  } catch (...) {
    std::error_code ec;
    std::filesystem::remove(csv_tmp, ec);
    std::filesystem::remove(meta_tmp, ec);
    std::filesystem::remove(output.csv_path, ec);
    std::filesystem::remove(output.metadata_path, ec);
    throw;
  }
  return output;
}

}  // namespace oppsim
