#include "oppsim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <queue>
#include <tuple>

#include "oppsim/buffer.hpp"
#include "oppsim/rng.hpp"
#include "oppsim/social.hpp"
#include "oppsim/time.hpp"

namespace oppsim {

namespace {

std::string fmt_num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Tie order for simultaneous events: contacts close before samples close,
// samples close before new traffic appears, new contacts come up last among
// state changes, and bandwidth-mode completions run after everything else.
enum class EventKind : int {
  ContactDown = 0,
  SampleBoundary = 1,
  CreateMessage = 2,
  ContactUp = 3,
  TransferComplete = 4,
};

struct Event {
  SimTime time = 0;
  EventKind kind = EventKind::ContactUp;
  std::uint64_t key = 0;     // contact index / message id / boundary or transfer id
  std::uint64_t serial = 0;  // insertion order, final tie break

  auto order() const { return std::make_tuple(time, static_cast<int>(kind), key, serial); }
};

struct EventAfter {
  bool operator()(const Event& x, const Event& y) const { return x.order() > y.order(); }
};

struct QueuedTransfer {
  Message msg;
  NodeId from = 0;
  NodeId to = 0;
  ForwardAction::Kind kind = ForwardAction::Kind::Replicate;
};

struct InFlightTransfer {
  Message msg;
  NodeId from = 0;
  NodeId to = 0;
  ForwardAction::Kind kind = ForwardAction::Kind::Replicate;
  std::uint32_t copies_moved = 0;  // Spray and Wait, already deducted from sender
  std::uint64_t link = 0;          // index into links_
  bool aborted = false;
};

struct LinkState {
  Contact contact;
  SimTime accrued_until = 0;
  std::deque<QueuedTransfer> queue;           // bandwidth mode
  std::optional<std::uint64_t> in_flight;     // index into transfers-in-flight
};

struct NodeState {
  Buffer buffer;
  std::set<MessageId> consumed;
  InterestSocialState interest_state;
  PeerSocialState peer_state;
  CommunityState community;
  CentralityState centrality;
  std::map<MessageId, std::uint32_t> copies;  // Spray and Wait budget per carried message
  std::uint64_t peak_occupancy = 0;

  bool holds(MessageId id) const { return buffer.contains(id) || consumed.count(id) != 0; }
};

class Simulation {
 public:
  Simulation(const Scenario& scenario, const std::vector<Contact>& trace, std::uint64_t seed)
      : sc_(scenario), trace_(trace), rng_(mix_seed(seed, 0x6f707073696dULL)) {}

  RunResult execute();

 private:
  void check_trace() const;
  void seed_events();
  void materialize_messages();

  void on_contact_up(std::size_t index, SimTime now);
  void on_contact_down(std::size_t index, SimTime now);
  void on_sample_boundary(std::uint64_t k, SimTime now);
  void on_create(MessageId id, SimTime now);
  void on_transfer_complete(std::uint64_t tid, SimTime now);

  void accrue_link(LinkState& link, SimTime upto);
  void purge_node(NodeId n, SimTime now);
  void note_removed(NodeId n, const Message& m, std::uint64_t& counter);

  EncounterSummary build_summary(NodeId peer, SimTime now) const;
  std::vector<ForwardAction> decide(NodeId carrier, const std::vector<Message>& carried,
                                    const EncounterSummary& summary) const;
  void evaluate_pair(NodeId carrier, NodeId peer, std::optional<MessageId> only, SimTime now);
  void apply_action(NodeId from, NodeId to, const ForwardAction& action, SimTime now);
  void start_next_transfer(std::uint64_t link_index, SimTime now);
  void transfer_now(NodeId from, NodeId to, const Message& msg, ForwardAction::Kind kind,
                    SimTime now);
  void receive(NodeId to, NodeId from, const Message& msg, ForwardAction::Kind kind,
               std::uint32_t copies_moved, SimTime now);
  void drain_arrivals(SimTime now);

  int current_sample(SimTime now) const {
    return sample_index(now, sc_.params.samples_per_day, sc_.sample_duration_s()).sample;
  }
  std::vector<NodeId> active_peers_of(NodeId n) const;
  void adjust_copy_total(MessageId id, std::int64_t delta);

  const Scenario& sc_;
  const std::vector<Contact>& trace_;
  Rng rng_;

  std::vector<Message> messages_;
  std::vector<NodeState> nodes_;
  std::priority_queue<Event, std::vector<Event>, EventAfter> events_;
  std::uint64_t next_serial_ = 0;
  std::map<std::pair<NodeId, NodeId>, std::uint64_t> active_;  // pair -> link index
  std::vector<LinkState> links_;
  std::vector<InFlightTransfer> flights_;
  std::deque<std::pair<NodeId, MessageId>> arrivals_;
  std::map<MessageId, std::int64_t> copy_total_;  // Spray and Wait audit
  int current_sample_ = 0;                        // sample index for weight queries

  RunResult result_;

  void push(SimTime t, EventKind kind, std::uint64_t key) {
    events_.push(Event{t, kind, key, next_serial_++});
  }
};

void Simulation::check_trace() const {
  std::map<std::pair<NodeId, NodeId>, SimTime> last_end;
  SimTime prev_start = 0;
  for (const auto& c : trace_) {
    if (c.a >= c.b) throw TraceError("trace not canonical (need a < b)");
    if (c.b >= sc_.nodes) throw TraceError("contact references node beyond scenario");
    if (c.start < 0 || !(c.start < c.end)) throw TraceError("bad contact interval");
    if (c.end > sc_.duration_s) throw TraceError("contact extends past scenario duration");
    if (c.start < prev_start) throw TraceError("trace not sorted by start");
    prev_start = c.start;
    auto key = std::make_pair(c.a, c.b);
    auto it = last_end.find(key);
    if (it != last_end.end() && c.start < it->second)
      throw TraceError("overlapping contacts for one pair (trace not merged)");
    last_end[key] = std::max(it == last_end.end() ? 0.0 : it->second, c.end);
  }
}

void Simulation::materialize_messages() {
  messages_.reserve(sc_.traffic.size());
  for (std::size_t i = 0; i < sc_.traffic.size(); ++i) {
    const auto& p = sc_.traffic[i];
    Message m;
    m.id = i;
    m.source = p.source;
    m.addressing = p.addressing;
    m.created_at = p.created_at;
    m.ttl = sc_.ttl_s;
    m.size_bytes = sc_.msg_size_min == sc_.msg_size_max
                       ? sc_.msg_size_min
                       : sc_.msg_size_min + rng_.below(sc_.msg_size_max - sc_.msg_size_min + 1);
    messages_.push_back(m);
  }
}

void Simulation::seed_events() {
  for (std::size_t i = 0; i < trace_.size(); ++i) {
    push(trace_[i].start, EventKind::ContactUp, i);
    push(trace_[i].end, EventKind::ContactDown, i);
  }
  for (const auto& m : messages_) push(m.created_at, EventKind::CreateMessage, m.id);
  double sd = sc_.sample_duration_s();
  auto boundaries = static_cast<std::uint64_t>(std::floor(sc_.duration_s / sd + 1e-9));
  for (std::uint64_t k = 1; k <= boundaries; ++k)
    push(static_cast<double>(k) * sd, EventKind::SampleBoundary, k);
}

RunResult Simulation::execute() {
  validate_scenario(sc_);
  check_trace();
  materialize_messages();

  nodes_.resize(sc_.nodes);
  for (NodeId n = 0; n < sc_.nodes; ++n) {
    auto cap = sc_.buffer_bytes;
    if (auto it = sc_.buffer_overrides.find(n); it != sc_.buffer_overrides.end())
      cap = it->second;
    nodes_[n].buffer = cap ? Buffer(*cap) : Buffer::unlimited();
    nodes_[n].interest_state = InterestSocialState(n, sc_.params.samples_per_day);
    nodes_[n].peer_state = PeerSocialState(n, sc_.params.samples_per_day);
    nodes_[n].community = CommunityState(n, sc_.params.kclique_k, sc_.params.familiar_threshold_s);
    nodes_[n].centrality = CentralityState(n, sc_.params.centrality_window_s);
  }

  seed_events();
  while (!events_.empty()) {
    Event ev = events_.top();
    events_.pop();
    switch (ev.kind) {
      case EventKind::ContactDown: on_contact_down(ev.key, ev.time); break;
      case EventKind::SampleBoundary: on_sample_boundary(ev.key, ev.time); break;
      case EventKind::CreateMessage: on_create(ev.key, ev.time); break;
      case EventKind::ContactUp: on_contact_up(ev.key, ev.time); break;
      case EventKind::TransferComplete: on_transfer_complete(ev.key, ev.time); break;
    }
  }

  result_.expected = expected_deliveries(sc_);
  result_.config_echo = sc_.echo();
  result_.peak_buffer_occupancy.resize(sc_.nodes);
  for (NodeId n = 0; n < sc_.nodes; ++n)
    result_.peak_buffer_occupancy[n] = nodes_[n].peak_occupancy;
  if (sc_.protocol == Protocol::SprayWait) {
    for (const auto& node : nodes_)
      for (const auto& [id, count] : node.copies)
        if (node.buffer.contains(id)) result_.audit.final_copy_sums[id] += count;
  }
  std::sort(result_.deliveries.begin(), result_.deliveries.end(),
            [](const DeliveryRecord& x, const DeliveryRecord& y) {
              return std::tie(x.delivered_at, x.message_id, x.recipient) <
                     std::tie(y.delivered_at, y.message_id, y.recipient);
            });
  return result_;
}

std::vector<NodeId> Simulation::active_peers_of(NodeId n) const {
  std::vector<NodeId> peers;
  for (const auto& [pair, link] : active_) {
    (void)link;
    if (pair.first == n) peers.push_back(pair.second);
    else if (pair.second == n) peers.push_back(pair.first);
  }
  std::sort(peers.begin(), peers.end());
  return peers;
}

void Simulation::adjust_copy_total(MessageId id, std::int64_t delta) {
  if (sc_.protocol != Protocol::SprayWait) return;
  auto& total = copy_total_[id];
  total += delta;
  if (total > static_cast<std::int64_t>(result_.audit.max_copies_per_message))
    result_.audit.max_copies_per_message = static_cast<std::uint32_t>(total);
}

void Simulation::note_removed(NodeId n, const Message& m, std::uint64_t& counter) {
  ++counter;
  auto it = nodes_[n].copies.find(m.id);
  if (it != nodes_[n].copies.end()) {
    adjust_copy_total(m.id, -static_cast<std::int64_t>(it->second));
    nodes_[n].copies.erase(it);
  }
}

void Simulation::purge_node(NodeId n, SimTime now) {
  for (const auto& m : nodes_[n].buffer.purge_expired(now)) note_removed(n, m, result_.drops_ttl);
}

void Simulation::accrue_link(LinkState& link, SimTime upto) {
  if (upto <= link.accrued_until) return;
  NodeId a = link.contact.a, b = link.contact.b;
  auto segments = split_at_sample_boundaries(link.accrued_until, upto, sc_.params.samples_per_day,
                                             sc_.sample_duration_s());
  for (const auto& seg : segments) {
    if (sc_.protocol == Protocol::Scorp) {
      accrue_contact(nodes_[a].interest_state, sc_.interests[b], seg.cell.sample, seg.length());
      accrue_contact(nodes_[b].interest_state, sc_.interests[a], seg.cell.sample, seg.length());
    } else if (sc_.protocol == Protocol::Dlife) {
      nodes_[a].peer_state.acc.accrue(b, seg.cell.sample, seg.length());
      nodes_[b].peer_state.acc.accrue(a, seg.cell.sample, seg.length());
    }
  }
  link.accrued_until = upto;
}

EncounterSummary Simulation::build_summary(NodeId peer, SimTime now) const {
  const NodeState& ps = nodes_[peer];
  EncounterSummary s;
  s.peer = peer;
  s.peer_interests = sc_.interests[peer];
  for (const auto& e : ps.buffer.entries())
    if (e.msg.is_live(now)) s.peer_carried.insert(e.msg.id);
  s.peer_carried.insert(ps.consumed.begin(), ps.consumed.end());
  int i = current_sample(now);
  switch (sc_.protocol) {
    case Protocol::Scorp:
      for (auto key : ps.interest_state.acc.keys())
        s.peer_interest_weights[key] = teci_weight(ps.interest_state, key, i);
      break;
    case Protocol::Dlife:
      for (auto key : ps.peer_state.acc.keys())
        s.peer_node_weights[key] = dlife_weight(ps.peer_state, key, i);
      s.peer_importance = ps.peer_state.importance;
      break;
    case Protocol::BubbleRap:
      s.peer_community = ps.community.local_community;
      s.peer_global_centrality = ps.centrality.global_centrality();
      s.peer_local_centrality = ps.centrality.local_centrality(ps.community.local_community);
      break;
    case Protocol::SprayWait:
      s.peer_copy_counts = ps.copies;
      break;
  }
  return s;
}

std::vector<ForwardAction> Simulation::decide(NodeId carrier, const std::vector<Message>& carried,
                                              const EncounterSummary& summary) const {
  const NodeState& cs = nodes_[carrier];
  switch (sc_.protocol) {
    case Protocol::Scorp: {
      ScorpCarrierState me;
      for (auto key : cs.interest_state.acc.keys())
        me.weights[key] = teci_weight(cs.interest_state, key, current_sample_);
      return scorp_on_encounter(carried, me, summary);
    }
    case Protocol::Dlife: {
      DlifeCarrierState me;
      for (auto key : cs.peer_state.acc.keys())
        me.weights[key] = dlife_weight(cs.peer_state, key, current_sample_);
      me.importance = cs.peer_state.importance;
      return dlife_on_encounter(carried, me, summary);
    }
    case Protocol::BubbleRap: {
      BubbleCarrierState me;
      me.community = cs.community.local_community;
      me.global_centrality = cs.centrality.global_centrality();
      me.local_centrality = cs.centrality.local_centrality(cs.community.local_community);
      return bubble_on_encounter(carried, me, summary);
    }
    case Protocol::SprayWait: {
      SnwCarrierState me;
      me.copies = cs.copies;
      return snw_on_encounter(carried, me, summary);
    }
  }
  return {};
}

void Simulation::evaluate_pair(NodeId carrier, NodeId peer, std::optional<MessageId> only,
                               SimTime now) {
  purge_node(carrier, now);
  purge_node(peer, now);
  std::vector<Message> carried = nodes_[carrier].buffer.live_messages_sorted(now);
  if (only) {
    std::vector<Message> one;
    for (const auto& m : carried)
      if (m.id == *only) one.push_back(m);
    carried = std::move(one);
  }
  if (carried.empty()) return;
  EncounterSummary summary = build_summary(peer, now);
  current_sample_ = current_sample(now);
  std::vector<ForwardAction> actions = decide(carrier, carried, summary);
  for (const auto& action : actions) {
    if (summary.peer_carried.count(action.message_id)) ++result_.audit.decisions_to_holders;
    apply_action(carrier, peer, action, now);
  }
}

void Simulation::apply_action(NodeId from, NodeId to, const ForwardAction& action, SimTime now) {
  if (nodes_[to].holds(action.message_id)) return;  // raced in via another link
  auto entry = std::find_if(nodes_[from].buffer.entries().begin(),
                            nodes_[from].buffer.entries().end(),
                            [&](const Buffer::Entry& e) { return e.msg.id == action.message_id; });
  if (entry == nodes_[from].buffer.entries().end()) return;
  const Message msg = entry->msg;
  if (!msg.is_live(now)) return;

  if (!sc_.bandwidth_bytes_per_sec) {
    transfer_now(from, to, msg, action.kind, now);
    return;
  }
  auto key = std::make_pair(std::min(from, to), std::max(from, to));
  auto it = active_.find(key);
  if (it == active_.end()) return;  // link vanished mid cascade
  links_[it->second].queue.push_back({msg, from, to, action.kind});
  start_next_transfer(it->second, now);
}

void Simulation::start_next_transfer(std::uint64_t link_index, SimTime now) {
  LinkState& link = links_[link_index];
  if (link.in_flight || link.queue.empty()) return;
  QueuedTransfer q = link.queue.front();
  link.queue.pop_front();
  if (nodes_[q.to].holds(q.msg.id) || !nodes_[q.from].buffer.contains(q.msg.id)) {
    start_next_transfer(link_index, now);  // stale queue entry
    return;
  }
  InFlightTransfer flight{q.msg, q.from, q.to, q.kind, 0, link_index, false};
  if (sc_.protocol == Protocol::SprayWait && q.kind == ForwardAction::Kind::TransferCopies) {
    auto it = nodes_[q.from].copies.find(q.msg.id);
    std::uint32_t c = it == nodes_[q.from].copies.end() ? 1 : it->second;
    if (c <= 1) {  // copies spent while queued
      start_next_transfer(link_index, now);
      return;
    }
    flight.copies_moved = c / 2;
    it->second = c - flight.copies_moved;
  }
  flights_.push_back(flight);
  link.in_flight = flights_.size() - 1;
  double seconds = static_cast<double>(q.msg.size_bytes) / *sc_.bandwidth_bytes_per_sec;
  push(now + seconds, EventKind::TransferComplete, flights_.size() - 1);
}

void Simulation::transfer_now(NodeId from, NodeId to, const Message& msg,
                              ForwardAction::Kind kind, SimTime now) {
  std::uint32_t moved = 0;
  if (sc_.protocol == Protocol::SprayWait && kind == ForwardAction::Kind::TransferCopies) {
    auto it = nodes_[from].copies.find(msg.id);
    std::uint32_t c = it == nodes_[from].copies.end() ? 1 : it->second;
    if (c <= 1) return;
    moved = c / 2;
    it->second = c - moved;
  }
  receive(to, from, msg, kind, moved, now);
}

void Simulation::receive(NodeId to, NodeId from, const Message& msg, ForwardAction::Kind kind,
                         std::uint32_t copies_moved, SimTime now) {
  NodeState& rs = nodes_[to];
  if (rs.holds(msg.id)) {  // duplicate via concurrent links; nothing gained
    adjust_copy_total(msg.id, -static_cast<std::int64_t>(copies_moved));
    return;
  }
  ++result_.forwardings;
  if (sc_.audit) result_.transfers.push_back({msg.id, from, to, now});
  if (!msg.is_live(now)) {  // expired in flight
    ++result_.drops_ttl;
    adjust_copy_total(msg.id, -static_cast<std::int64_t>(copies_moved));
    return;
  }

  bool interested = sc_.receiver_driven()
                        ? sc_.interests[to].count(msg.content_type()) != 0
                        : msg.is_destination_addressed() && msg.destination() == to;
  if (interested && to != msg.source && !rs.consumed.count(msg.id)) {
    result_.deliveries.push_back({msg.id, to, now, msg.created_at});
    rs.consumed.insert(msg.id);
  }

  // Final recipients of destination-addressed traffic do not re-buffer;
  // interested receiver-driven nodes keep a copy for further replication.
  if (!sc_.receiver_driven() && interested) return;

  auto res = rs.buffer.insert(msg, now);
  for (const auto& dropped : res.expired) note_removed(to, dropped, result_.drops_ttl);
  if (res.status == Buffer::InsertStatus::NoFit) {
    ++result_.drops_nofit;
    adjust_copy_total(msg.id, -static_cast<std::int64_t>(copies_moved));
    return;
  }
  for (const auto& dropped : res.evicted) note_removed(to, dropped, result_.drops_evicted);
  if (sc_.protocol == Protocol::SprayWait)
    rs.copies[msg.id] = kind == ForwardAction::Kind::TransferCopies ? copies_moved : 1;
  rs.peak_occupancy = std::max(rs.peak_occupancy, rs.buffer.occupancy());
  if (sc_.audit && !rs.buffer.is_unlimited() && rs.buffer.occupancy() > rs.buffer.capacity())
    ++result_.audit.buffer_violations;
  arrivals_.push_back({to, msg.id});
}

void Simulation::drain_arrivals(SimTime now) {
  while (!arrivals_.empty()) {
    auto [node, id] = arrivals_.front();
    arrivals_.pop_front();
    if (!nodes_[node].buffer.contains(id)) continue;  // evicted meanwhile
    for (NodeId peer : active_peers_of(node)) evaluate_pair(node, peer, id, now);
  }
}

void Simulation::on_contact_up(std::size_t index, SimTime now) {
  const Contact& c = trace_[index];
  links_.push_back(LinkState{c, now, {}, std::nullopt});
  active_[{c.a, c.b}] = links_.size() - 1;
  if (sc_.protocol == Protocol::BubbleRap) {
    nodes_[c.a].centrality.note_encounter(c.b);
    nodes_[c.b].centrality.note_encounter(c.a);
  }
  NodeId lo = c.a, hi = c.b;  // canonical a < b
  evaluate_pair(lo, hi, std::nullopt, now);
  evaluate_pair(hi, lo, std::nullopt, now);
  drain_arrivals(now);
}

void Simulation::on_contact_down(std::size_t index, SimTime now) {
  const Contact& c = trace_[index];
  auto it = active_.find({c.a, c.b});
  if (it == active_.end()) return;
  std::uint64_t link_index = it->second;
  LinkState& link = links_[link_index];
  accrue_link(link, now);
  if (sc_.protocol == Protocol::BubbleRap)
    kclique_update(nodes_[c.a].community, nodes_[c.b].community, c);
  if (link.in_flight) {  // abort mid-transfer: no replica
    InFlightTransfer& flight = flights_[*link.in_flight];
    flight.aborted = true;
    if (flight.copies_moved) {
      if (nodes_[flight.from].buffer.contains(flight.msg.id))
        nodes_[flight.from].copies[flight.msg.id] += flight.copies_moved;
      else  // sender lost the message meanwhile; in-flight copies vanish
        adjust_copy_total(flight.msg.id, -static_cast<std::int64_t>(flight.copies_moved));
    }
  }
  link.queue.clear();
  active_.erase(it);
}

void Simulation::on_sample_boundary(std::uint64_t k, SimTime now) {
  int spd = sc_.params.samples_per_day;
  int closed_sample = static_cast<int>((k - 1) % static_cast<std::uint64_t>(spd));
  int day = static_cast<int>((k - 1) / static_cast<std::uint64_t>(spd)) + 1;
  for (auto& [pair, link_index] : active_) {
    (void)pair;
    accrue_link(links_[link_index], now);
  }
  if (sc_.protocol == Protocol::Scorp) {
    for (auto& node : nodes_) node.interest_state.acc.close_sample_all(closed_sample, day);
  } else if (sc_.protocol == Protocol::Dlife) {
    for (auto& node : nodes_) node.peer_state.acc.close_sample_all(closed_sample, day);
    int next_sample = static_cast<int>(k % static_cast<std::uint64_t>(spd));
    std::vector<std::vector<NodeId>> met(sc_.nodes);
    std::vector<double> prev(sc_.nodes);
    for (NodeId n = 0; n < sc_.nodes; ++n) {
      met[n] = nodes_[n].peer_state.acc.keys();
      prev[n] = nodes_[n].peer_state.importance;
    }
    auto weight = [&](NodeId a, NodeId b) {
      return dlife_weight(nodes_[a].peer_state, b, next_sample);
    };
    std::vector<double> next = dlife_importance_step(met, weight, prev, sc_.params.dlife_alpha);
    for (NodeId n = 0; n < sc_.nodes; ++n) nodes_[n].peer_state.importance = next[n];
  } else if (sc_.protocol == Protocol::BubbleRap) {
    auto window_mult =
        static_cast<std::uint64_t>(sc_.params.centrality_window_s / sc_.sample_duration_s() + 0.5);
    if (window_mult > 0 && k % window_mult == 0) {
      for (NodeId n = 0; n < sc_.nodes; ++n) {
        auto peers = active_peers_of(n);
        nodes_[n].centrality.roll_window({peers.begin(), peers.end()});
      }
    }
  }
}

void Simulation::on_create(MessageId id, SimTime now) {
  const Message& msg = messages_[id];
  NodeState& src = nodes_[msg.source];
  auto res = src.buffer.insert(msg, now);
  for (const auto& dropped : res.expired) note_removed(msg.source, dropped, result_.drops_ttl);
  if (res.status == Buffer::InsertStatus::NoFit) {
    ++result_.drops_nofit;
    return;
  }
  for (const auto& dropped : res.evicted) note_removed(msg.source, dropped, result_.drops_evicted);
  if (sc_.protocol == Protocol::SprayWait) {
    src.copies[msg.id] = sc_.params.snw_copies;
    adjust_copy_total(msg.id, sc_.params.snw_copies);
  }
  src.peak_occupancy = std::max(src.peak_occupancy, src.buffer.occupancy());
  arrivals_.push_back({msg.source, msg.id});
  drain_arrivals(now);
}

void Simulation::on_transfer_complete(std::uint64_t tid, SimTime now) {
  InFlightTransfer& flight = flights_[tid];
  if (flight.aborted) return;
  LinkState& link = links_[flight.link];
  link.in_flight.reset();
  receive(flight.to, flight.from, flight.msg, flight.kind, flight.copies_moved, now);
  start_next_transfer(flight.link, now);
  drain_arrivals(now);
}

}  // namespace

void validate_scenario(const Scenario& sc) {
  if (sc.nodes < 2) throw ConfigError("need at least 2 nodes");
  if (!(sc.duration_s > 0)) throw ConfigError("duration must be positive");
  if (!(sc.ttl_s > 0)) throw ConfigError("ttl must be positive");
  if (sc.msg_size_min < 1 || sc.msg_size_min > sc.msg_size_max)
    throw ConfigError("message size range invalid");
  int spd = sc.params.samples_per_day;
  if (spd < 1 || 86400 % spd != 0)
    throw ConfigError("samples_per_day must divide 86400 seconds");
  if (sc.params.snw_copies < 1) throw ConfigError("snw_copies must be >= 1");
  if (sc.params.kclique_k < 2) throw ConfigError("kclique_k must be >= 2");
  if (!(sc.params.dlife_alpha >= 0 && sc.params.dlife_alpha < 1))
    throw ConfigError("dlife_alpha must lie in [0, 1)");
  if (sc.protocol == Protocol::BubbleRap) {
    double ratio = sc.params.centrality_window_s / sc.sample_duration_s();
    if (std::abs(ratio - std::round(ratio)) > 1e-9 || ratio < 1)
      throw ConfigError("centrality window must be a whole number of samples");
  }
  if (sc.interests.size() != sc.nodes)
    throw ConfigError("interest list must have one entry per node");
  if (sc.bandwidth_bytes_per_sec && !(*sc.bandwidth_bytes_per_sec > 0))
    throw ConfigError("bandwidth must be positive");
  for (const auto& [node, cap] : sc.buffer_overrides) {
    (void)cap;
    if (node >= sc.nodes) throw ConfigError("buffer override for unknown node");
  }
  for (const auto& p : sc.traffic) {
    if (p.source >= sc.nodes) throw ConfigError("traffic source beyond node count");
    if (p.created_at < 0 || p.created_at >= sc.duration_s)
      throw ConfigError("message creation time outside scenario duration");
    bool dest_addressed = std::holds_alternative<DestinationAddress>(p.addressing);
    if (sc.receiver_driven() && dest_addressed)
      throw ConfigError("destination-addressed traffic with a receiver-driven protocol");
    if (!sc.receiver_driven() && !dest_addressed)
      throw ConfigError("content-addressed traffic with a source-driven protocol");
    if (dest_addressed) {
      NodeId d = std::get<DestinationAddress>(p.addressing).node;
      if (d >= sc.nodes) throw ConfigError("traffic destination beyond node count");
      if (d == p.source) throw ConfigError("message addressed to its own source");
    }
  }
}

std::uint64_t expected_deliveries(const Scenario& sc) {
  if (!sc.receiver_driven()) return sc.traffic.size();
  std::uint64_t expected = 0;
  for (const auto& p : sc.traffic) {
    InterestId type = std::get<ContentAddress>(p.addressing).type;
    for (NodeId n = 0; n < sc.nodes; ++n)
      if (n != p.source && sc.interests[n].count(type)) ++expected;
  }
  return expected;
}

std::vector<std::pair<std::string, std::string>> Scenario::echo() const {
  std::vector<std::pair<std::string, std::string>> kv;
  kv.emplace_back("scenario", name);
  kv.emplace_back("nodes", std::to_string(nodes));
  kv.emplace_back("protocol", protocol_name(protocol));
  kv.emplace_back("ttl_s", fmt_num(ttl_s));
  kv.emplace_back("duration_s", fmt_num(duration_s));
  kv.emplace_back("buffer_bytes", buffer_bytes ? std::to_string(*buffer_bytes) : "unlimited");
  std::string overrides;
  for (const auto& [n, cap] : buffer_overrides) {
    if (!overrides.empty()) overrides += ' ';
    overrides += std::to_string(n) + ":" + (cap ? std::to_string(*cap) : "unlimited");
  }
  kv.emplace_back("buffer_overrides", overrides.empty() ? "none" : overrides);
  kv.emplace_back("msg_size_min", std::to_string(msg_size_min));
  kv.emplace_back("msg_size_max", std::to_string(msg_size_max));
  kv.emplace_back("transfer", bandwidth_bytes_per_sec
                                  ? "bandwidth:" + fmt_num(*bandwidth_bytes_per_sec)
                                  : "instant");
  kv.emplace_back("traffic_messages", std::to_string(traffic.size()));
  std::size_t interest_pairs = 0;
  for (const auto& s : interests) interest_pairs += s.size();
  kv.emplace_back("interest_assignments", std::to_string(interest_pairs));
  kv.emplace_back("samples_per_day", std::to_string(params.samples_per_day));
  kv.emplace_back("snw_copies", std::to_string(params.snw_copies));
  kv.emplace_back("kclique_k", std::to_string(params.kclique_k));
  kv.emplace_back("familiar_threshold_s", fmt_num(params.familiar_threshold_s));
  kv.emplace_back("centrality_window_s", fmt_num(params.centrality_window_s));
  kv.emplace_back("dlife_alpha", fmt_num(params.dlife_alpha));
  kv.emplace_back("eviction_policy", "fifo_by_reception");
  kv.emplace_back("ttl_boundary", "expired_at_creation_plus_ttl");
  kv.emplace_back("snw_split", "peer_takes_floor_half");
  kv.emplace_back("teci_sample_wrap", "modulo_day");
  kv.emplace_back("dlife_importance", "damped_neighbor_sum");
  std::sort(kv.begin(), kv.end());
  return kv;
}

RunResult run(const Scenario& scenario, const std::vector<Contact>& trace, std::uint64_t seed) {
  Simulation sim(scenario, trace, seed);
  return sim.execute();
}

CausalityReport validate_causality(const RunResult& result, const Scenario& scenario,
                                   const std::vector<Contact>& trace) {
  CausalityReport report;
  auto fail = [&](const std::string& why) {
    report.ok = false;
    if (!report.diagnostic.empty()) report.diagnostic += "; ";
    report.diagnostic += why;
  };

  std::map<std::pair<NodeId, NodeId>, std::vector<const Contact*>> by_pair;
  for (const auto& c : trace) by_pair[{c.a, c.b}].push_back(&c);

  std::map<MessageId, std::set<NodeId>> reached;
  std::map<MessageId, SimTime> last_time;
  for (const auto& t : result.transfers) {
    auto key = std::make_pair(std::min(t.from, t.to), std::max(t.from, t.to));
    bool in_contact = false;
    for (const Contact* c : by_pair[key])
      if (c->start <= t.completed_at && t.completed_at <= c->end) {
        in_contact = true;
        break;
      }
    if (!in_contact)
      fail("hop of message " + std::to_string(t.message_id) + " outside any contact");
    auto& r = reached[t.message_id];
    if (r.empty()) r.insert(scenario.traffic[t.message_id].source);
    if (!r.count(t.from))
      fail("hop of message " + std::to_string(t.message_id) + " from a node that never had it");
    if (auto it = last_time.find(t.message_id); it != last_time.end() && t.completed_at < it->second)
      fail("hops of message " + std::to_string(t.message_id) + " out of time order");
    last_time[t.message_id] = t.completed_at;
    r.insert(t.to);
  }
  for (const auto& d : result.deliveries) {
    auto it = reached.find(d.message_id);
    if (it == reached.end() || !it->second.count(d.recipient))
      fail("delivery of message " + std::to_string(d.message_id) + " without a hop path");
    const auto& planned = scenario.traffic[d.message_id];
    if (d.delivered_at >= planned.created_at + scenario.ttl_s)
      fail("delivery of message " + std::to_string(d.message_id) + " past its ttl");
  }
  return report;
}

}  // namespace oppsim
