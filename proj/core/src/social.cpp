#include "oppsim/social.hpp"

#include <algorithm>
#include <charconv>
#include <stdexcept>
#include <string>

namespace oppsim {

void SampleAverager::accrue(std::uint32_t key, int sample, double seconds) {
  if (seconds <= 0) return;
  row(key)[static_cast<std::size_t>(sample)].tcti += seconds;
}

void SampleAverager::close_sample(std::uint32_t key, int sample, int day) {
  auto& cell = row(key)[static_cast<std::size_t>(sample)];
  if (cell.days >= day)
    throw std::logic_error("sample " + std::to_string(sample) + " of day " +
                           std::to_string(day) + " closed twice");
  // day is the global 1-based day count, so days the key was not yet known
  // enter the average as zeros.
  cell.atcti = (cell.tcti + (day - 1) * cell.atcti) / day;
  cell.tcti = 0;
  cell.days = day;
}

void SampleAverager::close_sample_all(int sample, int day) {
  for (auto& [key, cells] : cells_) {
    (void)key;
    auto& cell = cells[static_cast<std::size_t>(sample)];
    if (cell.days >= day)
      throw std::logic_error("sample closed twice");
    cell.atcti = (cell.tcti + (day - 1) * cell.atcti) / day;
    cell.tcti = 0;
    cell.days = day;
  }
}

double SampleAverager::weight(std::uint32_t key, int sample) const {
  auto it = cells_.find(key);
  if (it == cells_.end()) return 0.0;
  const auto& cells = it->second;
  const double t = samples_per_day_;
  double w = 0.0;
  for (int d = 0; d < samples_per_day_; ++d) {
    int idx = (sample + d) % samples_per_day_;
    w += t / (t + d) * cells[static_cast<std::size_t>(idx)].atcti;
  }
  return w;
}

double SampleAverager::tcti_current(std::uint32_t key, int sample) const {
  auto it = cells_.find(key);
  return it == cells_.end() ? 0.0 : it->second[static_cast<std::size_t>(sample)].tcti;
}

double SampleAverager::atcti(std::uint32_t key, int sample) const {
  auto it = cells_.find(key);
  return it == cells_.end() ? 0.0 : it->second[static_cast<std::size_t>(sample)].atcti;
}

int SampleAverager::days_observed(std::uint32_t key, int sample) const {
  auto it = cells_.find(key);
  return it == cells_.end() ? 0 : it->second[static_cast<std::size_t>(sample)].days;
}

std::vector<std::uint32_t> SampleAverager::keys() const {
  std::vector<std::uint32_t> out;
  out.reserve(cells_.size());
  for (const auto& [key, cells] : cells_) {
    (void)cells;
    out.push_back(key);
  }
  return out;
}

std::vector<SampleAverager::Cell>& SampleAverager::row(std::uint32_t key) {
  auto it = cells_.find(key);
  if (it == cells_.end())
    it = cells_.emplace(key, std::vector<Cell>(static_cast<std::size_t>(samples_per_day_))).first;
  return it->second;
}

void accrue_contact(InterestSocialState& state, const std::set<InterestId>& peer_interests,
                    int sample, double seconds) {
  for (InterestId x : peer_interests) state.acc.accrue(x, sample, seconds);
}

double teci_weight(const InterestSocialState& state, InterestId x, int sample) {
  return state.acc.weight(x, sample);
}

double dlife_weight(const PeerSocialState& state, NodeId peer, int sample) {
  return state.acc.weight(peer, sample);
}

std::vector<double> dlife_importance_step(
    const std::vector<std::vector<NodeId>>& met,
    const std::function<double(NodeId, NodeId)>& weight,
    const std::vector<double>& previous, double alpha) {
  std::vector<double> next(previous.size(), 0.0);
  for (NodeId a = 0; a < previous.size(); ++a) {
    double sum = 0.0;
    for (NodeId b : met[a]) sum += weight(a, b) * previous[b];
    next[a] = alpha * sum + (1.0 - alpha);
  }
  return next;
}

namespace {

int shared_members(const std::set<NodeId>& familiar, const std::set<NodeId>& community) {
  int n = 0;
  for (NodeId m : familiar)
    if (community.count(m)) ++n;
  return n;
}

void admit_peer(CommunityState& mine, const CommunityState& theirs, double cumulative) {
  NodeId peer = theirs.owner;
  if (cumulative >= mine.familiar_threshold) {
    mine.familiar_set.insert(peer);
    mine.local_community.insert(peer);
  }
  if (!mine.local_community.count(peer) &&
      shared_members(theirs.familiar_set, mine.local_community) >= mine.k - 1) {
    mine.local_community.insert(peer);
  }
}

}  // namespace

void kclique_update(CommunityState& x, CommunityState& y, const Contact& contact) {
  double d = contact.duration();
  double cum_xy = (x.cumulative_contact[y.owner] += d);
  double cum_yx = (y.cumulative_contact[x.owner] += d);
  admit_peer(x, y, cum_xy);
  admit_peer(y, x, cum_yx);
}

void CentralityState::roll_window(const std::set<NodeId>& still_active_peers) {
  history_.push_back(std::move(current_));
  current_ = still_active_peers;
}

double CentralityState::global_centrality() const {
  if (history_.empty()) return 0.0;
  double total = 0.0;
  for (const auto& w : history_) total += static_cast<double>(w.size());
  return total / static_cast<double>(history_.size());
}

double CentralityState::local_centrality(const std::set<NodeId>& community) const {
  if (history_.empty()) return 0.0;
  double total = 0.0;
  for (const auto& w : history_) {
    for (NodeId n : w)
      if (community.count(n)) total += 1.0;
  }
  return total / static_cast<double>(history_.size());
}

namespace {

std::string render(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, p);
}

void write_averager_rows(std::ostream& os, NodeId node, const char* prefix,
                         const SampleAverager& acc) {
  for (const auto& [key, cells] : acc.cells()) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      os << node << ',' << prefix << "_tcti," << key << ',' << i << ',' << render(cells[i].tcti)
         << '\n';
      os << node << ',' << prefix << "_atcti," << key << ',' << i << ',' << render(cells[i].atcti)
         << '\n';
      os << node << ',' << prefix << "_days," << key << ',' << i << ',' << cells[i].days << '\n';
    }
  }
}

}  // namespace

void write_snapshot(std::ostream& os,
                    const std::vector<InterestSocialState>& interest_states,
                    const std::vector<PeerSocialState>& peer_states,
                    const std::vector<CommunityState>& communities,
                    const std::vector<CentralityState>& centralities) {
  os << "node,kind,key,sample,value\n";
  for (const auto& s : interest_states) write_averager_rows(os, s.owner, "interest", s.acc);
  for (const auto& s : peer_states) {
    write_averager_rows(os, s.owner, "peer", s.acc);
    os << s.owner << ",importance,0,0," << render(s.importance) << '\n';
  }
  for (const auto& c : communities) {
    for (NodeId m : c.local_community) os << c.owner << ",community_member," << m << ",0,1\n";
    for (NodeId m : c.familiar_set) os << c.owner << ",familiar," << m << ",0,1\n";
    for (const auto& [peer, secs] : c.cumulative_contact)
      os << c.owner << ",cumulative_contact," << peer << ",0," << render(secs) << '\n';
  }
  for (const auto& c : centralities) {
    os << c.owner() << ",centrality_global,0,0," << render(c.global_centrality()) << '\n';
    for (std::size_t w = 0; w < c.history().size(); ++w)
      os << c.owner() << ",window_encounters,0," << w << ','
         << c.history()[w].size() << '\n';
  }
}

}  // namespace oppsim
