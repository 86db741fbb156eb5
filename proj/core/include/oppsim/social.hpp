#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <ostream>
#include <set>
#include <vector>

#include "oppsim/time.hpp"
#include "oppsim/types.hpp"

namespace oppsim {

// Per-key, per-daily-sample contact-time averager.
//
// For every key (a content interest, or a peer node) and every daily sample
// i it keeps:
//   tcti   - connected time accumulated toward the key inside today's
//            still-open sample i (reset when the sample closes),
//   atcti  - cumulative moving average of that sample's daily totals,
//   days   - how many day closes the cell has seen.
//
// Closing sample i on day j folds today's total into the average:
//   atcti <- (tcti + (j-1) * atcti) / j
// which makes atcti the arithmetic mean of the daily totals over days 1..j,
// counting days before the key was first seen as zeros.
class SampleAverager {
 public:
  struct Cell {
    double tcti = 0;
    double atcti = 0;
    int days = 0;
  };

  explicit SampleAverager(int samples_per_day = 24) : samples_per_day_(samples_per_day) {}

  int samples_per_day() const { return samples_per_day_; }

  // Credits `seconds` of connected time toward `key` in sample `i`. The
  // caller is responsible for splitting intervals at sample boundaries
  // first; each call covers one (day, sample) cell.
  void accrue(std::uint32_t key, int sample, double seconds);

  // Closes sample `i` of day `j` for one key. `j` is the global 1-based day
  // number. Closing the same (key, sample) twice for one day is a caller
  // bug and throws.
  void close_sample(std::uint32_t key, int sample, int day);

  // Closes sample `i` of day `j` for every key seen so far.
  void close_sample_all(int sample, int day);

  // Time-transitive weight for `key` as seen from sample `i`: the atcti of
  // the t samples starting at i, wrapping around the day, each scaled by
  // t/(t+d) where d is the distance from i.
  double weight(std::uint32_t key, int sample) const;

  double tcti_current(std::uint32_t key, int sample) const;
  double atcti(std::uint32_t key, int sample) const;
  int days_observed(std::uint32_t key, int sample) const;

  std::vector<std::uint32_t> keys() const;
  const std::map<std::uint32_t, std::vector<Cell>>& cells() const { return cells_; }

 private:
  std::vector<Cell>& row(std::uint32_t key);

  int samples_per_day_;
  std::map<std::uint32_t, std::vector<Cell>> cells_;
};

// SCORP state: connected time indexed by content interest.
struct InterestSocialState {
  NodeId owner = 0;
  SampleAverager acc;

  InterestSocialState() = default;
  InterestSocialState(NodeId owner, int samples_per_day) : owner(owner), acc(samples_per_day) {}
};

// Accrues an in-cell contact overlap toward every interest the peer holds.
// A peer holding several interests credits each of them with the whole
// overlap; duration is indexed per interest, not divided.
void accrue_contact(InterestSocialState& state, const std::set<InterestId>& peer_interests,
                    int sample, double seconds);

// Social weight of `owner` toward interest x at sample i.
double teci_weight(const InterestSocialState& state, InterestId x, int sample);

// dLife state: the same averager indexed by peer node, plus an importance
// value updated once per sample boundary.
struct PeerSocialState {
  NodeId owner = 0;
  SampleAverager acc;
  double importance = 1.0;

  PeerSocialState() = default;
  PeerSocialState(NodeId owner, int samples_per_day) : owner(owner), acc(samples_per_day) {}
};

double dlife_weight(const PeerSocialState& state, NodeId peer, int sample);

// One damped importance sweep over all nodes:
//   imp(a) <- alpha * sum_{b in met(a)} w(a,b) * imp_prev(b) + (1 - alpha)
// `met` lists, per node, the peers it has ever been in contact with.
std::vector<double> dlife_importance_step(
    const std::vector<std::vector<NodeId>>& met,
    const std::function<double(NodeId, NodeId)>& weight,
    const std::vector<double>& previous, double alpha);

// Community membership via threshold familiarity plus k-clique admission.
struct CommunityState {
  NodeId owner = 0;
  int k = 5;
  double familiar_threshold = 7200;          // seconds of cumulative contact
  std::map<NodeId, double> cumulative_contact;
  std::set<NodeId> familiar_set;
  std::set<NodeId> local_community;          // always contains owner

  CommunityState() = default;
  CommunityState(NodeId owner, int k, double familiar_threshold)
      : owner(owner), k(k), familiar_threshold(familiar_threshold) {
    local_community.insert(owner);
  }
};

// Called when a contact ends: folds its duration into both endpoints'
// cumulative totals, admits peers whose total reached the familiar
// threshold, and applies the k-clique rule (a peer whose familiar set
// shares >= k-1 members with my community joins it).
void kclique_update(CommunityState& x, CommunityState& y, const Contact& contact);

// Cumulative-window centrality: mean number of distinct nodes encountered
// per window, globally or restricted to a community.
class CentralityState {
 public:
  CentralityState() = default;
  CentralityState(NodeId owner, double window_duration)
      : owner_(owner), window_duration_(window_duration) {}

  NodeId owner() const { return owner_; }
  double window_duration() const { return window_duration_; }

  void note_encounter(NodeId peer) { current_.insert(peer); }

  // Closes the current window. Peers still in contact across the boundary
  // count toward the new window as well.
  void roll_window(const std::set<NodeId>& still_active_peers);

  double global_centrality() const;
  double local_centrality(const std::set<NodeId>& community) const;
  int completed_windows() const { return static_cast<int>(history_.size()); }
  const std::vector<std::set<NodeId>>& history() const { return history_; }

 private:
  NodeId owner_ = 0;
  double window_duration_ = 21600;
  std::vector<std::set<NodeId>> history_;  // distinct peers per completed window
  std::set<NodeId> current_;
};

// Snapshot of every social accumulator as a flat text table
// `node,kind,key,sample,value`, sorted, values rendered as shortest
// round-trip decimals. Meant for debugging and golden tests.
void write_snapshot(std::ostream& os,
                    const std::vector<InterestSocialState>& interest_states,
                    const std::vector<PeerSocialState>& peer_states,
                    const std::vector<CommunityState>& communities,
                    const std::vector<CentralityState>& centralities);

}  // namespace oppsim
