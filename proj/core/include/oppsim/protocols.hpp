#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "oppsim/types.hpp"

namespace oppsim {

enum class Protocol { Scorp, Dlife, BubbleRap, SprayWait };

std::string protocol_name(Protocol p);
Protocol protocol_from_name(const std::string& name);

// Knobs for all four policies. Every field stands in for a value the
// evaluation setup leaves open and is echoed into result metadata.
struct ProtocolParams {
  std::uint32_t snw_copies = 10;        // initial copy budget L
  int kclique_k = 5;                    // community clique parameter
  double familiar_threshold_s = 7200;   // cumulative contact for familiarity
  double centrality_window_s = 21600;   // C-window length
  double dlife_alpha = 0.8;             // importance damping
  int samples_per_day = 24;
};

// What one side learns about the other when a contact comes up. Snapshot is
// taken atomically at contact start; only the fields the active protocol
// needs are populated.
struct EncounterSummary {
  NodeId peer = 0;
  std::set<InterestId> peer_interests;
  std::set<MessageId> peer_carried;                // buffered + already consumed
  std::map<InterestId, double> peer_interest_weights;  // SCORP
  std::map<NodeId, double> peer_node_weights;          // dLife
  double peer_importance = 0;                          // dLife
  std::set<NodeId> peer_community;                     // Bubble Rap
  double peer_global_centrality = 0;                   // Bubble Rap
  double peer_local_centrality = 0;                    // Bubble Rap
  std::map<MessageId, std::uint32_t> peer_copy_counts; // Spray and Wait

  double interest_weight(InterestId x) const {
    auto it = peer_interest_weights.find(x);
    return it == peer_interest_weights.end() ? 0.0 : it->second;
  }
  double node_weight(NodeId n) const {
    auto it = peer_node_weights.find(n);
    return it == peer_node_weights.end() ? 0.0 : it->second;
  }
};

// Carrier-side snapshots, mirrors of the summary for the local node.
struct ScorpCarrierState {
  std::map<InterestId, double> weights;
  double weight(InterestId x) const {
    auto it = weights.find(x);
    return it == weights.end() ? 0.0 : it->second;
  }
};

struct DlifeCarrierState {
  std::map<NodeId, double> weights;
  double importance = 0;
  double weight(NodeId n) const {
    auto it = weights.find(n);
    return it == weights.end() ? 0.0 : it->second;
  }
};

struct BubbleCarrierState {
  std::set<NodeId> community;
  double global_centrality = 0;
  double local_centrality = 0;
};

struct SnwCarrierState {
  std::map<MessageId, std::uint32_t> copies;
};

struct ForwardAction {
  enum class Kind { Replicate, TransferCopies, Deliver };
  MessageId message_id = 0;
  Kind kind = Kind::Replicate;
  std::uint32_t copies = 0;  // TransferCopies only, 1 <= copies < carrier count

  bool operator==(const ForwardAction&) const = default;
};

// Decision functions are pure: given the carrier's live buffered messages in
// ascending id order and the peer summary, they return the transfers to
// perform, in that order. None of them ever selects a message the peer
// already carries.

// Replicate when the peer is interested in the content (which also delivers
// it), or when the peer's weight toward the content type strictly exceeds
// the carrier's. The carrier always keeps its copy.
std::vector<ForwardAction> scorp_on_encounter(const std::vector<Message>& carried,
                                              const ScorpCarrierState& carrier,
                                              const EncounterSummary& peer);

// Deliver to the destination; otherwise replicate when the peer's weight
// toward the destination strictly exceeds the carrier's, or, when both
// weights are zero, when the peer is strictly more important.
std::vector<ForwardAction> dlife_on_encounter(const std::vector<Message>& carried,
                                              const DlifeCarrierState& carrier,
                                              const EncounterSummary& peer);

// Deliver to the destination. Inside the destination's community, hand off
// only to community members with strictly higher local centrality; outside
// it, hand off to peers whose community holds the destination or whose
// global centrality is strictly higher.
std::vector<ForwardAction> bubble_on_encounter(const std::vector<Message>& carried,
                                               const BubbleCarrierState& carrier,
                                               const EncounterSummary& peer);

// Binary spray phase: give away floor(c/2) copies while more than one copy
// remains; with a single copy, wait for the destination.
std::vector<ForwardAction> snw_on_encounter(const std::vector<Message>& carried,
                                            const SnwCarrierState& carrier,
                                            const EncounterSummary& peer);

}  // namespace oppsim
