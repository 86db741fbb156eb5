#include "oppsim/protocols.hpp"

#include <stdexcept>

namespace oppsim {

std::string protocol_name(Protocol p) {
  switch (p) {
    case Protocol::Scorp: return "scorp";
    case Protocol::Dlife: return "dlife";
    case Protocol::BubbleRap: return "bubble";
    case Protocol::SprayWait: return "snw";
  }
  return "?";
}

Protocol protocol_from_name(const std::string& name) {
  if (name == "scorp") return Protocol::Scorp;
  if (name == "dlife") return Protocol::Dlife;
  if (name == "bubble" || name == "bubblerap") return Protocol::BubbleRap;
  if (name == "snw" || name == "spraywait") return Protocol::SprayWait;
  throw std::invalid_argument("unknown protocol: " + name);
}

std::vector<ForwardAction> scorp_on_encounter(const std::vector<Message>& carried,
                                              const ScorpCarrierState& carrier,
                                              const EncounterSummary& peer) {
  std::vector<ForwardAction> actions;
  for (const Message& m : carried) {
    if (peer.peer_carried.count(m.id)) continue;
    InterestId type = m.content_type();
    if (peer.peer_interests.count(type)) {
      actions.push_back({m.id, ForwardAction::Kind::Replicate});
    } else if (peer.interest_weight(type) > carrier.weight(type)) {
      actions.push_back({m.id, ForwardAction::Kind::Replicate});
    }
  }
  return actions;
}

std::vector<ForwardAction> dlife_on_encounter(const std::vector<Message>& carried,
                                              const DlifeCarrierState& carrier,
                                              const EncounterSummary& peer) {
  std::vector<ForwardAction> actions;
  for (const Message& m : carried) {
    if (peer.peer_carried.count(m.id)) continue;
    NodeId dest = m.destination();
    if (peer.peer == dest) {
      actions.push_back({m.id, ForwardAction::Kind::Deliver});
      continue;
    }
    double wp = peer.node_weight(dest);
    double wc = carrier.weight(dest);
    if (wp > wc) {
      actions.push_back({m.id, ForwardAction::Kind::Replicate});
    } else if (wp == 0.0 && wc == 0.0 && peer.peer_importance > carrier.importance) {
      actions.push_back({m.id, ForwardAction::Kind::Replicate});
    }
  }
  return actions;
}

std::vector<ForwardAction> bubble_on_encounter(const std::vector<Message>& carried,
                                               const BubbleCarrierState& carrier,
                                               const EncounterSummary& peer) {
  std::vector<ForwardAction> actions;
  for (const Message& m : carried) {
    if (peer.peer_carried.count(m.id)) continue;
    NodeId dest = m.destination();
    if (peer.peer == dest) {
      actions.push_back({m.id, ForwardAction::Kind::Deliver});
      continue;
    }
    if (carrier.community.count(dest)) {
      // Local phase: the message already reached the destination's
      // community; climb only within it.
      if (peer.peer_community.count(dest) &&
          peer.peer_local_centrality > carrier.local_centrality) {
        actions.push_back({m.id, ForwardAction::Kind::Replicate});
      }
    } else if (peer.peer_community.count(dest) ||
               peer.peer_global_centrality > carrier.global_centrality) {
      // Global phase: hand off into the destination's community, or climb
      // the global centrality gradient.
      actions.push_back({m.id, ForwardAction::Kind::Replicate});
    }
  }
  return actions;
}

std::vector<ForwardAction> snw_on_encounter(const std::vector<Message>& carried,
                                            const SnwCarrierState& carrier,
                                            const EncounterSummary& peer) {
  std::vector<ForwardAction> actions;
  for (const Message& m : carried) {
    if (peer.peer_carried.count(m.id)) continue;
    if (peer.peer == m.destination()) {
      actions.push_back({m.id, ForwardAction::Kind::Deliver});
      continue;
    }
    auto it = carrier.copies.find(m.id);
    std::uint32_t c = it == carrier.copies.end() ? 1 : it->second;
    if (c > 1) {
      // Binary split: peer takes floor(c/2), carrier keeps the ceiling.
      actions.push_back({m.id, ForwardAction::Kind::TransferCopies, c / 2});
    }
  }
  return actions;
}

}  // namespace oppsim
