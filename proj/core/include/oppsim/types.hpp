#pragma once

#include <cstdint>
#include <variant>

#include "oppsim/time.hpp"

namespace oppsim {

using NodeId = std::uint32_t;
using InterestId = std::uint32_t;
using MessageId = std::uint64_t;

// Source-driven protocols address a message to one node; the receiver-driven
// protocol tags it with a content type and interested nodes pull it.
struct DestinationAddress {
  NodeId node = 0;
  bool operator==(const DestinationAddress&) const = default;
};
struct ContentAddress {
  InterestId type = 0;
  bool operator==(const ContentAddress&) const = default;
};
using Addressing = std::variant<DestinationAddress, ContentAddress>;

struct Message {
  MessageId id = 0;
  NodeId source = 0;
  Addressing addressing;
  std::uint64_t size_bytes = 1;
  SimTime created_at = 0;
  double ttl = 0;  // seconds

  SimTime expires_at() const { return created_at + ttl; }
  // A message is live strictly before created_at + ttl; it is expired at
  // exactly that instant.
  bool is_live(SimTime now) const { return now < expires_at(); }
  bool is_destination_addressed() const {
    return std::holds_alternative<DestinationAddress>(addressing);
  }
  NodeId destination() const { return std::get<DestinationAddress>(addressing).node; }
  InterestId content_type() const { return std::get<ContentAddress>(addressing).type; }
};

// Undirected encounter interval, canonicalized a < b.
struct Contact {
  NodeId a = 0;
  NodeId b = 0;
  SimTime start = 0;
  SimTime end = 0;

  double duration() const { return end - start; }
  NodeId peer_of(NodeId n) const { return n == a ? b : a; }
  bool operator==(const Contact&) const = default;
};

inline Contact make_contact(NodeId x, NodeId y, SimTime start, SimTime end) {
  if (x > y) std::swap(x, y);
  return Contact{x, y, start, end};
}

struct DeliveryRecord {
  MessageId message_id = 0;
  NodeId recipient = 0;
  SimTime delivered_at = 0;
  SimTime created_at = 0;

  double latency() const { return delivered_at - created_at; }
};

}  // namespace oppsim
