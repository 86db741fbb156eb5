#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <set>
#include <vector>

#include "oppsim/types.hpp"

namespace oppsim {

// Per-node message store with a byte capacity. Entries are kept in reception
// order; when space is needed the oldest-received entry goes first. Expired
// entries are purged lazily before every operation.
class Buffer {
 public:
  struct Entry {
    Message msg;
    SimTime received_at = 0;
  };

  enum class InsertStatus { Inserted, NoFit, DuplicateId };

  struct InsertResult {
    InsertStatus status = InsertStatus::Inserted;
    std::vector<Message> evicted;
    std::vector<Message> expired;
  };

  Buffer() = default;
  explicit Buffer(std::uint64_t capacity_bytes) : capacity_(capacity_bytes) {}
  static Buffer unlimited() { return Buffer(); }

  bool is_unlimited() const { return !capacity_.has_value(); }
  std::uint64_t capacity() const { return capacity_.value_or(UINT64_MAX); }
  std::uint64_t occupancy() const { return occupancy_; }
  std::size_t size() const { return entries_.size(); }
  bool contains(MessageId id) const { return ids_.count(id) != 0; }
  const std::deque<Entry>& entries() const { return entries_; }

  // Purges expired entries, then inserts. If the message alone exceeds the
  // total capacity the insert is rejected with NoFit (a drop, not a fault);
  // otherwise oldest-received entries are evicted until it fits.
  InsertResult insert(const Message& msg, SimTime now);

  std::vector<Message> purge_expired(SimTime now);

  // Removes one entry by id (used when a carrier hands off bookkeeping).
  std::optional<Message> erase(MessageId id);

  // Live messages in ascending id order. Does not purge; callers purge
  // first so removals can be accounted for.
  std::vector<Message> live_messages_sorted(SimTime now) const;

 private:
  void drop_at(std::size_t index);

  std::optional<std::uint64_t> capacity_;  // nullopt = unlimited
  std::deque<Entry> entries_;              // reception order, front = oldest
  std::set<MessageId> ids_;
  std::uint64_t occupancy_ = 0;
};

}  // namespace oppsim
