#include "oppsim/buffer.hpp"

#include <algorithm>

namespace oppsim {

Buffer::InsertResult Buffer::insert(const Message& msg, SimTime now) {
  InsertResult result;
  result.expired = purge_expired(now);
  if (ids_.count(msg.id)) {
    result.status = InsertStatus::DuplicateId;
    return result;
  }
  if (!is_unlimited() && msg.size_bytes > *capacity_) {
    result.status = InsertStatus::NoFit;
    return result;
  }
  if (!is_unlimited()) {
    while (occupancy_ + msg.size_bytes > *capacity_) {
      result.evicted.push_back(entries_.front().msg);
      drop_at(0);
    }
  }
  entries_.push_back({msg, now});
  ids_.insert(msg.id);
  occupancy_ += msg.size_bytes;
  return result;
}

std::vector<Message> Buffer::purge_expired(SimTime now) {
  std::vector<Message> purged;
  for (std::size_t i = 0; i < entries_.size();) {
    if (!entries_[i].msg.is_live(now)) {
      purged.push_back(entries_[i].msg);
      drop_at(i);
    } else {
      ++i;
    }
  }
  return purged;
}

std::optional<Message> Buffer::erase(MessageId id) {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].msg.id == id) {
      Message m = entries_[i].msg;
      drop_at(i);
      return m;
    }
  }
  return std::nullopt;
}

std::vector<Message> Buffer::live_messages_sorted(SimTime now) const {
  std::vector<Message> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_)
    if (e.msg.is_live(now)) out.push_back(e.msg);
  std::sort(out.begin(), out.end(), [](const Message& x, const Message& y) { return x.id < y.id; });
  return out;
}

void Buffer::drop_at(std::size_t index) {
  occupancy_ -= entries_[index].msg.size_bytes;
  ids_.erase(entries_[index].msg.id);
  entries_.erase(entries_.begin() + static_cast<std::ptrdiff_t>(index));
}

}  // namespace oppsim
