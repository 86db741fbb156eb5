#include <doctest.h>

#include "oppsim/buffer.hpp"
#include "oppsim/rng.hpp"
#include "oppsim/time.hpp"
#include "oppsim/types.hpp"

using namespace oppsim;

namespace {

Message make_msg(MessageId id, std::uint64_t size, SimTime created_at = 0, double ttl = 1e9) {
  Message m;
  m.id = id;
  m.source = 0;
  m.addressing = DestinationAddress{1};
  m.size_bytes = size;
  m.created_at = created_at;
  m.ttl = ttl;
  return m;
}

}  // namespace

TEST_CASE("sample_index maps instants to 1-based days and 0-based samples") {
  CHECK(sample_index(0, 24, 3600) == SampleRef{1, 0});
  CHECK(sample_index(90000, 24, 3600) == SampleRef{2, 1});
  CHECK(sample_index(86399.5, 24, 3600) == SampleRef{1, 23});
  CHECK(sample_index(86400, 24, 3600) == SampleRef{2, 0});
  CHECK(sample_index(3599.999, 24, 3600) == SampleRef{1, 0});
  CHECK(sample_index(3600.0, 24, 3600) == SampleRef{1, 1});
}

TEST_CASE("sample_index round trips through (day, sample, offset)") {
  Rng rng(7);
  for (int trial = 0; trial < 2000; ++trial) {
    double t = rng.uniform(0, 10 * kSecondsPerDay);
    auto ref = sample_index(t, 24, 3600);
    double offset = t - ((ref.day - 1) * kSecondsPerDay + ref.sample * 3600.0);
    CHECK(offset >= 0);
    CHECK(offset < 3600.0 + 1e-9);
    double rebuilt = (ref.day - 1) * kSecondsPerDay + ref.sample * 3600.0 + offset;
    CHECK(rebuilt == doctest::Approx(t).epsilon(1e-12));
  }
}

TEST_CASE("split_at_sample_boundaries cuts exactly at the grid") {
  SUBCASE("zero length yields nothing") {
    CHECK(split_at_sample_boundaries(100, 100, 24, 3600).empty());
  }
  SUBCASE("interval inside one cell is returned whole") {
    auto segments = split_at_sample_boundaries(100, 200, 24, 3600);
    REQUIRE(segments.size() == 1);
    CHECK(segments[0].cell == SampleRef{1, 0});
    CHECK(segments[0].length() == 100);
  }
  SUBCASE("interval across cells splits at each boundary") {
    auto segments = split_at_sample_boundaries(3000, 11000, 24, 3600);
    REQUIRE(segments.size() == 4);
    CHECK(segments[0].cell == SampleRef{1, 0});
    CHECK(segments[0].length() == doctest::Approx(600));
    CHECK(segments[1].cell == SampleRef{1, 1});
    CHECK(segments[1].length() == doctest::Approx(3600));
    CHECK(segments[2].cell == SampleRef{1, 2});
    CHECK(segments[2].length() == doctest::Approx(3600));
    CHECK(segments[3].cell == SampleRef{1, 3});
    CHECK(segments[3].length() == doctest::Approx(200));
  }
  SUBCASE("split pieces always rebuild the interval") {
    Rng rng(13);
    for (int trial = 0; trial < 500; ++trial) {
      double begin = rng.uniform(0, 3 * kSecondsPerDay);
      double end = begin + rng.uniform(0, 2 * kSecondsPerDay);
      auto segments = split_at_sample_boundaries(begin, end, 24, 3600);
      double total = 0;
      double cursor = begin;
      for (const auto& seg : segments) {
        CHECK(seg.begin == doctest::Approx(cursor));
        CHECK(sample_index(seg.begin, 24, 3600) == seg.cell);
        total += seg.length();
        cursor = seg.end;
      }
      CHECK(total == doctest::Approx(end - begin).epsilon(1e-12));
      CHECK(cursor == doctest::Approx(end));
    }
  }
}

TEST_CASE("buffer inserts fit trivially under capacity") {
  Buffer buf(2'000'000);
  auto res = buf.insert(make_msg(1, 100'000), 0);
  CHECK(res.status == Buffer::InsertStatus::Inserted);
  CHECK(buf.occupancy() == 100'000);
}

TEST_CASE("buffer evicts oldest-received entries until the new message fits") {
  // replayed by hand: three entries of 100k/950k/900k received in that
  // order, then a 100k insert must evict exactly the oldest
  Buffer buf(2'000'000);
  buf.insert(make_msg(1, 100'000), 1);
  buf.insert(make_msg(2, 950'000), 2);
  buf.insert(make_msg(3, 900'000), 3);
  CHECK(buf.occupancy() == 1'950'000);
  auto res = buf.insert(make_msg(4, 100'000), 4);
  CHECK(res.status == Buffer::InsertStatus::Inserted);
  REQUIRE(res.evicted.size() == 1);
  CHECK(res.evicted[0].id == 1);
  CHECK(buf.occupancy() == 1'950'000);
  CHECK(!buf.contains(1));
  CHECK(buf.contains(4));
}

TEST_CASE("message larger than total capacity is NoFit") {
  Buffer buf(2'000'000);
  auto res = buf.insert(make_msg(1, 2'000'001), 0);
  CHECK(res.status == Buffer::InsertStatus::NoFit);
  CHECK(buf.occupancy() == 0);
}

TEST_CASE("duplicate id insert is rejected") {
  Buffer buf(2'000'000);
  buf.insert(make_msg(1, 100), 0);
  auto res = buf.insert(make_msg(1, 100), 1);
  CHECK(res.status == Buffer::InsertStatus::DuplicateId);
}

TEST_CASE("ttl boundary: live strictly before created_at + ttl") {
  Buffer buf(2'000'000);
  buf.insert(make_msg(1, 100, 0, 86400), 0);
  CHECK(buf.purge_expired(86399).empty());
  auto purged = buf.purge_expired(86400);
  REQUIRE(purged.size() == 1);
  CHECK(purged[0].id == 1);
  CHECK(buf.purge_expired(123456).empty());  // empty buffer stays empty
}

TEST_CASE("buffer invariants hold over random insert/purge sequences") {
  Rng rng(42);
  for (int trial = 0; trial < 50; ++trial) {
    std::uint64_t capacity = 1000 + rng.below(5000);
    Buffer buf(capacity);
    MessageId next_id = 0;
    double now = 0;
    std::vector<MessageId> reception_order;
    for (int step = 0; step < 200; ++step) {
      now += rng.uniform(0, 50);
      if (rng.below(4) == 0) {
        for (const auto& m : buf.purge_expired(now)) std::erase(reception_order, m.id);
      } else {
        Message m = make_msg(next_id++, 1 + rng.below(capacity + 100), now,
                             rng.uniform(10, 400));
        auto res = buf.insert(m, now);
        for (const auto& gone : res.expired) std::erase(reception_order, gone.id);
        // eviction order is exactly ascending received_at
        for (std::size_t i = 0; i < res.evicted.size(); ++i) {
          REQUIRE(!reception_order.empty());
          CHECK(res.evicted[i].id == reception_order.front());
          reception_order.erase(reception_order.begin());
        }
        if (res.status == Buffer::InsertStatus::Inserted) reception_order.push_back(m.id);
      }
      CHECK(buf.occupancy() <= capacity);
      std::uint64_t total = 0;
      for (const auto& e : buf.entries()) total += e.msg.size_bytes;
      CHECK(total == buf.occupancy());
    }
  }
}
