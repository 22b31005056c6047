#include <doctest.h>

#include <set>

#include "helpers.hpp"
#include "smchain/common/rng.hpp"
#include "smchain/monitor/monitor.hpp"
#include "smchain/transport/sim_transport.hpp"

using namespace smchain;
using namespace smchain::monitor;
using test::bytes_of;

namespace {

ValidatorId v(std::uint16_t i) { return ValidatorId{i}; }

struct Net {
  EventLoop loop;
  transport::SimTransport sim;
  std::vector<std::unique_ptr<SmMonitor>> mons;

  explicit Net(std::size_t n, std::uint64_t seed = 3) : sim(loop, n, {}, seed) {
    for (std::uint16_t i = 1; i <= n; ++i) {
      mons.push_back(std::make_unique<SmMonitor>(v(i), sim));
      mons.back()->connect_all();
    }
  }
  SmMonitor& m(std::uint16_t i) { return *mons.at(i - 1); }
  ScanBuffer scan(std::uint16_t i, Round k) { return run_to_completion(loop, m(i).scan(k, micros(5000))); }
  MonitorRead read(std::uint16_t reader, std::uint16_t target, SlotKind slot, Round k) {
    return run_to_completion(loop, m(reader).read(v(target), slot, k, micros(5000)));
  }
};

}  // namespace

TEST_CASE("write goes to the executant's own register only") {
  Net net(3);
  CHECK(net.m(1).write(v(1), v(1), SlotKind::Commit, bytes_of("vote"), 4) >= 1);
  CHECK_THROWS_AS(net.m(1).write(v(1), v(2), SlotKind::Commit, bytes_of("vote"), 4), transport::TransportError);
  const auto v1 = net.m(2).write_own(SlotKind::Commit, bytes_of("a"), 4);
  const auto v2 = net.m(2).write_own(SlotKind::Commit, bytes_of("b"), 4);
  CHECK(v2 == v1 + 1);
  auto r = net.read(1, 2, SlotKind::Commit, 4);
  REQUIRE(r.outcome == ReadOutcome::Payload);
  CHECK(r.payload == bytes_of("b"));
}

TEST_CASE("read returns only payloads tagged with the queried round") {
  Net net(3);
  net.m(2).write_own(SlotKind::Commit, bytes_of("r4"), 4);
  CHECK(net.read(1, 2, SlotKind::Commit, 4).outcome == ReadOutcome::Payload);
  net.m(3).write_own(SlotKind::Commit, bytes_of("r3"), 3);
  CHECK(net.read(1, 3, SlotKind::Commit, 4).outcome == ReadOutcome::NoFreshData);
}

TEST_CASE("scan reads each fresh register once per round") {
  Net net(5);
  for (std::uint16_t i = 1; i <= 5; ++i) net.m(i).write_own(SlotKind::Commit, bytes_of("c" + std::to_string(i)), 1);
  auto first = net.scan(1, 1);
  CHECK(first.count() == 5);
  CHECK(net.m(1).scan_map().seen_count() == 5);
  CHECK(net.scan(1, 1).empty());
  CHECK(net.m(1).stats().round_successful_reads == 5);
}

TEST_CASE("staged writes: 2 of 5 fresh, then the remaining 3") {
  Net net(5);
  net.m(2).write_own(SlotKind::Commit, bytes_of("x"), 1);
  net.m(4).write_own(SlotKind::Commit, bytes_of("x"), 1);
  auto a = net.scan(1, 1);
  CHECK(a.count() == 2);
  for (std::uint16_t i : {1, 3, 5}) net.m(i).write_own(SlotKind::Commit, bytes_of("y"), 1);
  auto b = net.scan(1, 1);
  CHECK(b.count() == 3);
  std::vector<std::uint16_t> order;
  for (const auto& e : b.entries) order.push_back(e.id.value);
  CHECK(order == std::vector<std::uint16_t>{1, 3, 5});
}

TEST_CASE("reset clears every bit and keeps N entries") {
  Net net(4);
  for (std::uint16_t i = 1; i <= 4; ++i) net.m(i).write_own(SlotKind::Commit, bytes_of("x"), 1);
  net.scan(1, 1);
  net.m(1).reset_scan(2);
  CHECK(net.m(1).scan_map().size() == 4);
  CHECK(net.m(1).scan_map().seen_count() == 0);
  CHECK(net.m(1).scan_map().round() == 2);
  CHECK(net.scan(1, 2).empty());
  CHECK_THROWS(net.m(1).reset_scan(2));
  CHECK_THROWS(net.m(1).reset_scan(1));
  CHECK_THROWS(net.scan(1, 3));
}

TEST_CASE("scan economy, completeness and freshness under random schedules") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    constexpr std::size_t n = 7;
    Net net(n, seed);
    Rng rng(seed);
    const Round k = 1 + rng.below(5);
    for (Round r = 2; r <= k; ++r) net.m(1).reset_scan(r);
    // Some registers hold stale data from an earlier round.
    for (std::uint16_t i = 1; i <= n; ++i)
      if (k > 1 && rng.chance(0.5)) net.m(i).write_own(SlotKind::Commit, bytes_of("old"), k - 1);
    std::vector<std::uint16_t> pending;
    for (std::uint16_t i = 1; i <= n; ++i) pending.push_back(i);
    for (std::size_t i = pending.size(); i > 1; --i) std::swap(pending[i - 1], pending[rng.below(i)]);

    std::multiset<std::uint16_t> seen;
    bool fresh_only = true;
    for (int pass = 0; pass < 40; ++pass) {
      if (!pending.empty() && rng.chance(0.6)) {
        const auto id = pending.back();
        pending.pop_back();
        net.m(id).write_own(SlotKind::Commit, bytes_of("k" + std::to_string(k)), k);
      }
      auto buf = net.scan(1, k);
      for (const auto& e : buf.entries) {
        seen.insert(e.id.value);
        if (e.payload != bytes_of("k" + std::to_string(k))) fresh_only = false;
      }
    }
    while (!pending.empty()) {
      net.m(pending.back()).write_own(SlotKind::Commit, bytes_of("k" + std::to_string(k)), k);
      pending.pop_back();
    }
    for (int pass = 0; pass < 3; ++pass)
      for (const auto& e : net.scan(1, k).entries) seen.insert(e.id.value);

    CHECK(fresh_only);
    CHECK(seen.size() == n);
    CHECK(std::set<std::uint16_t>(seen.begin(), seen.end()).size() == n);
    CHECK(net.m(1).stats().round_successful_reads == n);
  }
}

TEST_CASE("peek_round reports the stored tag without counting as a scan read") {
  Net net(3);
  net.m(3).write_own(SlotKind::Commit, bytes_of("x"), 9);
  auto r = run_to_completion(net.loop, net.m(1).peek_round(v(3), SlotKind::Commit, micros(5000)));
  CHECK(r == std::optional<Round>(9));
  CHECK(net.m(1).stats().total_successful_reads == 0);
  auto empty = run_to_completion(net.loop, net.m(1).peek_round(v(2), SlotKind::Commit, micros(5000)));
  CHECK_FALSE(empty.has_value());
}
