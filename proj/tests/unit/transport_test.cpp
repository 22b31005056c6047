#include <doctest.h>

#include <atomic>
#include <thread>

#include "helpers.hpp"
#include "smchain/transport/sim_transport.hpp"

using namespace smchain;
using namespace smchain::transport;
using test::bytes_of;

namespace {

ValidatorId v(std::uint16_t i) { return ValidatorId{i}; }

struct SimFixture {
  EventLoop loop{EventLoop::Mode::Virtual};
  SimTransport sim;
  explicit SimFixture(std::size_t n = 5, TransportConfig cfg = {}) : sim(loop, n, cfg, 42) {}

  ReadResult read(const ChannelHandle& h, ValidatorId reader, ValidatorId index, Duration timeout) {
    return run_to_completion(loop, sim.raw_read(h, reader, index, timeout));
  }
};

}  // namespace

TEST_CASE("connect returns connected handles, self channel is internal") {
  SimFixture fx;
  auto h = fx.sim.connect(v(1), v(2), SlotKind::Commit);
  CHECK(h.connected());
  CHECK(h.kind() == ChannelKind::External);
  CHECK(h.transport() == TransportKind::Simulated);
  auto self = fx.sim.connect(v(1), v(1), SlotKind::Commit);
  CHECK(self.connected());
  CHECK(self.kind() == ChannelKind::Internal);

  auto again = fx.sim.connect(v(1), v(2), SlotKind::Commit);
  fx.sim.disconnect(again);
  CHECK_FALSE(h.connected());
}

TEST_CASE("connect to an unknown id fails") {
  SimFixture fx;
  try {
    fx.sim.connect(v(1), v(99), SlotKind::Commit);
    FAIL("expected unknown-id");
  } catch (const TransportError& e) {
    CHECK(e.code() == TransportErrorCode::UnknownId);
  }
}

TEST_CASE("raw_write enforces the owner and counts versions") {
  SimFixture fx;
  auto h = fx.sim.connect(v(2), v(2), SlotKind::Commit);
  CHECK(fx.sim.raw_write(h, v(2), v(2), bytes_of("p"), 3) == 1);
  CHECK(fx.sim.raw_write(h, v(2), v(2), bytes_of("q"), 3) == 2);
  try {
    fx.sim.raw_write(h, v(2), v(5), bytes_of("p"), 3);
    FAIL("expected policy violation");
  } catch (const TransportError& e) {
    CHECK(e.code() == TransportErrorCode::PolicyViolation);
  }
}

TEST_CASE("raw_read: empty, read-your-write, forced timeout, disconnected") {
  SimFixture fx;
  auto w = fx.sim.connect(v(2), v(2), SlotKind::Commit);
  auto r = fx.sim.connect(v(1), v(2), SlotKind::Commit);

  CHECK(fx.read(r, v(1), v(2), micros(5000)).status == ReadStatus::NoFreshData);

  fx.sim.raw_write(w, v(2), v(2), bytes_of("payload"), 3);
  auto res = fx.read(r, v(1), v(2), micros(5000));
  REQUIRE(res.status == ReadStatus::Fresh);
  CHECK(res.snapshot.round == 3);
  CHECK(res.snapshot.payload == bytes_of("payload"));
  CHECK(res.snapshot.version == 1);

  CHECK(fx.read(r, v(1), v(2), Duration{0}).status == ReadStatus::Timeout);

  fx.sim.disconnect(r);
  fx.sim.disconnect(r);
  CHECK_FALSE(r.connected());
  CHECK_THROWS_AS(fx.read(r, v(1), v(2), micros(5000)), TransportError);
}

TEST_CASE("single writer: only the diagonal of all (owner, index) writes is accepted") {
  constexpr std::size_t n = 7;
  SimFixture fx(n);
  std::size_t accepted = 0;
  for (std::uint16_t owner = 1; owner <= n; ++owner) {
    auto h = fx.sim.connect(v(owner), v(owner), SlotKind::Commit);
    for (std::uint16_t index = 1; index <= n; ++index) {
      for (auto slot : {SlotKind::Propose, SlotKind::Commit}) {
        auto hs = fx.sim.connect(v(owner), v(owner), slot);
        try {
          fx.sim.raw_write(hs, v(owner), v(index), bytes_of("x"), 1);
          ++accepted;
          CHECK(owner == index);
        } catch (const TransportError& e) {
          CHECK(owner != index);
          CHECK(e.code() == TransportErrorCode::PolicyViolation);
        }
      }
    }
    (void)h;
  }
  CHECK(accepted == 2 * n);
}

TEST_CASE("atomic snapshots under concurrent writes and reads") {
  RegisterArray regs(2);
  std::atomic<bool> stop{false};
  std::vector<Bytes> patterns;
  for (int i = 0; i < 16; ++i) patterns.push_back(Bytes(4096 + i * 17, static_cast<std::uint8_t>(i)));
  std::thread writer([&] {
    for (int i = 0; i < 20000; ++i) regs.write(v(1), v(1), SlotKind::Commit, patterns[i % 16], 1);
    stop = true;
  });
  std::vector<std::thread> readers;
  std::atomic<std::size_t> torn{0}, regressions{0};
  for (int t = 0; t < 3; ++t) {
    readers.emplace_back([&] {
      std::uint64_t last = 0;
      while (!stop) {
        auto snap = regs.read(v(1), SlotKind::Commit);
        if (!snap) continue;
        const auto& p = snap->payload;
        const bool whole = !p.empty() && p.size() == 4096 + p[0] * 17u &&
                           std::all_of(p.begin(), p.end(), [&](std::uint8_t b) { return b == p[0]; });
        if (!whole) ++torn;
        if (snap->version < last) ++regressions;
        last = snap->version;
      }
    });
  }
  writer.join();
  for (auto& r : readers) r.join();
  CHECK(torn == 0);
  CHECK(regressions == 0);
}

TEST_CASE("an adverse delay model is clamped to delta_max and the clamps are counted") {
  TransportConfig cfg;
  cfg.delta_max = micros(300);
  cfg.delay.external_latency = micros(200);
  cfg.delay.jitter = micros(400);
  cfg.delay.ns_per_byte = 100;
  SimFixture fx(5, cfg);
  auto w = fx.sim.connect(v(3), v(3), SlotKind::Propose);
  fx.sim.raw_write(w, v(3), v(3), Bytes(2000, 1), 1);
  for (std::uint16_t reader = 1; reader <= 5; ++reader) {
    auto h = fx.sim.connect(v(reader), v(3), SlotKind::Propose);
    for (int i = 0; i < 200; ++i) {
      auto r = fx.read(h, v(reader), v(3), micros(300));
      CHECK(r.status == ReadStatus::Fresh);
      CHECK(r.elapsed <= cfg.delta_max);
    }
  }
  CHECK(fx.sim.stats().honest_reads == 1000);
  CHECK(fx.sim.stats().honest_reads_over_delta > 0);
  CHECK(fx.sim.stats().max_honest_delay <= cfg.delta_max);
}

TEST_CASE("versions seen by one reader never decrease") {
  SimFixture fx(3);
  auto w = fx.sim.connect(v(2), v(2), SlotKind::Commit);
  auto r = fx.sim.connect(v(1), v(2), SlotKind::Commit);
  std::uint64_t last = 0;
  bool monotone = true;
  auto writer = [&]() -> Task<void> {
    for (int i = 0; i < 100; ++i) {
      fx.sim.raw_write(w, v(2), v(2), bytes_of("w" + std::to_string(i)), 1);
      co_await fx.loop.sleep_for(micros(7));
    }
  };
  auto reader = [&]() -> Task<void> {
    for (int i = 0; i < 100; ++i) {
      auto res = co_await fx.sim.raw_read(r, v(1), v(2), micros(5000));
      if (res.status == ReadStatus::Fresh) {
        if (res.snapshot.version < last) monotone = false;
        last = res.snapshot.version;
      }
    }
  };
  fx.loop.spawn(writer());
  fx.loop.spawn(reader());
  fx.loop.run();
  CHECK(monotone);
  CHECK(last > 0);
}

TEST_CASE("byzantine-only drops never touch honest pairs") {
  TransportConfig cfg;
  cfg.drop_policy = DropPolicy::ByzantineOnly;
  cfg.byzantine_drop_probability = 1.0;
  cfg.byzantine = {v(3)};
  SimFixture fx(3, cfg);
  for (std::uint16_t i = 1; i <= 3; ++i) {
    auto w = fx.sim.connect(v(i), v(i), SlotKind::Commit);
    fx.sim.raw_write(w, v(i), v(i), bytes_of("x"), 1);
  }
  auto honest = fx.sim.connect(v(1), v(2), SlotKind::Commit);
  auto byz = fx.sim.connect(v(1), v(3), SlotKind::Commit);
  CHECK(fx.read(honest, v(1), v(2), micros(5000)).status == ReadStatus::Fresh);
  CHECK(fx.read(byz, v(1), v(3), micros(5000)).status == ReadStatus::Timeout);
}

TEST_CASE("simulated delays are reproducible from the seed") {
  auto sample = [](std::uint64_t seed) {
    EventLoop loop;
    SimTransport sim(loop, 3, {}, seed);
    auto h = sim.connect(v(1), v(2), SlotKind::Commit);
    std::vector<std::int64_t> out;
    for (int i = 0; i < 50; ++i) out.push_back(sim.sample_delay(h, 100 * i).count());
    return out;
  };
  CHECK(sample(5) == sample(5));
  CHECK(sample(5) != sample(6));
}

TEST_CASE("the default delay model never needs clamping") {
  TransportConfig cfg;
  SimFixture fx(5, cfg);
  auto w = fx.sim.connect(v(2), v(2), SlotKind::Commit);
  fx.sim.raw_write(w, v(2), v(2), Bytes(600, 3), 1);
  for (std::uint16_t reader = 1; reader <= 5; ++reader) {
    auto h = fx.sim.connect(v(reader), v(2), SlotKind::Commit);
    for (int i = 0; i < 200; ++i) CHECK(fx.read(h, v(reader), v(2), cfg.delta_max).status == ReadStatus::Fresh);
  }
  CHECK(fx.sim.stats().honest_reads == 1000);
  CHECK(fx.sim.stats().honest_reads_over_delta == 0);
}
