#include <doctest.h>

#include "helpers.hpp"
#include "smchain/common/event_loop.hpp"
#include "smchain/crypto/crypto.hpp"
#include "smchain/monitor/monitor.hpp"
#include "smchain/transport/tcp_transport.hpp"

using namespace smchain;
using namespace smchain::transport;

namespace {

ValidatorId v(std::uint16_t i) { return ValidatorId{i}; }

/// Three validators, each with its own register array and server, as three
/// processes would have.
struct Trio {
  std::vector<crypto::KeyPair> keys;
  std::vector<std::unique_ptr<RegisterArray>> regs;
  std::vector<std::unique_ptr<TcpRegisterServer>> servers;
  TcpTransportConfig cfg;

  Trio() {
    for (std::uint16_t i = 1; i <= 3; ++i) {
      keys.push_back(crypto::keygen_from_label(3, "v" + std::to_string(i)));
      regs.push_back(std::make_unique<RegisterArray>(3));
      servers.push_back(std::make_unique<TcpRegisterServer>(*regs.back(), keys.back().pk, net::Endpoint{"127.0.0.1", 0}));
      cfg.endpoints.push_back({"127.0.0.1", servers.back()->port()});
      cfg.identities.push_back(keys.back().pk);
    }
  }
};

}  // namespace

TEST_CASE("tcp transport: local writes are visible to remote readers") {
  Trio t;
  TcpTransport t1(v(1), *t.regs[0], t.cfg);
  TcpTransport t2(v(2), *t.regs[1], t.cfg);
  EventLoop loop(EventLoop::Mode::RealTime);

  auto w2 = t2.connect(v(2), v(2), SlotKind::Propose);
  CHECK(t2.raw_write(w2, v(2), v(2), test::bytes_of("block"), 4) == 1);
  CHECK_THROWS_AS(t2.raw_write(w2, v(2), v(1), test::bytes_of("x"), 4), TransportError);

  auto h = t1.connect(v(1), v(2), SlotKind::Propose);
  CHECK(h.kind() == ChannelKind::External);
  auto r = run_to_completion(loop, t1.raw_read(h, v(1), v(2), std::chrono::seconds(2), 4));
  CHECK(r.status == ReadStatus::Fresh);
  CHECK(r.snapshot.round == 4);
  CHECK(r.snapshot.payload == test::bytes_of("block"));
  auto stale = run_to_completion(loop, t1.raw_read(h, v(1), v(2), std::chrono::seconds(2), 5));
  CHECK(stale.status == ReadStatus::NoFreshData);

  t2.raw_write(w2, v(2), v(2), test::bytes_of("block2"), 5);
  auto again = run_to_completion(loop, t1.raw_read(h, v(1), v(2), std::chrono::seconds(2), 5));
  CHECK(again.snapshot.version == 2);
  CHECK(again.snapshot.payload == test::bytes_of("block2"));

  auto self = t1.connect(v(1), v(1), SlotKind::Commit);
  CHECK(self.kind() == ChannelKind::Internal);
  CHECK(fetch_identity(t.cfg.endpoints[2], std::chrono::seconds(1)) == t.keys[2].pk);
}

TEST_CASE("tcp transport: a stopped peer times out and an impostor is refused") {
  Trio t;
  auto cfg = t.cfg;
  std::swap(cfg.identities[1], cfg.identities[2]);
  TcpTransport t1(v(1), *t.regs[0], cfg);
  EventLoop loop(EventLoop::Mode::RealTime);
  CHECK_THROWS_AS(
      {
        auto h2 = t1.connect(v(1), v(2), SlotKind::Commit);
        run_to_completion(loop, t1.raw_read(h2, v(1), v(2), std::chrono::milliseconds(300), 0));
      },
      TransportError);

  TcpTransport ok(v(1), *t.regs[0], t.cfg);
  auto h3 = ok.connect(v(1), v(3), SlotKind::Commit);
  t.servers[2]->stop();
  auto r = run_to_completion(loop, ok.raw_read(h3, v(1), v(3), std::chrono::milliseconds(200), 0));
  CHECK(r.status == ReadStatus::Timeout);
  TcpTransport late(v(1), *t.regs[0], t.cfg);
  CHECK_THROWS_AS(late.connect(v(1), v(3), SlotKind::Commit), TransportError);
}

TEST_CASE("monitor scans over tcp see every owner's commit") {
  Trio t;
  std::vector<std::unique_ptr<TcpTransport>> tr;
  for (std::uint16_t i = 1; i <= 3; ++i) tr.push_back(std::make_unique<TcpTransport>(v(i), *t.regs[i - 1], t.cfg));
  EventLoop loop(EventLoop::Mode::RealTime);
  std::vector<std::unique_ptr<monitor::SmMonitor>> mons;
  for (std::uint16_t i = 1; i <= 3; ++i) {
    mons.push_back(std::make_unique<monitor::SmMonitor>(v(i), *tr[i - 1]));
    mons.back()->connect_all();
    mons.back()->write_own(SlotKind::Commit, test::bytes_of("c" + std::to_string(i)), 1);
  }
  auto buf = run_to_completion(loop, mons[0]->scan(1, std::chrono::seconds(2)));
  CHECK(buf.entries.size() == 3);
}
