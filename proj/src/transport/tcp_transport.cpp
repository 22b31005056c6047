#include "smchain/transport/tcp_transport.hpp"

#include <sys/socket.h>

#include <algorithm>
#include <chrono>

namespace smchain::transport {

namespace wire {

Bytes encode(const Request& r) {
  ByteWriter w;
  w.put_u16(r.register_index);
  w.put_u8(r.slot_kind);
  w.put_u64(r.min_round);
  return w.take();
}

Request decode_request(ByteView b) {
  if (b.size() != kRequestSize) throw DecodeError("request must be 11 bytes");
  ByteReader r(b);
  Request req;
  req.register_index = r.get_u16();
  req.slot_kind = r.get_u8();
  req.min_round = r.get_u64();
  return req;
}

Bytes encode(const Response& r) {
  ByteWriter w;
  w.put_u8(r.status);
  w.put_u64(r.round);
  w.put_u64(r.version);
  w.put_u32(static_cast<std::uint32_t>(r.payload.size()));
  w.put_raw(r.payload);
  return w.take();
}

Response decode_response_header(ByteView header, std::uint32_t& payload_len) {
  if (header.size() != kResponseHeaderSize) throw DecodeError("response header must be 21 bytes");
  ByteReader r(header);
  Response resp;
  resp.status = r.get_u8();
  if (resp.status > 1) throw DecodeError("unknown response status");
  resp.round = r.get_u64();
  resp.version = r.get_u64();
  payload_len = r.get_u32();
  if (payload_len > kMaxPayload) throw DecodeError("payload too large");
  return resp;
}

}  // namespace wire

TcpRegisterServer::TcpRegisterServer(const RegisterArray& registers, crypto::PublicKey identity,
                                     net::Endpoint bind)
    : registers_(registers), identity_(identity), listener_(net::listen_tcp(bind)) {
  port_ = net::local_port(listener_);
  acceptor_ = std::thread([this] { accept_loop(); });
}

TcpRegisterServer::~TcpRegisterServer() { stop(); }

void TcpRegisterServer::stop() {
  if (stopping_.exchange(true)) return;
  listener_.shutdown();
  if (acceptor_.joinable()) acceptor_.join();
  {
    std::lock_guard lock(conn_mutex_);
    for (int fd : open_fds_) ::shutdown(fd, SHUT_RDWR);
  }
  for (auto& t : workers_) {
    if (t.joinable()) t.join();
  }
  listener_.close();
}

void TcpRegisterServer::accept_loop() {
  while (!stopping_) {
    net::Socket conn = net::accept_tcp(listener_);
    if (!conn.valid()) break;
    std::lock_guard lock(conn_mutex_);
    if (stopping_) break;
    open_fds_.push_back(conn.fd());
    workers_.emplace_back([this, c = std::move(conn)]() mutable { serve(std::move(c)); });
  }
}

void TcpRegisterServer::serve(net::Socket conn) {
  std::array<std::uint8_t, wire::kRequestSize> buf{};
  while (!stopping_) {
    if (net::recv_exact(conn, buf.data(), buf.size(), Duration{-1}) != net::RecvStatus::Ok) break;
    wire::Response resp;
    try {
      const auto req = wire::decode_request(buf);
      if (req.slot_kind == wire::kIdentitySlot) {
        resp.status = 0;
        resp.payload.assign(identity_.begin(), identity_.end());
      } else if (req.slot_kind <= 1 && registers_.contains(ValidatorId{req.register_index})) {
        auto snap = registers_.read(ValidatorId{req.register_index}, static_cast<SlotKind>(req.slot_kind));
        if (snap && snap->round >= req.min_round) {
          resp.status = 0;
          resp.round = snap->round;
          resp.version = snap->version;
          resp.payload = snap->payload;
        }
      }
    } catch (const std::exception&) {
      resp = wire::Response{};
    }
    ++served_;
    if (!net::send_all(conn, wire::encode(resp))) break;
  }
  std::lock_guard lock(conn_mutex_);
  std::erase(open_fds_, conn.fd());
}

namespace {

std::optional<wire::Response> roundtrip(const net::Socket& s, const wire::Request& req, Duration timeout) {
  if (!net::send_all(s, wire::encode(req))) return std::nullopt;
  std::array<std::uint8_t, wire::kResponseHeaderSize> hdr{};
  if (net::recv_exact(s, hdr.data(), hdr.size(), timeout) != net::RecvStatus::Ok) return std::nullopt;
  std::uint32_t len = 0;
  wire::Response resp = wire::decode_response_header(hdr, len);
  resp.payload.resize(len);
  if (len > 0 && net::recv_exact(s, resp.payload.data(), len, timeout) != net::RecvStatus::Ok) {
    return std::nullopt;
  }
  return resp;
}

}  // namespace

std::optional<crypto::PublicKey> fetch_identity(const net::Endpoint& ep, Duration timeout) {
  net::Socket s = net::connect_tcp(ep, timeout);
  if (!s.valid()) return std::nullopt;
  auto resp = roundtrip(s, wire::Request{0, wire::kIdentitySlot, 0}, timeout);
  if (!resp || resp->status != 0 || resp->payload.size() != 32) return std::nullopt;
  crypto::PublicKey pk{};
  std::copy(resp->payload.begin(), resp->payload.end(), pk.begin());
  return pk;
}

TcpTransport::TcpTransport(ValidatorId self, RegisterArray& local, TcpTransportConfig config)
    : self_(self), local_(local), config_(std::move(config)) {}

TcpTransport::~TcpTransport() = default;

net::Socket* TcpTransport::link(ValidatorId remote) {
  std::lock_guard lock(link_mutex_);
  auto it = links_.find(remote.value);
  if (it != links_.end() && it->second.valid()) return &it->second;
  net::Socket s = net::connect_tcp(config_.endpoints.at(remote.value - 1), config_.connect_timeout);
  if (!s.valid()) return nullptr;
  auto [pos, inserted] = links_.insert_or_assign(remote.value, std::move(s));
  return &pos->second;
}

ChannelHandle TcpTransport::connect(ValidatorId local, ValidatorId remote, SlotKind slot) {
  const auto n = config_.endpoints.size();
  if (local.value < 1 || local.value > n) throw TransportError(TransportErrorCode::UnknownId, local.str());
  if (remote.value < 1 || remote.value > n) throw TransportError(TransportErrorCode::UnknownId, remote.str());
  if (local != self_) throw TransportError(TransportErrorCode::UnknownId, "transport belongs to " + self_.str());
  if (remote != self_) {
    const auto& ep = config_.endpoints.at(remote.value - 1);
    if (!config_.identities.empty()) {
      auto id = fetch_identity(ep, config_.connect_timeout);
      if (!id) throw TransportError(TransportErrorCode::TransportUnreachable, ep.str());
      if (*id != config_.identities.at(remote.value - 1)) {
        throw TransportError(TransportErrorCode::TransportUnreachable, ep.str() + " presented a foreign identity");
      }
    }
    if (!link(remote)) throw TransportError(TransportErrorCode::TransportUnreachable, ep.str());
  }
  return channels_.open(local, remote, slot, remote == self_ ? ChannelKind::Internal : ChannelKind::External,
                        TransportKind::Tcp);
}

std::uint64_t TcpTransport::raw_write(const ChannelHandle& h, ValidatorId owner, ValidatorId index, Bytes payload,
                                      Round round) {
  check_write(h, owner, index);
  return local_.write(owner, index, h.slot(), std::move(payload), round);
}

ReadResult TcpTransport::blocking_read(ValidatorId index, SlotKind slot, Duration timeout, Round min_round) {
  const auto start = std::chrono::steady_clock::now();
  ReadResult r;
  auto finish = [&] {
    r.elapsed = std::chrono::duration_cast<Duration>(std::chrono::steady_clock::now() - start);
    return r;
  };
  if (index == self_) {
    auto snap = local_.read(index, slot);
    if (snap && snap->round >= min_round) {
      r.status = ReadStatus::Fresh;
      r.snapshot = *snap;
    }
    return finish();
  }
  if (timeout.count() <= 0) {
    r.status = ReadStatus::Timeout;
    return finish();
  }
  std::lock_guard lock(link_mutex_);
  auto it = links_.find(index.value);
  if (it == links_.end() || !it->second.valid()) {
    net::Socket s = net::connect_tcp(config_.endpoints.at(index.value - 1), timeout);
    if (!s.valid()) {
      r.status = ReadStatus::Timeout;
      return finish();
    }
    it = links_.insert_or_assign(index.value, std::move(s)).first;
  }
  const wire::Request req{index.value, static_cast<std::uint8_t>(slot), min_round};
  std::optional<wire::Response> resp;
  try {
    resp = roundtrip(it->second, req, timeout);
  } catch (const DecodeError&) {
    resp.reset();
  }
  if (!resp) {
    // A late response would desynchronise the stream; start a fresh link.
    it->second.close();
    r.status = ReadStatus::Timeout;
    return finish();
  }
  if (resp->status == 0) {
    r.status = ReadStatus::Fresh;
    r.snapshot.round = resp->round;
    r.snapshot.version = resp->version;
    r.snapshot.slot = slot;
    r.snapshot.payload = std::move(resp->payload);
  }
  return finish();
}

Task<ReadResult> TcpTransport::raw_read(const ChannelHandle& h, ValidatorId reader, ValidatorId index,
                                        Duration timeout, Round min_round) {
  check_read(h, reader, index);
  co_return blocking_read(index, h.slot(), timeout, min_round);
}

}  // namespace smchain::transport
