#pragma once

#include <atomic>
#include <map>
#include <optional>
#include <thread>
#include <vector>

#include "smchain/common/net.hpp"
#include "smchain/crypto/crypto.hpp"
#include "smchain/transport/transport.hpp"

namespace smchain::transport {

/// Remote-read wire format, all integers little-endian.
///   request:  register_index u16 | slot_kind u8 | min_round u64     (11 bytes)
///   response: status u8 | round u64 | version u64 | len u32 | payload
/// status 0 = fresh, 1 = no-fresh-data. slot_kind 0xFF asks for the
/// server's identity; the response payload is its public key.
namespace wire {

inline constexpr std::size_t kRequestSize = 11;
inline constexpr std::size_t kResponseHeaderSize = 21;
inline constexpr std::uint8_t kIdentitySlot = 0xFF;
inline constexpr std::uint32_t kMaxPayload = 64u << 20;

struct Request {
  std::uint16_t register_index = 0;
  std::uint8_t slot_kind = 0;
  std::uint64_t min_round = 0;

  bool operator==(const Request&) const = default;
};

struct Response {
  std::uint8_t status = 1;
  std::uint64_t round = 0;
  std::uint64_t version = 0;
  Bytes payload;

  bool operator==(const Response&) const = default;
};

Bytes encode(const Request& r);
Request decode_request(ByteView b);
Bytes encode(const Response& r);
/// Header only; the payload length is returned through payload_len.
Response decode_response_header(ByteView header, std::uint32_t& payload_len);

}  // namespace wire

/// Serves this validator's registers to remote readers. One thread accepts,
/// one thread per connection answers requests in order.
class TcpRegisterServer {
 public:
  TcpRegisterServer(const RegisterArray& registers, crypto::PublicKey identity, net::Endpoint bind);
  ~TcpRegisterServer();
  TcpRegisterServer(const TcpRegisterServer&) = delete;
  TcpRegisterServer& operator=(const TcpRegisterServer&) = delete;

  std::uint16_t port() const { return port_; }
  std::uint64_t requests_served() const { return served_.load(); }
  void stop();

 private:
  void accept_loop();
  void serve(net::Socket conn);

  const RegisterArray& registers_;
  crypto::PublicKey identity_;
  net::Socket listener_;
  std::uint16_t port_ = 0;
  std::atomic<bool> stopping_{false};
  std::atomic<std::uint64_t> served_{0};
  std::thread acceptor_;
  std::mutex conn_mutex_;
  std::vector<std::thread> workers_;
  std::vector<int> open_fds_;
};

struct TcpTransportConfig {
  std::vector<net::Endpoint> endpoints;  // index 0 holds v1
  /// Expected identities; checked on connect when non-empty.
  std::vector<crypto::PublicKey> identities;
  Duration connect_timeout = std::chrono::seconds(5);
};

/// Transport for one validator process: writes land in the local array that
/// TcpRegisterServer exposes; reads of other registers go over TCP.
class TcpTransport final : public Transport {
 public:
  TcpTransport(ValidatorId self, RegisterArray& local, TcpTransportConfig config);
  ~TcpTransport() override;

  TransportKind kind() const override { return TransportKind::Tcp; }
  std::size_t size() const override { return config_.endpoints.size(); }

  ChannelHandle connect(ValidatorId local, ValidatorId remote, SlotKind slot) override;
  std::uint64_t raw_write(const ChannelHandle& h, ValidatorId owner, ValidatorId index, Bytes payload,
                          Round round) override;
  Task<ReadResult> raw_read(const ChannelHandle& h, ValidatorId reader, ValidatorId index,
                            Duration timeout, Round min_round = 0) override;

 private:
  net::Socket* link(ValidatorId remote);
  ReadResult blocking_read(ValidatorId index, SlotKind slot, Duration timeout, Round min_round);

  ValidatorId self_;
  RegisterArray& local_;
  TcpTransportConfig config_;
  std::mutex link_mutex_;
  std::map<std::uint16_t, net::Socket> links_;
};

/// Asks a register server for its identity; nullopt when unreachable.
std::optional<crypto::PublicKey> fetch_identity(const net::Endpoint& ep, Duration timeout);

}  // namespace smchain::transport
