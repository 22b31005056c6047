#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "smchain/common/bytes.hpp"
#include "smchain/common/types.hpp"

namespace smchain::net {

struct Endpoint {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;

  std::string str() const { return host + ":" + std::to_string(port); }
};

/// Parses "host:port".
std::optional<Endpoint> parse_endpoint(const std::string& s);

/// Owning POSIX socket descriptor.
class Socket {
 public:
  Socket() = default;
  explicit Socket(int fd) : fd_(fd) {}
  Socket(Socket&& o) noexcept : fd_(o.release()) {}
  Socket& operator=(Socket&& o) noexcept;
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;
  ~Socket() { close(); }

  int fd() const { return fd_; }
  bool valid() const { return fd_ >= 0; }
  int release() {
    int f = fd_;
    fd_ = -1;
    return f;
  }
  void close();
  /// Unblocks a thread sitting in accept/recv on this socket.
  void shutdown();

 private:
  int fd_ = -1;
};

/// Returns an invalid socket when the peer cannot be reached within timeout.
Socket connect_tcp(const Endpoint& ep, Duration timeout);
/// Binds and listens; port 0 picks a free port (see local_port).
Socket listen_tcp(const Endpoint& ep, int backlog = 64);
std::uint16_t local_port(const Socket& s);
/// Blocks until a connection arrives or the listener is shut down.
Socket accept_tcp(const Socket& listener);

bool send_all(const Socket& s, ByteView data);
enum class RecvStatus { Ok, Timeout, Closed };
/// Reads exactly n bytes; a negative timeout waits forever.
RecvStatus recv_exact(const Socket& s, std::uint8_t* out, std::size_t n, Duration timeout);
/// Reads up to and excluding '\n'.
RecvStatus recv_line(const Socket& s, std::string& line, Duration timeout, std::size_t max_len = 1 << 20);

}  // namespace smchain::net
