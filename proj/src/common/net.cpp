#include "smchain/common/net.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <stdexcept>
#include <thread>

namespace smchain::net {

namespace {

sockaddr_in to_sockaddr(const Endpoint& ep) {
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(ep.port);
  if (inet_pton(AF_INET, ep.host.c_str(), &addr.sin_addr) != 1) {
    addrinfo hints{};
    hints.ai_family = AF_INET;
    addrinfo* res = nullptr;
    if (getaddrinfo(ep.host.c_str(), nullptr, &hints, &res) != 0 || !res) {
      throw std::runtime_error("cannot resolve host " + ep.host);
    }
    addr.sin_addr = reinterpret_cast<sockaddr_in*>(res->ai_addr)->sin_addr;
    freeaddrinfo(res);
  }
  return addr;
}

int wait_readable(int fd, Duration timeout) {
  pollfd p{fd, POLLIN, 0};
  const int ms = timeout.count() < 0
                     ? -1
                     : static_cast<int>(std::chrono::duration_cast<std::chrono::milliseconds>(timeout).count());
  for (;;) {
    const int rc = ::poll(&p, 1, ms);
    if (rc < 0 && errno == EINTR) continue;
    return rc;
  }
}

}  // namespace

std::optional<Endpoint> parse_endpoint(const std::string& s) {
  const auto colon = s.rfind(':');
  if (colon == std::string::npos || colon == 0) return std::nullopt;
  try {
    const int port = std::stoi(s.substr(colon + 1));
    if (port <= 0 || port > 65535) return std::nullopt;
    return Endpoint{s.substr(0, colon), static_cast<std::uint16_t>(port)};
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

Socket& Socket::operator=(Socket&& o) noexcept {
  if (this != &o) {
    close();
    fd_ = o.release();
  }
  return *this;
}

void Socket::close() {
  if (fd_ >= 0) ::close(fd_);
  fd_ = -1;
}

void Socket::shutdown() {
  if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
}

Socket connect_tcp(const Endpoint& ep, Duration timeout) {
  const sockaddr_in addr = to_sockaddr(ep);
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  for (;;) {
    Socket s(::socket(AF_INET, SOCK_STREAM, 0));
    if (!s.valid()) return {};
    if (::connect(s.fd(), reinterpret_cast<const sockaddr*>(&addr), sizeof addr) == 0) {
      int one = 1;
      ::setsockopt(s.fd(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
      return s;
    }
    if (std::chrono::steady_clock::now() >= deadline) return {};
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
}

Socket listen_tcp(const Endpoint& ep, int backlog) {
  Socket s(::socket(AF_INET, SOCK_STREAM, 0));
  if (!s.valid()) throw std::runtime_error("socket() failed");
  int one = 1;
  ::setsockopt(s.fd(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  const sockaddr_in addr = to_sockaddr(ep);
  if (::bind(s.fd(), reinterpret_cast<const sockaddr*>(&addr), sizeof addr) != 0) {
    throw std::runtime_error("bind " + ep.str() + " failed: " + std::strerror(errno));
  }
  if (::listen(s.fd(), backlog) != 0) throw std::runtime_error("listen failed");
  return s;
}

std::uint16_t local_port(const Socket& s) {
  sockaddr_in addr{};
  socklen_t len = sizeof addr;
  ::getsockname(s.fd(), reinterpret_cast<sockaddr*>(&addr), &len);
  return ntohs(addr.sin_port);
}

Socket accept_tcp(const Socket& listener) {
  for (;;) {
    const int fd = ::accept(listener.fd(), nullptr, nullptr);
    if (fd >= 0) {
      int one = 1;
      ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
      return Socket(fd);
    }
    if (errno == EINTR) continue;
    return {};
  }
}

bool send_all(const Socket& s, ByteView data) {
  std::size_t sent = 0;
  while (sent < data.size()) {
    const auto rc = ::send(s.fd(), data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
    if (rc < 0 && errno == EINTR) continue;
    if (rc <= 0) return false;
    sent += static_cast<std::size_t>(rc);
  }
  return true;
}

RecvStatus recv_exact(const Socket& s, std::uint8_t* out, std::size_t n, Duration timeout) {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  std::size_t got = 0;
  while (got < n) {
    Duration left = timeout.count() < 0 ? Duration{-1}
                                        : std::chrono::duration_cast<Duration>(deadline - std::chrono::steady_clock::now());
    if (timeout.count() >= 0 && left.count() <= 0) return RecvStatus::Timeout;
    const int rc = wait_readable(s.fd(), left);
    if (rc == 0) return RecvStatus::Timeout;
    if (rc < 0) return RecvStatus::Closed;
    const auto r = ::recv(s.fd(), out + got, n - got, 0);
    if (r < 0 && errno == EINTR) continue;
    if (r <= 0) return RecvStatus::Closed;
    got += static_cast<std::size_t>(r);
  }
  return RecvStatus::Ok;
}

RecvStatus recv_line(const Socket& s, std::string& line, Duration timeout, std::size_t max_len) {
  line.clear();
  for (;;) {
    std::uint8_t c;
    const auto st = recv_exact(s, &c, 1, timeout);
    if (st != RecvStatus::Ok) return st;
    if (c == '\n') return RecvStatus::Ok;
    line.push_back(static_cast<char>(c));
    if (line.size() > max_len) return RecvStatus::Closed;
  }
}

}  // namespace smchain::net
