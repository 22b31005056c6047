#include "smchain/transport/transport.hpp"

#include <sstream>

namespace smchain::transport {

const char* to_string(TransportErrorCode c) {
  switch (c) {
    case TransportErrorCode::UnknownId: return "unknown-id";
    case TransportErrorCode::TransportUnreachable: return "transport-unreachable";
    case TransportErrorCode::PolicyViolation: return "policy-violation";
    case TransportErrorCode::DisconnectedChannel: return "disconnected-channel";
  }
  return "?";
}

const char* to_string(ReadStatus s) {
  switch (s) {
    case ReadStatus::Fresh: return "fresh";
    case ReadStatus::NoFreshData: return "no-fresh-data";
    case ReadStatus::Timeout: return "timeout";
  }
  return "?";
}

bool ChannelHandle::connected() const {
  if (!state_) return false;
  std::lock_guard lock(state_->mutex);
  return state_->connected;
}

ChannelHandle ChannelManager::open(ValidatorId local, ValidatorId remote, SlotKind slot, ChannelKind kind,
                                   TransportKind transport) {
  std::lock_guard lock(mutex_);
  const Key key{local.value, remote.value, static_cast<std::uint8_t>(slot)};
  if (auto it = channels_.find(key); it != channels_.end()) {
    std::lock_guard state_lock(it->second.state_->mutex);
    it->second.state_->connected = true;
    return it->second;
  }
  ChannelHandle h;
  h.local_ = local;
  h.remote_ = remote;
  h.slot_ = slot;
  h.kind_ = kind;
  h.transport_ = transport;
  h.state_ = std::make_shared<ChannelHandle::State>();
  channels_.emplace(key, h);
  return h;
}

void ChannelManager::close(const ChannelHandle& h) {
  if (!h.state_) return;
  std::lock_guard lock(h.state_->mutex);
  h.state_->connected = false;
}

std::size_t ChannelManager::connected_count() const {
  std::lock_guard lock(mutex_);
  std::size_t n = 0;
  for (const auto& [key, h] : channels_) n += h.connected() ? 1 : 0;
  return n;
}

std::string ChannelManager::describe() const {
  std::lock_guard lock(mutex_);
  std::ostringstream out;
  for (const auto& [key, h] : channels_) {
    out << h.local_id().str() << " -> " << h.remote_id().str() << " [" << to_string(h.slot()) << ", "
        << (h.kind() == ChannelKind::Internal ? "internal" : "external") << ", "
        << (h.transport() == TransportKind::Simulated ? "simulated" : "tcp") << ", "
        << (h.connected() ? "connected" : "disconnected") << "]\n";
  }
  return out.str();
}

void Transport::check_connected(const ChannelHandle& h) const {
  if (!h.connected()) {
    throw TransportError(TransportErrorCode::DisconnectedChannel,
                         h.local_id().str() + " -> " + h.remote_id().str());
  }
}

void Transport::check_write(const ChannelHandle& h, ValidatorId owner, ValidatorId index) const {
  check_connected(h);
  if (owner != index || h.local_id() != owner || h.remote_id() != index) {
    throw TransportError(TransportErrorCode::PolicyViolation,
                         owner.str() + " may not write register " + index.str());
  }
}

void Transport::check_read(const ChannelHandle& h, ValidatorId reader, ValidatorId index) const {
  check_connected(h);
  if (h.local_id() != reader || h.remote_id() != index) {
    throw std::invalid_argument("read issued on a channel for a different endpoint pair");
  }
}

Task<std::vector<ReadResult>> Transport::raw_read_batch(std::vector<ReadRequest> requests, Duration timeout) {
  std::vector<ReadResult> out;
  out.reserve(requests.size());
  Duration left = timeout;
  for (const auto& req : requests) {
    ReadResult r = co_await raw_read(req.handle, req.reader, req.index, left, req.min_round);
    left -= r.elapsed;
    if (left.count() < 0) left = Duration{0};
    out.push_back(std::move(r));
  }
  co_return out;
}

}  // namespace smchain::transport
