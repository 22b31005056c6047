#include "smchain/monitor/monitor.hpp"

#include <algorithm>
#include <stdexcept>

namespace smchain::monitor {

ScanMap::ScanMap(std::size_t n, Round round) : bits_(n, 0), round_(round) {}

std::size_t ScanMap::seen_count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

void ScanMap::reset(Round next_round) {
  if (next_round <= round_) {
    throw std::logic_error("scan map rounds must increase: " + std::to_string(round_) + " -> " +
                           std::to_string(next_round));
  }
  std::fill(bits_.begin(), bits_.end(), std::uint8_t{0});
  round_ = next_round;
}

SmMonitor::SmMonitor(ValidatorId self, transport::Transport& transport)
    : self_(self), transport_(transport), map_(transport.size()) {
  propose_channels_.resize(transport.size());
  commit_channels_.resize(transport.size());
}

void SmMonitor::connect_all() {
  for (std::uint16_t j = 1; j <= size(); ++j) {
    propose_channels_[j - 1] = transport_.connect(self_, ValidatorId{j}, SlotKind::Propose);
    commit_channels_[j - 1] = transport_.connect(self_, ValidatorId{j}, SlotKind::Commit);
  }
}

transport::ChannelHandle& SmMonitor::channel(ValidatorId target, SlotKind slot) {
  if (target.value < 1 || target.value > size()) {
    throw transport::TransportError(transport::TransportErrorCode::UnknownId, target.str());
  }
  auto& chans = slot == SlotKind::Propose ? propose_channels_ : commit_channels_;
  auto& h = chans[target.value - 1];
  if (!h.valid()) h = transport_.connect(self_, target, slot);
  return h;
}

std::uint64_t SmMonitor::write(ValidatorId executant, ValidatorId target, SlotKind slot, Bytes payload,
                               Round round) {
  if (executant != target || executant != self_) {
    throw transport::TransportError(transport::TransportErrorCode::PolicyViolation,
                                    executant.str() + " may not write register " + target.str());
  }
  return transport_.raw_write(channel(target, slot), executant, target, std::move(payload), round);
}

Task<MonitorRead> SmMonitor::read(ValidatorId target, SlotKind slot, Round round, Duration timeout) {
  auto& h = channel(target, slot);
  ++stats_.reads_attempted;
  transport::ReadResult r = co_await transport_.raw_read(h, self_, target, timeout, round);
  MonitorRead out;
  if (r.status == transport::ReadStatus::Timeout) {
    out.outcome = ReadOutcome::Timeout;
  } else if (r.status == transport::ReadStatus::Fresh && r.snapshot.round == round) {
    out.outcome = ReadOutcome::Payload;
    out.payload = std::move(r.snapshot.payload);
    out.version = r.snapshot.version;
  }
  co_return out;
}

Task<ScanBuffer> SmMonitor::scan(Round round, Duration timeout, SlotKind slot) {
  if (round != map_.round()) {
    throw std::logic_error("scan for round " + std::to_string(round) + " but map is at round " +
                           std::to_string(map_.round()));
  }
  ++stats_.scans;
  std::vector<transport::ReadRequest> requests;
  std::vector<ValidatorId> targets;
  for (std::uint16_t j = 1; j <= size(); ++j) {
    const ValidatorId id{j};
    if (map_.seen(id)) continue;
    requests.push_back({channel(id, slot), self_, id, round});
    targets.push_back(id);
  }
  ScanBuffer buffer;
  if (requests.empty()) co_return buffer;
  stats_.reads_attempted += requests.size();
  std::vector<transport::ReadResult> results = co_await transport_.raw_read_batch(std::move(requests), timeout);
  for (std::size_t i = 0; i < results.size(); ++i) {
    auto& r = results[i];
    if (r.status != transport::ReadStatus::Fresh || r.snapshot.round != round) continue;
    buffer.entries.push_back({targets[i], std::move(r.snapshot.payload)});
    map_.mark(targets[i]);
    ++stats_.round_successful_reads;
    ++stats_.total_successful_reads;
  }
  co_return buffer;
}

Task<std::optional<Round>> SmMonitor::peek_round(ValidatorId target, SlotKind slot, Duration timeout) {
  auto& h = channel(target, slot);
  ++stats_.reads_attempted;
  transport::ReadResult r = co_await transport_.raw_read(h, self_, target, timeout, 0);
  if (r.status != transport::ReadStatus::Fresh) co_return std::nullopt;
  co_return r.snapshot.round;
}

void SmMonitor::reset_scan(Round next_round) {
  map_.reset(next_round);
  stats_.round_successful_reads = 0;
}

}  // namespace smchain::monitor
