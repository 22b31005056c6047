#include "smchain/transport/sim_transport.hpp"

#include <algorithm>
#include <cmath>

namespace smchain::transport {

SimTransport::SimTransport(EventLoop& loop, std::size_t n, TransportConfig config, std::uint64_t seed)
    : loop_(loop), registers_(n), config_(std::move(config)), rng_(seed) {}

ChannelKind SimTransport::kind_of(ValidatorId a, ValidatorId b) const {
  if (a == b) return ChannelKind::Internal;
  if (config_.hosts.empty()) return ChannelKind::External;
  const auto ha = config_.hosts.at(a.value - 1);
  const auto hb = config_.hosts.at(b.value - 1);
  return ha == hb ? ChannelKind::Internal : ChannelKind::External;
}

ChannelHandle SimTransport::connect(ValidatorId local, ValidatorId remote, SlotKind slot) {
  if (!registers_.contains(local)) throw TransportError(TransportErrorCode::UnknownId, local.str());
  if (!registers_.contains(remote)) throw TransportError(TransportErrorCode::UnknownId, remote.str());
  return channels_.open(local, remote, slot, kind_of(local, remote), TransportKind::Simulated);
}

std::uint64_t SimTransport::raw_write(const ChannelHandle& h, ValidatorId owner, ValidatorId index,
                                      Bytes payload, Round round) {
  check_write(h, owner, index);
  ++stats_.writes;
  const auto v = registers_.write(owner, index, h.slot(), std::move(payload), round);
  if (tracer_)
    tracer_({loop_.now(), "write", owner.value, index.value, round,
             std::string(to_string(h.slot())) + " v" + std::to_string(v)});
  return v;
}

void SimTransport::trace_read(const ChannelHandle& h, const ReadResult& r, Timestamp at) {
  if (!tracer_) return;
  std::string detail = to_string(h.slot());
  detail += " ";
  detail += to_string(r.status);
  if (r.status == ReadStatus::Fresh) detail += " v" + std::to_string(r.snapshot.version);
  tracer_({at, r.status == ReadStatus::Timeout ? "timeout" : "read", h.local_id().value, h.remote_id().value,
           r.status == ReadStatus::Fresh ? r.snapshot.round : 0, detail});
}

Duration SimTransport::sample_delay(const ChannelHandle& h, std::size_t bytes) {
  if (h.local_id() == h.remote_id()) return Duration{0};
  const auto& d = config_.delay;
  Duration base = h.kind() == ChannelKind::Internal ? d.internal_latency : d.external_latency;
  Duration jitter{0};
  if (d.jitter.count() > 0) jitter = Duration{static_cast<std::int64_t>(rng_.below(d.jitter.count()))};
  const auto transfer = Duration{static_cast<std::int64_t>(std::llround(d.ns_per_byte * bytes))};
  return std::max(Duration{1}, base + jitter + transfer);
}

SimTransport::Planned SimTransport::plan(const ChannelHandle& h, ValidatorId reader, ValidatorId index,
                                         Round min_round, std::size_t& queued_bytes) {
  check_read(h, reader, index);
  Planned p;
  auto snap = registers_.read(index, h.slot());
  if (snap && snap->round >= min_round) {
    p.result.status = ReadStatus::Fresh;
    p.result.snapshot = *snap;
  } else {
    p.result.status = ReadStatus::NoFreshData;
  }
  const std::size_t bytes =
      config_.delay.header_bytes + (p.result.status == ReadStatus::Fresh ? snap->payload.size() : 0);
  if (reader != index) queued_bytes += bytes;
  p.delay = sample_delay(h, queued_bytes);

  const bool honest_pair = honest(reader) && honest(index);
  ++stats_.reads;
  if (honest_pair) {
    ++stats_.honest_reads;
    if (p.delay > config_.delta_max) {
      // The synchrony bound is a model invariant for honest endpoints.
      p.delay = config_.delta_max;
      ++stats_.honest_reads_over_delta;
    }
    stats_.max_honest_delay = std::max(stats_.max_honest_delay, p.delay);
  } else if (config_.drop_policy == DropPolicy::ByzantineOnly &&
             rng_.chance(config_.byzantine_drop_probability)) {
    p.dropped = true;
  }
  return p;
}

Task<ReadResult> SimTransport::raw_read(const ChannelHandle& h, ValidatorId reader, ValidatorId index,
                                        Duration timeout, Round min_round) {
  std::size_t queued = 0;
  Planned p = plan(h, reader, index, min_round, queued);
  const Timestamp start = loop_.now();
  if (p.dropped || p.delay > timeout) {
    co_await loop_.sleep_until(start + timeout);
    ReadResult r;
    r.status = ReadStatus::Timeout;
    r.elapsed = timeout;
    trace_read(h, r, loop_.now());
    co_return r;
  }
  co_await loop_.sleep_until(start + p.delay);
  p.result.elapsed = p.delay;
  trace_read(h, p.result, loop_.now());
  co_return std::move(p.result);
}

Task<std::vector<ReadResult>> SimTransport::raw_read_batch(std::vector<ReadRequest> requests,
                                                           Duration timeout) {
  std::vector<ReadResult> out;
  out.reserve(requests.size());
  std::size_t queued = 0;
  Duration longest{0};
  for (const auto& req : requests) {
    Planned p = plan(req.handle, req.reader, req.index, req.min_round, queued);
    if (p.dropped || p.delay > timeout) {
      ReadResult r;
      r.status = ReadStatus::Timeout;
      r.elapsed = timeout;
      out.push_back(std::move(r));
      longest = std::max(longest, timeout);
    } else {
      p.result.elapsed = p.delay;
      longest = std::max(longest, p.delay);
      out.push_back(std::move(p.result));
    }
  }
  const Timestamp issued = loop_.now();
  co_await loop_.sleep_until(issued + longest);
  if (tracer_)
    for (std::size_t i = 0; i < out.size(); ++i) trace_read(requests[i].handle, out[i], issued + out[i].elapsed);
  co_return out;
}

}  // namespace smchain::transport
