#pragma once

#include <set>

#include "smchain/common/event_loop.hpp"
#include "smchain/common/rng.hpp"
#include "smchain/common/trace.hpp"
#include "smchain/transport/transport.hpp"

namespace smchain::transport {

enum class DropPolicy { None, ByzantineOnly };

/// Read completion time: channel latency + uniform jitter + payload bytes at
/// the reader's link rate. Reads in one batch share the reader's link, so a
/// read's transfer waits for the bytes of the reads ahead of it.
struct DelayModel {
  Duration internal_latency = micros(5);
  Duration external_latency = micros(20);
  Duration jitter = micros(20);
  double ns_per_byte = 25.0;
  /// Fixed cost charged for a read that returns no payload.
  std::size_t header_bytes = 24;
};

struct TransportConfig {
  Duration delta_max = micros(5000);
  DelayModel delay;
  DropPolicy drop_policy = DropPolicy::None;
  /// Probability that a read touching a Byzantine endpoint is lost.
  double byzantine_drop_probability = 0.0;
  std::set<ValidatorId> byzantine;
  /// Host of each validator (index 0 holds v1). Same host means an internal
  /// channel. Empty: every validator on its own host.
  std::vector<std::uint32_t> hosts;
};

struct SimTransportStats {
  std::uint64_t reads = 0;
  std::uint64_t honest_reads = 0;
  std::uint64_t honest_reads_over_delta = 0;
  Duration max_honest_delay{0};
  std::uint64_t writes = 0;
};

/// In-process transport on a shared RegisterArray with delays drawn on the
/// event loop's virtual clock. A read linearizes when it is issued; the
/// response is delivered after the modelled delay.
class SimTransport final : public Transport {
 public:
  SimTransport(EventLoop& loop, std::size_t n, TransportConfig config, std::uint64_t seed);

  TransportKind kind() const override { return TransportKind::Simulated; }
  std::size_t size() const override { return registers_.size(); }

  ChannelHandle connect(ValidatorId local, ValidatorId remote, SlotKind slot) override;
  std::uint64_t raw_write(const ChannelHandle& h, ValidatorId owner, ValidatorId index, Bytes payload,
                          Round round) override;
  Task<ReadResult> raw_read(const ChannelHandle& h, ValidatorId reader, ValidatorId index,
                            Duration timeout, Round min_round = 0) override;
  Task<std::vector<ReadResult>> raw_read_batch(std::vector<ReadRequest> requests,
                                               Duration timeout) override;

  RegisterArray& registers() { return registers_; }
  const TransportConfig& config() const { return config_; }
  const SimTransportStats& stats() const { return stats_; }

  /// Receives every write, read and timeout when set.
  void set_tracer(TraceSink sink) { tracer_ = std::move(sink); }

  /// Delay for a single unbatched read of `bytes` on the given channel.
  Duration sample_delay(const ChannelHandle& h, std::size_t bytes);

 private:
  struct Planned {
    ReadResult result;
    Duration delay{0};
    bool dropped = false;
  };

  Planned plan(const ChannelHandle& h, ValidatorId reader, ValidatorId index, Round min_round,
               std::size_t& queued_bytes);
  bool honest(ValidatorId id) const { return !config_.byzantine.contains(id); }
  ChannelKind kind_of(ValidatorId a, ValidatorId b) const;

  EventLoop& loop_;
  RegisterArray registers_;
  TransportConfig config_;
  Rng rng_;
  SimTransportStats stats_;
  TraceSink tracer_;
  void trace_read(const ChannelHandle& h, const ReadResult& r, Timestamp at);
};

}  // namespace smchain::transport
