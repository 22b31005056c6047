#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "smchain/common/event_loop.hpp"
#include "smchain/transport/transport.hpp"

namespace smchain::monitor {

/// Per-round bitmap over all validators: bit j is set once v_j's register
/// has been read successfully in the map's round.
class ScanMap {
 public:
  explicit ScanMap(std::size_t n, Round round = 1);

  std::size_t size() const { return bits_.size(); }
  Round round() const { return round_; }
  bool seen(ValidatorId id) const { return bits_.at(id.value - 1) != 0; }
  void mark(ValidatorId id) { bits_.at(id.value - 1) = 1; }
  std::size_t seen_count() const;
  /// Clears every bit and moves to next_round, which must be later.
  void reset(Round next_round);

 private:
  std::vector<std::uint8_t> bits_;
  Round round_;
};

struct ScanEntry {
  ValidatorId id;
  Bytes payload;
};

struct ScanBuffer {
  std::vector<ScanEntry> entries;
  std::size_t count() const { return entries.size(); }
  bool empty() const { return entries.empty(); }
};

enum class ReadOutcome { Payload, NoFreshData, Timeout };

struct MonitorRead {
  ReadOutcome outcome = ReadOutcome::NoFreshData;
  Bytes payload;
  std::uint64_t version = 0;
};

struct MonitorStats {
  std::uint64_t scans = 0;
  std::uint64_t reads_attempted = 0;
  /// Successful scan reads in the current scan-map round.
  std::uint64_t round_successful_reads = 0;
  std::uint64_t total_successful_reads = 0;
};

/// One validator's view of the shared memory: owner-checked Write, fresh-only
/// Read, and the scan-map driven Scan over the COMMIT slots.
class SmMonitor {
 public:
  SmMonitor(ValidatorId self, transport::Transport& transport);

  ValidatorId self() const { return self_; }
  std::size_t size() const { return map_.size(); }

  /// Opens a channel to every register, both slots.
  void connect_all();

  std::uint64_t write(ValidatorId executant, ValidatorId target, SlotKind slot, Bytes payload, Round round);
  std::uint64_t write_own(SlotKind slot, Bytes payload, Round round) {
    return write(self_, self_, slot, std::move(payload), round);
  }

  /// Payload only when the register's round tag equals round.
  Task<MonitorRead> read(ValidatorId target, SlotKind slot, Round round, Duration timeout);

  /// Reads every register whose bit is clear (ascending index, issued as one
  /// batch) and returns only the entries newly seen this round.
  Task<ScanBuffer> scan(Round round, Duration timeout, SlotKind slot = SlotKind::Commit);

  void reset_scan(Round next_round);

  /// Round tag of a register regardless of freshness; nullopt if empty or
  /// the read timed out. Not counted as a scan read.
  Task<std::optional<Round>> peek_round(ValidatorId target, SlotKind slot, Duration timeout);

  const ScanMap& scan_map() const { return map_; }
  const MonitorStats& stats() const { return stats_; }

 private:
  transport::ChannelHandle& channel(ValidatorId target, SlotKind slot);

  ValidatorId self_;
  transport::Transport& transport_;
  ScanMap map_;
  std::vector<transport::ChannelHandle> propose_channels_;
  std::vector<transport::ChannelHandle> commit_channels_;
  MonitorStats stats_;
};

}  // namespace smchain::monitor
