#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "smchain/chain/block.hpp"

namespace smchain::ledger {

class IntegrityViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct StoreOptions {
  bool fsync = false;
  /// One index entry every index_interval heights (including height 0).
  std::uint64_t index_interval = 64;
};

/// Append-only block log in a directory:
///   blocks.log  "SMCBLK01" then records {u32 len, canonical block, 32-byte sha256}
///   blocks.idx  "SMCIDX01" then entries {u64 height, u64 record offset}
class BlockStore {
 public:
  static constexpr char kLogMagic[9] = "SMCBLK01";
  static constexpr char kIndexMagic[9] = "SMCIDX01";

  /// Creates a new store; fails if one already exists in dir.
  static BlockStore create(const std::filesystem::path& dir, StoreOptions options = {});
  /// Opens an existing store, returning all records in order. A torn final
  /// record (crash mid-append) is truncated away.
  static BlockStore open(const std::filesystem::path& dir, std::vector<chain::Block>& blocks,
                         StoreOptions options = {});
  static bool exists(const std::filesystem::path& dir);

  BlockStore(BlockStore&& o) noexcept;
  BlockStore& operator=(BlockStore&& o) noexcept;
  BlockStore(const BlockStore&) = delete;
  BlockStore& operator=(const BlockStore&) = delete;
  ~BlockStore();

  /// Durable (per options) before returning.
  void append(const chain::Block& b);
  std::uint64_t count() const { return count_; }
  const std::filesystem::path& dir() const { return dir_; }

 private:
  BlockStore(std::filesystem::path dir, StoreOptions options);
  void open_files(bool truncate);
  void sync_fd(int fd);

  std::filesystem::path dir_;
  StoreOptions options_;
  int log_fd_ = -1;
  int idx_fd_ = -1;
  std::uint64_t count_ = 0;
  std::uint64_t log_size_ = 0;
};

struct StoreReport {
  bool ok = false;
  std::uint64_t blocks = 0;
  std::uint64_t index_entries = 0;
  std::optional<chain::BlockHash> tip;
  std::string error;
};

/// Offline check: record framing, stored hash == recomputed hash, heights
/// 0..n-1, prev_hash links, body digests, genesis only at 0, every
/// transaction valid against the replayed state, and index entries pointing
/// at the right records. Accepts the store directory or its blocks.log.
StoreReport verify_store(const std::filesystem::path& path);

}  // namespace smchain::ledger
