#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <vector>

#include "smchain/ledger/pool.hpp"
#include "smchain/ledger/state.hpp"
#include "smchain/ledger/store.hpp"

namespace smchain::ledger {

using chain::Block;
using chain::BlockHash;

/// Read side of a chain, local or remote.
class ChainView {
 public:
  virtual ~ChainView() = default;
  /// Height of the tip block (genesis is 0).
  virtual Height height() const = 0;
  virtual std::optional<BlockHash> hash_at(Height h) const = 0;
  virtual std::optional<Block> block_at(Height h) const = 0;
};

struct TxLocation {
  Height height = 0;
  std::size_t index = 0;
  Transaction tx;
};

/// The local chain. Written only by the consensus state machine; queries may
/// read concurrently and always see a committed snapshot.
class Blockchain final : public ChainView {
 public:
  /// In-memory chain starting at the given genesis block.
  explicit Blockchain(Block genesis);
  /// Persistent chain; the genesis block is written before returning.
  static std::unique_ptr<Blockchain> create(const std::filesystem::path& dir, Block genesis,
                                            StoreOptions options = {});
  /// Reloads a persistent chain, revalidating every link and transaction.
  static std::unique_ptr<Blockchain> open(const std::filesystem::path& dir, StoreOptions options = {},
                                          crypto::Verifier* verifier = nullptr);

  Blockchain(const Blockchain&) = delete;
  Blockchain& operator=(const Blockchain&) = delete;

  Height height() const override;
  std::optional<BlockHash> hash_at(Height h) const override;
  std::optional<Block> block_at(Height h) const override;
  BlockHash tip_hash() const;

  /// TRUE iff the block extends the tip: height, prev_hash, body digest,
  /// no genesis section, and every transaction valid in sequence.
  bool verify_block(const Block& b, crypto::Verifier* verifier = nullptr) const;

  /// Throws IntegrityViolation if verify_block fails. The block is in the
  /// store before this returns. Committed transactions leave the pool.
  Height append_block(const Block& b, crypto::Verifier* verifier = nullptr, TransactionPool* pool = nullptr);

  std::optional<TxLocation> find_tx(const TxId& id) const;
  std::optional<std::uint64_t> balance(const AccountId& a) const;
  std::uint64_t next_nonce(const AccountId& a) const;
  std::uint64_t total_supply() const;
  std::size_t committed_tx_count() const;
  /// Canonical state bytes for replay-determinism checks.
  Bytes state_bytes() const;
  const chain::GenesisState& genesis() const { return genesis_; }
  bool persistent() const { return store_.has_value(); }

  /// Runs f(const ChainState&) under the read lock.
  template <class F>
  decltype(auto) with_state(F&& f) const {
    std::shared_lock lock(mu_);
    return f(static_cast<const ChainState&>(state_));
  }

 private:
  Blockchain() = default;
  bool verify_locked(const Block& b, crypto::Verifier* verifier) const;
  void apply_locked(const Block& b);

  mutable std::shared_mutex mu_;
  chain::GenesisState genesis_;
  std::vector<Block> blocks_;
  std::vector<BlockHash> hashes_;
  ChainState state_;
  std::map<TxId, std::pair<Height, std::size_t>> tx_index_;
  std::optional<BlockStore> store_;
};

struct BlockLimits {
  std::size_t max_bytes = 1 << 20;
  std::size_t max_txs = 1024;
};

/// Oldest-first packing of pool transactions that are valid in sequence on
/// top of the chain tip, within the byte and count limits. The pool is not
/// modified; invalid entries are skipped.
Block assemble_block(const TransactionPool& pool, const Blockchain& chain, Round round,
                     const crypto::PublicKey& proposer, std::uint64_t timestamp, const BlockLimits& limits,
                     crypto::Verifier* verifier = nullptr);

}  // namespace smchain::ledger
