#pragma once

#include <map>
#include <set>
#include <vector>

#include "smchain/ledger/state.hpp"

namespace smchain::ledger {

enum class AdmitResult { Accepted, Duplicate, BadSignature, StaleNonce, Full };

const char* to_string(AdmitResult r);

/// Pending transactions ordered oldest first by received_at (ties by arrival
/// order). Block assembly reads the pool without removing anything; entries
/// leave only when a block carrying them is appended or they go stale.
class TransactionPool {
 public:
  explicit TransactionPool(std::size_t capacity = 1 << 16) : capacity_(capacity) {}

  /// Checks signature, duplication (pool and chain) and that the nonce is
  /// not already used on chain. Stamps received_at.
  AdmitResult admit(Transaction tx, std::uint64_t received_at, const LedgerView& state,
                    crypto::Verifier* verifier = nullptr);

  /// Puts transactions back with their original received_at.
  void restore(const std::vector<Transaction>& txs);
  /// Drops transactions a newly appended block committed.
  void evict(const std::vector<Transaction>& committed);
  /// Drops entries whose nonce the chain has moved past.
  void prune(const LedgerView& state);

  std::vector<const Transaction*> oldest_first() const;
  bool contains(const TxId& id) const { return ids_.contains(id); }
  std::size_t size() const { return pending_.size(); }
  bool empty() const { return pending_.empty(); }
  std::size_t capacity() const { return capacity_; }

 private:
  using Key = std::pair<std::uint64_t, std::uint64_t>;

  std::size_t capacity_;
  std::uint64_t seq_ = 0;
  std::map<Key, Transaction> pending_;
  std::map<TxId, Key> ids_;
};

}  // namespace smchain::ledger
