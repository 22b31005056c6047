#include "smchain/ledger/pool.hpp"

namespace smchain::ledger {

const char* to_string(AdmitResult r) {
  switch (r) {
    case AdmitResult::Accepted: return "accepted";
    case AdmitResult::Duplicate: return "duplicate";
    case AdmitResult::BadSignature: return "bad-signature";
    case AdmitResult::StaleNonce: return "stale-nonce";
    case AdmitResult::Full: return "pool-full";
  }
  return "?";
}

AdmitResult TransactionPool::admit(Transaction tx, std::uint64_t received_at, const LedgerView& state,
                                   crypto::Verifier* verifier) {
  if (ids_.contains(tx.tx_id) || state.committed(tx.tx_id)) return AdmitResult::Duplicate;
  if (tx.tx_id != tx.compute_id() || !chain::signature_valid(tx, verifier)) return AdmitResult::BadSignature;
  if (tx.nonce < state.next_nonce(tx.sender)) return AdmitResult::StaleNonce;
  if (pending_.size() >= capacity_) return AdmitResult::Full;
  tx.received_at = received_at;
  const Key key{received_at, seq_++};
  ids_.emplace(tx.tx_id, key);
  pending_.emplace(key, std::move(tx));
  return AdmitResult::Accepted;
}

void TransactionPool::restore(const std::vector<Transaction>& txs) {
  for (const auto& tx : txs) {
    if (ids_.contains(tx.tx_id) || pending_.size() >= capacity_) continue;
    const Key key{tx.received_at, seq_++};
    ids_.emplace(tx.tx_id, key);
    pending_.emplace(key, tx);
  }
}

void TransactionPool::evict(const std::vector<Transaction>& committed) {
  for (const auto& tx : committed) {
    auto it = ids_.find(tx.tx_id);
    if (it == ids_.end()) continue;
    pending_.erase(it->second);
    ids_.erase(it);
  }
}

void TransactionPool::prune(const LedgerView& state) {
  for (auto it = pending_.begin(); it != pending_.end();) {
    const auto& tx = it->second;
    if (state.committed(tx.tx_id) || tx.nonce < state.next_nonce(tx.sender)) {
      ids_.erase(tx.tx_id);
      it = pending_.erase(it);
    } else {
      ++it;
    }
  }
}

std::vector<const Transaction*> TransactionPool::oldest_first() const {
  std::vector<const Transaction*> out;
  out.reserve(pending_.size());
  for (const auto& [key, tx] : pending_) out.push_back(&tx);
  return out;
}

}  // namespace smchain::ledger
