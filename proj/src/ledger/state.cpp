#include "smchain/ledger/state.hpp"

namespace smchain::ledger {

ChainState::ChainState(const chain::GenesisState& genesis) : validators_(genesis.validators) {
  for (const auto& a : genesis.allocations) balances_[a.account] += a.balance;
}

std::optional<std::uint64_t> ChainState::balance(const AccountId& a) const {
  auto it = balances_.find(a);
  if (it == balances_.end()) return std::nullopt;
  return it->second;
}

std::uint64_t ChainState::next_nonce(const AccountId& a) const {
  auto it = nonces_.find(a);
  return it == nonces_.end() ? 0 : it->second;
}

void ChainState::apply(const Transaction& tx) {
  balances_[tx.sender] -= tx.amount;
  balances_[tx.recipient] += tx.amount;
  nonces_[tx.sender] = tx.nonce + 1;
  committed_.insert(tx.tx_id);
}

std::uint64_t ChainState::total_supply() const {
  std::uint64_t sum = 0;
  for (const auto& [acct, bal] : balances_) sum += bal;
  return sum;
}

Bytes ChainState::encode() const {
  ByteWriter w;
  w.put_u32(static_cast<std::uint32_t>(balances_.size()));
  for (const auto& [acct, bal] : balances_) {
    w.put_bytes(acct);
    w.put_u64(bal);
  }
  w.put_u32(static_cast<std::uint32_t>(nonces_.size()));
  for (const auto& [acct, n] : nonces_) {
    w.put_bytes(acct);
    w.put_u64(n);
  }
  w.put_u32(static_cast<std::uint32_t>(committed_.size()));
  for (const auto& id : committed_) w.put_bytes(id);
  w.put_u32(static_cast<std::uint32_t>(validators_.size()));
  for (const auto& v : validators_) {
    w.put_bytes(v.id);
    w.put_u64(v.power);
  }
  return w.take();
}

std::optional<std::uint64_t> StateOverlay::balance(const AccountId& a) const {
  if (auto it = balances_.find(a); it != balances_.end()) return it->second;
  return base_.balance(a);
}

std::uint64_t StateOverlay::next_nonce(const AccountId& a) const {
  if (auto it = nonces_.find(a); it != nonces_.end()) return it->second;
  return base_.next_nonce(a);
}

bool StateOverlay::committed(const TxId& id) const { return committed_.contains(id) || base_.committed(id); }

void StateOverlay::apply(const Transaction& tx) {
  balances_[tx.sender] = balance(tx.sender).value_or(0) - tx.amount;
  balances_[tx.recipient] = balance(tx.recipient).value_or(0) + tx.amount;
  nonces_[tx.sender] = tx.nonce + 1;
  committed_.insert(tx.tx_id);
}

const char* to_string(TxVerdict v) {
  switch (v) {
    case TxVerdict::Accept: return "accept";
    case TxVerdict::BadSignature: return "bad-signature";
    case TxVerdict::BadNonce: return "bad-nonce";
    case TxVerdict::InsufficientBalance: return "insufficient-balance";
    case TxVerdict::Duplicate: return "duplicate";
  }
  return "?";
}

TxVerdict validate_tx(const Transaction& tx, const LedgerView& state, crypto::Verifier* verifier) {
  if (tx.tx_id != tx.compute_id()) return TxVerdict::BadSignature;
  if (state.committed(tx.tx_id)) return TxVerdict::Duplicate;
  if (!chain::signature_valid(tx, verifier)) return TxVerdict::BadSignature;
  if (tx.nonce != state.next_nonce(tx.sender)) return TxVerdict::BadNonce;
  if (state.balance(tx.sender).value_or(0) < tx.amount) return TxVerdict::InsufficientBalance;
  return TxVerdict::Accept;
}

}  // namespace smchain::ledger
