#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "smchain/chain/block.hpp"

namespace smchain::ledger {

using chain::AccountId;
using chain::Transaction;
using chain::TxId;

/// Read-only account view used by transaction validation.
class LedgerView {
 public:
  virtual ~LedgerView() = default;
  /// nullopt for an account that never appeared on chain.
  virtual std::optional<std::uint64_t> balance(const AccountId& a) const = 0;
  virtual std::uint64_t next_nonce(const AccountId& a) const = 0;
  virtual bool committed(const TxId& id) const = 0;
};

/// Balances, nonces and committed transaction ids after replaying a chain.
class ChainState final : public LedgerView {
 public:
  ChainState() = default;
  explicit ChainState(const chain::GenesisState& genesis);

  std::optional<std::uint64_t> balance(const AccountId& a) const override;
  std::uint64_t next_nonce(const AccountId& a) const override;
  bool committed(const TxId& id) const override { return committed_.contains(id); }

  /// Caller has validated tx against this state.
  void apply(const Transaction& tx);

  const std::vector<chain::ValidatorEntry>& validators() const { return validators_; }
  std::uint64_t total_supply() const;
  const std::map<AccountId, std::uint64_t>& balances() const { return balances_; }
  std::size_t committed_count() const { return committed_.size(); }

  /// Canonical bytes of the full state; equal states give equal bytes.
  Bytes encode() const;

 private:
  std::map<AccountId, std::uint64_t> balances_;
  std::map<AccountId, std::uint64_t> nonces_;
  std::set<TxId> committed_;
  std::vector<chain::ValidatorEntry> validators_;
};

/// Copy-on-write layer over a base view, for validating a sequence of
/// transactions without touching the committed state.
class StateOverlay final : public LedgerView {
 public:
  explicit StateOverlay(const LedgerView& base) : base_(base) {}

  std::optional<std::uint64_t> balance(const AccountId& a) const override;
  std::uint64_t next_nonce(const AccountId& a) const override;
  bool committed(const TxId& id) const override;

  void apply(const Transaction& tx);

 private:
  const LedgerView& base_;
  std::map<AccountId, std::uint64_t> balances_;
  std::map<AccountId, std::uint64_t> nonces_;
  std::set<TxId> committed_;
};

enum class TxVerdict { Accept, BadSignature, BadNonce, InsufficientBalance, Duplicate };

const char* to_string(TxVerdict v);

/// Accept iff not already committed, signature valid, nonce is the sender's
/// next nonce and the balance covers the amount.
TxVerdict validate_tx(const Transaction& tx, const LedgerView& state, crypto::Verifier* verifier = nullptr);

}  // namespace smchain::ledger
