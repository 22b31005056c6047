#pragma once

#include <cstdint>
#include <vector>

#include "smchain/common/bytes.hpp"
#include "smchain/crypto/crypto.hpp"

namespace smchain::chain {

using AccountId = crypto::PublicKey;
using TxId = crypto::Hash32;

/// A signed transfer. The canonical encoding covers sender, recipient,
/// amount, nonce and signature; tx_id is the digest of the signed fields and
/// received_at is node-local pool metadata.
struct Transaction {
  TxId tx_id{};
  AccountId sender{};
  AccountId recipient{};
  std::uint64_t amount = 0;
  std::uint64_t nonce = 0;
  crypto::Signature sig;
  std::uint64_t received_at = 0;

  Bytes signing_bytes() const;
  TxId compute_id() const;
};

Transaction make_transfer(const crypto::KeyPair& from, const AccountId& to, std::uint64_t amount,
                          std::uint64_t nonce);

bool signature_valid(const Transaction& tx, crypto::Verifier* verifier = nullptr);

void encode(ByteWriter& w, const Transaction& tx);
Transaction decode_transaction(ByteReader& r);
std::size_t encoded_size(const Transaction& tx);

}  // namespace smchain::chain
