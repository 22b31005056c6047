#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "smchain/chain/transaction.hpp"
#include "smchain/common/types.hpp"

namespace smchain::chain {

using BlockHash = crypto::Hash32;

struct ValidatorEntry {
  crypto::PublicKey id{};
  std::uint64_t power = 0;

  bool operator==(const ValidatorEntry&) const = default;
};

struct Allocation {
  AccountId account{};
  std::uint64_t balance = 0;

  bool operator==(const Allocation&) const = default;
};

/// Only present in B_0: validator set with voting powers and initial balances.
struct GenesisState {
  std::vector<ValidatorEntry> validators;
  std::vector<Allocation> allocations;

  bool operator==(const GenesisState&) const = default;
};

/// height is the chain position (parent + 1); round is the consensus round
/// that produced the block. The two diverge once a round is abandoned.
struct Block {
  Height height = 0;
  Round round = 0;
  BlockHash prev_hash{};
  crypto::PublicKey proposer{};
  std::uint64_t timestamp = 0;
  std::vector<Transaction> txs;
  crypto::Hash32 body_digest{};
  std::optional<GenesisState> genesis;
};

crypto::Hash32 compute_body_digest(const std::vector<Transaction>& txs);

Bytes encode_block(const Block& b);
Block decode_block(ByteView bytes);

/// Size of the canonical encoding of a block holding no transactions.
std::size_t empty_block_size(const Block& header);

Block make_genesis(GenesisState state);

}  // namespace smchain::chain

namespace smchain::crypto {

/// SHA-256 of the canonical block encoding.
Hash32 hash_block(const chain::Block& b);

}  // namespace smchain::crypto
