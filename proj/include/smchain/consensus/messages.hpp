#pragma once

#include <map>
#include <optional>
#include <set>
#include <vector>

#include "smchain/chain/block.hpp"

namespace smchain::consensus {

using chain::Block;
using chain::BlockHash;

enum class MessageTag : std::uint8_t { Propose = 1, Commit = 2 };

/// <PROPOSE, B_k, sig> with sig over (tag || canonical block bytes).
struct ProposalMessage {
  Block block;
  crypto::Signature sig;

  Bytes signing_bytes() const;
};

/// <COMMIT, h_k, vote, k> from voter, with sig over (tag || h_k || vote || k).
struct CommitMessage {
  BlockHash block_hash{};
  bool vote = false;
  Round round = 0;
  ValidatorId voter;
  crypto::Signature sig;

  Bytes signing_bytes() const;
};

ProposalMessage make_proposal(const crypto::KeyPair& leader, Block block);
CommitMessage make_commit(const crypto::KeyPair& voter_keys, ValidatorId voter, const BlockHash& h, bool vote,
                          Round round);

Bytes encode(const ProposalMessage& m);
Bytes encode(const CommitMessage& m);
/// nullopt when the bytes are not a well-formed message of that kind.
std::optional<ProposalMessage> decode_proposal(ByteView bytes);
std::optional<CommitMessage> decode_commit(ByteView bytes);

bool signature_valid(const ProposalMessage& m, const crypto::PublicKey& leader, crypto::Verifier* verifier);
bool signature_valid(const CommitMessage& m, const crypto::PublicKey& voter, crypto::Verifier* verifier);

/// S0[h] and S1[h]. A voter is counted at most once per hash: the first
/// vote recorded for (voter, h) stands.
class VoteSets {
 public:
  /// False if the voter already has a vote for h.
  bool add(const BlockHash& h, ValidatorId voter, bool vote);

  std::size_t trues(const BlockHash& h) const;
  std::size_t falses(const BlockHash& h) const;
  const std::set<ValidatorId>* s1(const BlockHash& h) const;
  const std::set<ValidatorId>* s0(const BlockHash& h) const;
  /// Hashes in the order their first vote arrived.
  const std::vector<BlockHash>& order() const { return order_; }
  /// First hash in arrival order with |S0| or |S1| at the threshold.
  std::optional<BlockHash> first_decided(std::size_t threshold) const;

 private:
  struct Entry {
    std::set<ValidatorId> s0, s1;
  };
  std::map<BlockHash, Entry> sets_;
  std::vector<BlockHash> order_;
};

}  // namespace smchain::consensus
