#pragma once

#include <span>
#include <string>

#include "smchain/ledger/blockchain.hpp"

namespace smchain::ledger {

enum class SyncStatus { UpToDate, Synced, PeerInvalidChain, NoAgreement };

const char* to_string(SyncStatus s);

struct SyncResult {
  SyncStatus status = SyncStatus::UpToDate;
  Height from = 0;
  Height to = 0;
  std::size_t fetched = 0;
  std::string detail;
};

/// Fetches and verifies missing blocks one height at a time. A height is
/// taken only when at least `agreement` peers report the same hash there and
/// a served block hashes to it and verifies on the local tip. Stops at the
/// first height that fails; everything before it stays appended.
SyncResult sync_state(Blockchain& local, std::span<const ChainView* const> peers, std::size_t agreement = 1,
                      crypto::Verifier* verifier = nullptr, TransactionPool* pool = nullptr);

SyncResult sync_state(Blockchain& local, const ChainView& peer, crypto::Verifier* verifier = nullptr,
                      TransactionPool* pool = nullptr);

/// Appends the block at local.height()+1 whose hash is already certified
/// (for example by a commit quorum) from whichever peer serves it.
bool fetch_certified(Blockchain& local, std::span<const ChainView* const> peers, const BlockHash& hash,
                     crypto::Verifier* verifier = nullptr, TransactionPool* pool = nullptr);

}  // namespace smchain::ledger
