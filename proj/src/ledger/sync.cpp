#include "smchain/ledger/sync.hpp"

#include <algorithm>
#include <vector>

namespace smchain::ledger {

const char* to_string(SyncStatus s) {
  switch (s) {
    case SyncStatus::UpToDate: return "up-to-date";
    case SyncStatus::Synced: return "synced";
    case SyncStatus::PeerInvalidChain: return "peer-invalid-chain";
    case SyncStatus::NoAgreement: return "no-agreement";
  }
  return "?";
}

namespace {

bool try_append(Blockchain& local, const ChainView& peer, Height h, const BlockHash& hash,
                crypto::Verifier* verifier, TransactionPool* pool) {
  auto b = peer.block_at(h);
  if (!b || b->height != h || crypto::hash_block(*b) != hash) return false;
  if (!local.verify_block(*b, verifier)) return false;
  local.append_block(*b, verifier, pool);
  return true;
}

}  // namespace

SyncResult sync_state(Blockchain& local, std::span<const ChainView* const> peers, std::size_t agreement,
                      crypto::Verifier* verifier, TransactionPool* pool) {
  SyncResult res;
  res.from = local.height();
  res.to = res.from;
  if (agreement == 0) agreement = 1;

  Height best = 0;
  for (const auto* p : peers) best = std::max(best, p->height());
  if (best <= local.height()) return res;

  for (Height h = local.height() + 1; h <= best; ++h) {
    std::vector<std::pair<BlockHash, std::vector<const ChainView*>>> tally;
    for (const auto* p : peers) {
      if (p->height() < h) continue;
      auto hh = p->hash_at(h);
      if (!hh) continue;
      auto it = std::find_if(tally.begin(), tally.end(), [&](const auto& e) { return e.first == *hh; });
      if (it == tally.end()) {
        tally.push_back({*hh, {p}});
      } else {
        it->second.push_back(p);
      }
    }
    const std::pair<BlockHash, std::vector<const ChainView*>>* chosen = nullptr;
    for (const auto& e : tally) {
      if (e.second.size() >= agreement && (!chosen || e.second.size() > chosen->second.size())) chosen = &e;
    }
    if (!chosen) {
      // Peers that are further ahead but disagree: keep what we have.
      if (tally.empty()) break;
      res.status = res.fetched > 0 ? SyncStatus::Synced : SyncStatus::NoAgreement;
      if (res.status == SyncStatus::NoAgreement) res.detail = "no hash agreed at height " + std::to_string(h);
      return res;
    }
    bool ok = false;
    for (const auto* p : chosen->second) {
      if (try_append(local, *p, h, chosen->first, verifier, pool)) {
        ok = true;
        break;
      }
    }
    if (!ok) {
      res.status = SyncStatus::PeerInvalidChain;
      res.detail = "no valid block served for height " + std::to_string(h);
      return res;
    }
    ++res.fetched;
    res.to = h;
  }
  res.status = res.fetched > 0 ? SyncStatus::Synced : SyncStatus::UpToDate;
  return res;
}

SyncResult sync_state(Blockchain& local, const ChainView& peer, crypto::Verifier* verifier, TransactionPool* pool) {
  const ChainView* peers[] = {&peer};
  return sync_state(local, peers, 1, verifier, pool);
}

bool fetch_certified(Blockchain& local, std::span<const ChainView* const> peers, const BlockHash& hash,
                     crypto::Verifier* verifier, TransactionPool* pool) {
  const Height h = local.height() + 1;
  for (const auto* p : peers) {
    if (p->height() < h) continue;
    if (try_append(local, *p, h, hash, verifier, pool)) return true;
  }
  return false;
}

}  // namespace smchain::ledger
