#include "smchain/ledger/blockchain.hpp"

namespace smchain::ledger {

Blockchain::Blockchain(Block genesis) {
  if (genesis.height != 0 || !genesis.genesis || genesis.prev_hash != crypto::kZeroHash || !genesis.txs.empty() ||
      genesis.body_digest != chain::compute_body_digest(genesis.txs))
    throw IntegrityViolation("malformed genesis block");
  genesis_ = *genesis.genesis;
  state_ = ChainState(genesis_);
  hashes_.push_back(crypto::hash_block(genesis));
  blocks_.push_back(std::move(genesis));
}

std::unique_ptr<Blockchain> Blockchain::create(const std::filesystem::path& dir, Block genesis, StoreOptions options) {
  auto bc = std::make_unique<Blockchain>(std::move(genesis));
  bc->store_.emplace(BlockStore::create(dir, options));
  bc->store_->append(bc->blocks_.front());
  return bc;
}

std::unique_ptr<Blockchain> Blockchain::open(const std::filesystem::path& dir, StoreOptions options,
                                             crypto::Verifier* verifier) {
  std::vector<Block> blocks;
  BlockStore store = BlockStore::open(dir, blocks, options);
  if (blocks.empty()) throw IntegrityViolation("store in " + dir.string() + " has no genesis block");
  auto bc = std::make_unique<Blockchain>(std::move(blocks.front()));
  for (std::size_t i = 1; i < blocks.size(); ++i) {
    if (!bc->verify_locked(blocks[i], verifier))
      throw IntegrityViolation("stored block at height " + std::to_string(i) + " fails validation");
    bc->apply_locked(blocks[i]);
  }
  bc->store_.emplace(std::move(store));
  return bc;
}

Height Blockchain::height() const {
  std::shared_lock lock(mu_);
  return blocks_.size() - 1;
}

std::optional<BlockHash> Blockchain::hash_at(Height h) const {
  std::shared_lock lock(mu_);
  if (h >= hashes_.size()) return std::nullopt;
  return hashes_[h];
}

std::optional<Block> Blockchain::block_at(Height h) const {
  std::shared_lock lock(mu_);
  if (h >= blocks_.size()) return std::nullopt;
  return blocks_[h];
}

BlockHash Blockchain::tip_hash() const {
  std::shared_lock lock(mu_);
  return hashes_.back();
}

bool Blockchain::verify_block(const Block& b, crypto::Verifier* verifier) const {
  std::shared_lock lock(mu_);
  return verify_locked(b, verifier);
}

bool Blockchain::verify_locked(const Block& b, crypto::Verifier* verifier) const {
  if (b.genesis) return false;
  if (b.height != blocks_.size()) return false;
  if (b.prev_hash != hashes_.back()) return false;
  if (b.body_digest != chain::compute_body_digest(b.txs)) return false;
  StateOverlay overlay(state_);
  for (const auto& tx : b.txs) {
    if (validate_tx(tx, overlay, verifier) != TxVerdict::Accept) return false;
    overlay.apply(tx);
  }
  return true;
}

void Blockchain::apply_locked(const Block& b) {
  for (std::size_t i = 0; i < b.txs.size(); ++i) {
    state_.apply(b.txs[i]);
    tx_index_.emplace(b.txs[i].tx_id, std::make_pair(b.height, i));
  }
  hashes_.push_back(crypto::hash_block(b));
  blocks_.push_back(b);
}

Height Blockchain::append_block(const Block& b, crypto::Verifier* verifier, TransactionPool* pool) {
  {
    std::unique_lock lock(mu_);
    if (!verify_locked(b, verifier))
      throw IntegrityViolation("append of block at height " + std::to_string(b.height) + " that does not verify");
    if (store_) store_->append(b);
    apply_locked(b);
  }
  if (pool) pool->evict(b.txs);
  return b.height;
}

std::optional<TxLocation> Blockchain::find_tx(const TxId& id) const {
  std::shared_lock lock(mu_);
  auto it = tx_index_.find(id);
  if (it == tx_index_.end()) return std::nullopt;
  const auto [h, i] = it->second;
  return TxLocation{h, i, blocks_[h].txs[i]};
}

std::optional<std::uint64_t> Blockchain::balance(const AccountId& a) const {
  std::shared_lock lock(mu_);
  return state_.balance(a);
}

std::uint64_t Blockchain::next_nonce(const AccountId& a) const {
  std::shared_lock lock(mu_);
  return state_.next_nonce(a);
}

std::uint64_t Blockchain::total_supply() const {
  std::shared_lock lock(mu_);
  return state_.total_supply();
}

std::size_t Blockchain::committed_tx_count() const {
  std::shared_lock lock(mu_);
  return state_.committed_count();
}

Bytes Blockchain::state_bytes() const {
  std::shared_lock lock(mu_);
  return state_.encode();
}

Block assemble_block(const TransactionPool& pool, const Blockchain& chain, Round round,
                     const crypto::PublicKey& proposer, std::uint64_t timestamp, const BlockLimits& limits,
                     crypto::Verifier* verifier) {
  Block b;
  b.height = chain.height() + 1;
  b.round = round;
  b.prev_hash = chain.tip_hash();
  b.proposer = proposer;
  b.timestamp = timestamp;
  std::size_t size = chain::empty_block_size(b);
  chain.with_state([&](const ChainState& state) {
    StateOverlay overlay(state);
    for (const Transaction* tx : pool.oldest_first()) {
      if (b.txs.size() >= limits.max_txs) break;
      const std::size_t add = chain::encoded_size(*tx);
      if (size + add > limits.max_bytes) continue;
      if (validate_tx(*tx, overlay, verifier) != TxVerdict::Accept) continue;
      overlay.apply(*tx);
      b.txs.push_back(*tx);
      size += add;
    }
  });
  b.body_digest = chain::compute_body_digest(b.txs);
  return b;
}

}  // namespace smchain::ledger
