#include "smchain/harness/adversary.hpp"

#include "smchain/common/rng.hpp"

namespace smchain::harness {

using consensus::Behavior;
using consensus::CommitMessage;
using consensus::ProposalMessage;
using consensus::SmcaNode;

namespace {

/// Remembers the node's current round so delayed writes never land in a
/// later round's register.
class RoundAware : public Behavior {
 public:
  void on_round_start(SmcaNode&, Round k) override { current_ = k; }

 protected:
  Round current_ = 0;
};

class CrashLeader final : public RoundAware {
 public:
  CrashLeader(const AdversaryConfig& c, std::uint64_t seed) : config_(c), rng_(seed) {}
  bool write_proposal(SmcaNode&, Round k) override {
    if (!config_.rounds.empty()) return !config_.rounds.contains(k);
    return !rng_.chance(config_.crash_probability);
  }

 private:
  AdversaryConfig config_;
  Rng rng_;
};

Task<void> swap_later(SmcaNode& node, const Round* current, Round k, ProposalMessage m, Duration delay) {
  co_await node.loop().sleep_for(delay);
  if (*current != k) co_return;
  m.block.timestamp += 1;
  ProposalMessage variant = consensus::make_proposal(node.keys(), std::move(m.block));
  node.remember(variant.block);
  node.write(SlotKind::Propose, consensus::encode(variant), k);
}

class EquivocateLeader final : public RoundAware {
 public:
  EquivocateLeader(const AdversaryConfig& c, std::uint64_t seed) : config_(c), rng_(seed) {}
  void after_proposal(SmcaNode& node, Round k, const ProposalMessage& m) override {
    const auto lo = config_.swap_delay_min.count();
    const auto hi = config_.swap_delay_max.count();
    const Duration delay{rng_.between(lo, hi)};
    node.loop().spawn(swap_later(node, &current_, k, m, delay));
  }

 private:
  AdversaryConfig config_;
  Rng rng_;
};

class SilentVoter final : public Behavior {
 public:
  std::optional<bool> choose_vote(SmcaNode&, Round, const chain::BlockHash&, bool) override {
    return std::nullopt;
  }
};

class FalseVoter final : public Behavior {
 public:
  std::optional<bool> choose_vote(SmcaNode&, Round, const chain::BlockHash&, bool) override { return false; }
};

Task<void> flip_later(SmcaNode& node, const Round* current, Round k, chain::BlockHash h, Duration delay) {
  co_await node.loop().sleep_for(delay);
  if (*current != k) co_return;
  CommitMessage m = consensus::make_commit(node.keys(), node.id(), h, false, k);
  node.write(SlotKind::Commit, consensus::encode(m), k);
}

class DoubleVoter final : public RoundAware {
 public:
  explicit DoubleVoter(const AdversaryConfig& c) : config_(c) {}
  std::optional<bool> choose_vote(SmcaNode&, Round, const chain::BlockHash&, bool) override { return true; }
  void after_vote(SmcaNode& node, Round k, const CommitMessage& m) override {
    node.loop().spawn(flip_later(node, &current_, k, m.block_hash, config_.flip_delay));
  }

 private:
  AdversaryConfig config_;
};

class StaleReplayer final : public Behavior {
 public:
  void on_round_start(SmcaNode& node, Round k) override {
    for (SlotKind slot : {SlotKind::Propose, SlotKind::Commit}) {
      const auto& last = node.last_written(slot);
      if (last && last->first < k) {
        Bytes old = last->second;
        node.write(slot, std::move(old), k);
      }
    }
  }
};

}  // namespace

std::unique_ptr<Behavior> make_behavior(const AdversaryConfig& config, std::uint64_t seed) {
  switch (config.strategy) {
    case Strategy::None: return nullptr;
    case Strategy::CrashLeader: return std::make_unique<CrashLeader>(config, seed);
    case Strategy::EquivocateLeader: return std::make_unique<EquivocateLeader>(config, seed);
    case Strategy::SilentVoter: return std::make_unique<SilentVoter>();
    case Strategy::FalseVoter: return std::make_unique<FalseVoter>();
    case Strategy::DoubleVoter: return std::make_unique<DoubleVoter>(config);
    case Strategy::StaleReplayer: return std::make_unique<StaleReplayer>();
  }
  return nullptr;
}

}  // namespace smchain::harness
