#pragma once

#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "smchain/common/event_loop.hpp"
#include "smchain/consensus/messages.hpp"
#include "smchain/consensus/proposer.hpp"
#include "smchain/ledger/blockchain.hpp"
#include "smchain/ledger/sync.hpp"
#include "smchain/monitor/monitor.hpp"

namespace smchain::consensus {

struct NodeConfig {
  ValidatorId id;
  std::size_t n = 0;
  std::size_t f = 0;
  Duration delta_max = micros(5000);
  Duration delta1 = micros(20000);
  Duration delta2 = micros(60000);
  /// Gap between COMMIT-phase scans.
  Duration scan_interval = micros(1250);
  /// Pause before a leader publishes its proposal, so that peers still
  /// scanning the previous round see every vote before new ones land.
  Duration proposal_guard = micros(1250);
  /// Upper bound on a single register read or scan batch.
  Duration read_timeout = micros(5000);
  ledger::BlockLimits limits;
  /// Peers that must report the same hash before sync takes a block.
  std::size_t sync_agreement = 1;
  /// Re-read the leader's slot once before voting.
  bool confirm_proposal = true;

  /// delta1 = 4 delta_max, delta2 = 12 delta_max, scan and guard delta_max/4.
  static NodeConfig defaults(ValidatorId id, std::size_t n, std::size_t f, Duration delta_max = micros(5000));
  std::size_t quorum() const { return f + 1; }
};

enum class Outcome { Accept, Reject, Abandoned };
enum class Phase { None, Propose, Commit };

const char* to_string(Outcome o);
const char* to_string(Phase p);

struct RoundOutcome {
  Round round = 0;
  ValidatorId node;
  ValidatorId leader;
  Outcome outcome = Outcome::Abandoned;
  Phase abandoned_in = Phase::None;
  std::optional<BlockHash> hash;
  std::size_t votes_true = 0;
  std::size_t votes_false = 0;
  std::optional<bool> own_vote;
  bool appended = false;
  /// Decided accept but the block was not available locally yet.
  bool pending = false;
  bool equivocation_seen = false;
  Height height_after = 0;
  std::size_t txs_committed = 0;
  Timestamp start{0};
  Timestamp proposal_done{0};
  Timestamp end{0};
  std::uint64_t scans = 0;
  std::uint64_t scan_reads = 0;
  /// Buffer entries whose id had already been returned earlier this round.
  std::uint64_t scan_duplicates = 0;

  Duration latency() const { return end - start; }
};

class SmcaNode;

/// Departures from the honest protocol. Every hook acts only through the
/// node's own registers.
class Behavior {
 public:
  virtual ~Behavior() = default;
  virtual void on_round_start(SmcaNode&, Round) {}
  /// Leader only: false means write no proposal this round.
  virtual bool write_proposal(SmcaNode&, Round) { return true; }
  virtual void after_proposal(SmcaNode&, Round, const ProposalMessage&) {}
  /// nullopt means stay silent.
  virtual std::optional<bool> choose_vote(SmcaNode&, Round, const BlockHash&, bool honest_vote) {
    return honest_vote;
  }
  virtual void after_vote(SmcaNode&, Round, const CommitMessage&) {}
};

/// Peers whose chains a node may fetch missing blocks from.
class SyncSource {
 public:
  virtual ~SyncSource() = default;
  virtual std::vector<const ledger::ChainView*> peers(ValidatorId self) = 0;
};

struct ProposeResult {
  bool abandoned = false;
  bool leader = false;
  std::optional<BlockHash> hash;
  /// Honest vote on hash; nullopt when the node cannot judge the block
  /// (its chain is behind the proposal and sync did not help).
  std::optional<bool> vote;
  bool equivocation_seen = false;
};

struct CommitResult {
  bool abandoned = false;
  std::optional<BlockHash> decided;
  std::size_t trues = 0;
  std::size_t falses = 0;
  std::optional<bool> own_vote;
};

struct DecideResult {
  Outcome outcome = Outcome::Abandoned;
  bool appended = false;
  bool pending = false;
  std::size_t txs = 0;
};

/// One validator's consensus state machine.
class SmcaNode {
 public:
  SmcaNode(NodeConfig config, crypto::KeyPair keys, std::vector<crypto::PublicKey> validator_keys,
           std::vector<std::uint64_t> powers, EventLoop& loop, monitor::SmMonitor& monitor,
           ledger::Blockchain& chain, ledger::TransactionPool& pool, crypto::Verifier* verifier = nullptr,
           Behavior* behavior = nullptr, SyncSource* sync = nullptr);

  /// One complete round: exactly one outcome, finished by T0 + delta2.
  Task<RoundOutcome> run_round(Round k);

  Task<ProposeResult> propose_phase(Round k, Timestamp t0);
  Task<CommitResult> commit_phase(Round k, Timestamp t0, const ProposeResult& proposal);
  DecideResult decide_phase(Round k, const CommitResult& commit);

  /// Round to rejoin at after downtime: the (f+1)-th highest round tag in
  /// the COMMIT slots, plus one.
  Task<Round> discover_round();

  ValidatorId leader_of(Round k) { return queue_.proposer_of(k); }
  /// Swaps in a reopened chain, e.g. after a restart from the block store.
  void rebind(ledger::Blockchain& chain, ledger::TransactionPool& pool);
  /// Fetches missing blocks from peers when any is ahead.
  ledger::SyncResult catch_up();

  ValidatorId id() const { return config_.id; }
  const NodeConfig& config() const { return config_; }
  const crypto::KeyPair& keys() const { return keys_; }
  const crypto::PublicKey& key_of(ValidatorId v) const { return validator_keys_.at(v.value - 1); }
  EventLoop& loop() { return loop_; }
  monitor::SmMonitor& monitor() { return monitor_; }
  ledger::Blockchain& chain() { return *chain_; }
  ledger::TransactionPool& pool() { return *pool_; }
  crypto::Verifier* verifier() { return verifier_; }
  const VoteSets& votes() const { return votes_; }

  /// Makes a block decidable by this node (used by equivocating leaders).
  void remember(const Block& b);
  /// Last payload this node wrote to a slot, used by stale replays.
  const std::optional<std::pair<Round, Bytes>>& last_written(SlotKind slot) const {
    return slot == SlotKind::Propose ? last_propose_ : last_commit_;
  }
  std::uint64_t write(SlotKind slot, Bytes payload, Round k);

 private:
  enum class Verdict { Valid, Invalid, Behind };

  Verdict evaluate(const ProposalMessage& m, Round k, ValidatorId leader);
  void resolve_pending();
  void absorb(const monitor::ScanBuffer& buffer, Round k);

  NodeConfig config_;
  crypto::KeyPair keys_;
  std::vector<crypto::PublicKey> validator_keys_;
  ProposerQueue queue_;
  EventLoop& loop_;
  monitor::SmMonitor& monitor_;
  ledger::Blockchain* chain_;
  ledger::TransactionPool* pool_;
  crypto::Verifier* verifier_;
  Behavior* behavior_;
  SyncSource* sync_;

  VoteSets votes_;
  std::set<ValidatorId> buffered_;
  std::uint64_t duplicates_ = 0;
  std::map<BlockHash, Block> seen_;
  struct Pending {
    Height height;
    BlockHash hash;
  };
  std::optional<Pending> pending_;
  std::optional<std::pair<Round, Bytes>> last_propose_;
  std::optional<std::pair<Round, Bytes>> last_commit_;
};

}  // namespace smchain::consensus
