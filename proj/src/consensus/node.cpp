#include "smchain/consensus/node.hpp"

#include <algorithm>

namespace smchain::consensus {

NodeConfig NodeConfig::defaults(ValidatorId id, std::size_t n, std::size_t f, Duration delta_max) {
  NodeConfig c;
  c.id = id;
  c.n = n;
  c.f = f;
  c.delta_max = delta_max;
  c.delta1 = 4 * delta_max;
  c.delta2 = 12 * delta_max;
  c.scan_interval = delta_max / 4;
  c.proposal_guard = delta_max / 4;
  c.read_timeout = delta_max;
  c.sync_agreement = f + 1;
  return c;
}

const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::Accept: return "accept";
    case Outcome::Reject: return "reject";
    case Outcome::Abandoned: return "abandoned";
  }
  return "?";
}

const char* to_string(Phase p) {
  switch (p) {
    case Phase::None: return "none";
    case Phase::Propose: return "propose";
    case Phase::Commit: return "commit";
  }
  return "?";
}

SmcaNode::SmcaNode(NodeConfig config, crypto::KeyPair keys, std::vector<crypto::PublicKey> validator_keys,
                   std::vector<std::uint64_t> powers, EventLoop& loop, monitor::SmMonitor& monitor,
                   ledger::Blockchain& chain, ledger::TransactionPool& pool, crypto::Verifier* verifier,
                   Behavior* behavior, SyncSource* sync)
    : config_(std::move(config)),
      keys_(keys),
      validator_keys_(std::move(validator_keys)),
      queue_(std::move(powers)),
      loop_(loop),
      monitor_(monitor),
      chain_(&chain),
      pool_(&pool),
      verifier_(verifier),
      behavior_(behavior),
      sync_(sync) {
  if (validator_keys_.size() != config_.n || queue_.size() != config_.n)
    throw std::invalid_argument("validator keys and powers must cover all n validators");
}

void SmcaNode::rebind(ledger::Blockchain& chain, ledger::TransactionPool& pool) {
  chain_ = &chain;
  pool_ = &pool;
  pending_.reset();
}

std::uint64_t SmcaNode::write(SlotKind slot, Bytes payload, Round k) {
  (slot == SlotKind::Propose ? last_propose_ : last_commit_) = std::make_pair(k, payload);
  return monitor_.write_own(slot, std::move(payload), k);
}

void SmcaNode::remember(const Block& b) { seen_.emplace(crypto::hash_block(b), b); }

ledger::SyncResult SmcaNode::catch_up() {
  ledger::SyncResult none;
  none.from = none.to = chain_->height();
  if (!sync_) return none;
  auto peers = sync_->peers(id());
  return ledger::sync_state(*chain_, peers, config_.sync_agreement, verifier_, pool_);
}

void SmcaNode::resolve_pending() {
  if (!pending_) return;
  if (chain_->height() >= pending_->height) {
    // Sync already brought the block in; sync only follows agreed hashes.
    pending_.reset();
    return;
  }
  if (!sync_) return;
  auto peers = sync_->peers(id());
  if (chain_->height() + 1 == pending_->height &&
      ledger::fetch_certified(*chain_, peers, pending_->hash, verifier_, pool_)) {
    pending_.reset();
  }
}

SmcaNode::Verdict SmcaNode::evaluate(const ProposalMessage& m, Round k, ValidatorId leader) {
  const Block& b = m.block;
  if (b.round != k || b.proposer != key_of(leader)) return Verdict::Invalid;
  if (!signature_valid(m, key_of(leader), verifier_)) return Verdict::Invalid;
  if (b.txs.size() > config_.limits.max_txs) return Verdict::Invalid;
  if (chain::encode_block(b).size() > config_.limits.max_bytes) return Verdict::Invalid;
  if (b.height > chain_->height() + 1) return Verdict::Behind;
  return chain_->verify_block(b, verifier_) ? Verdict::Valid : Verdict::Invalid;
}

Task<ProposeResult> SmcaNode::propose_phase(Round k, Timestamp t0) {
  ProposeResult res;
  const ValidatorId leader = leader_of(k);
  const Timestamp deadline = t0 + config_.delta1;

  if (leader == id()) {
    res.leader = true;
    if (behavior_ && !behavior_->write_proposal(*this, k)) {
      co_await loop_.sleep_until(deadline);
      res.abandoned = true;
      co_return res;
    }
    co_await loop_.sleep_until(std::min(deadline, loop_.now() + config_.proposal_guard));
    const auto ts = static_cast<std::uint64_t>(loop_.now().count() / 1000);
    Block b = ledger::assemble_block(*pool_, *chain_, k, keys_.pk, ts, config_.limits, verifier_);
    ProposalMessage m = make_proposal(keys_, std::move(b));
    const BlockHash h = crypto::hash_block(m.block);
    seen_.emplace(h, m.block);
    write(SlotKind::Propose, encode(m), k);
    if (behavior_) behavior_->after_proposal(*this, k, m);
    res.hash = h;
    res.vote = evaluate(m, k, leader) == Verdict::Valid;
    co_return res;
  }

  struct Seen {
    ProposalMessage msg;
    std::uint64_t version;
  };
  std::optional<Seen> first, latest;
  while (true) {
    const Timestamp now = loop_.now();
    if (now >= deadline) break;
    const Duration timeout = std::min(config_.read_timeout, deadline - now);
    monitor::MonitorRead r = co_await monitor_.read(leader, SlotKind::Propose, k, timeout);
    if (r.outcome != monitor::ReadOutcome::Payload) continue;
    auto m = decode_proposal(r.payload);
    if (!m) continue;
    if (!first) {
      first = Seen{std::move(*m), r.version};
      if (!config_.confirm_proposal) break;
      continue;
    }
    latest = Seen{std::move(*m), r.version};
    break;
  }
  if (!first) {
    res.abandoned = true;
    co_return res;
  }

  const BlockHash h_first = crypto::hash_block(first->msg.block);
  seen_.emplace(h_first, first->msg.block);
  const Seen* chosen = &*first;
  BlockHash h = h_first;
  if (latest && latest->version != first->version) {
    const BlockHash h_latest = crypto::hash_block(latest->msg.block);
    seen_.emplace(h_latest, latest->msg.block);
    if (h_latest != h_first) {
      res.equivocation_seen = true;
      res.hash = h_latest;
      res.vote = false;
      co_return res;
    }
    chosen = &*latest;
  }
  res.hash = h;

  Verdict v = evaluate(chosen->msg, k, leader);
  if (v == Verdict::Behind) {
    catch_up();
    resolve_pending();
    v = evaluate(chosen->msg, k, leader);
  }
  if (v != Verdict::Behind) res.vote = v == Verdict::Valid;
  co_return res;
}

void SmcaNode::absorb(const monitor::ScanBuffer& buffer, Round k) {
  for (const auto& e : buffer.entries) {
    if (!buffered_.insert(e.id).second) ++duplicates_;
    auto m = decode_commit(e.payload);
    if (!m || m->voter != e.id || m->round != k) continue;
    if (!signature_valid(*m, key_of(e.id), verifier_)) continue;
    votes_.add(m->block_hash, m->voter, m->vote);
  }
}

Task<CommitResult> SmcaNode::commit_phase(Round k, Timestamp t0, const ProposeResult& proposal) {
  CommitResult res;
  if (proposal.hash && proposal.vote) {
    std::optional<bool> v = proposal.vote;
    if (behavior_) v = behavior_->choose_vote(*this, k, *proposal.hash, *proposal.vote);
    if (v) {
      CommitMessage m = make_commit(keys_, id(), *proposal.hash, *v, k);
      write(SlotKind::Commit, encode(m), k);
      votes_.add(*proposal.hash, id(), *v);
      res.own_vote = v;
      if (behavior_) behavior_->after_vote(*this, k, m);
    }
  }

  const Timestamp deadline = t0 + config_.delta2;
  while (true) {
    if (loop_.now() >= deadline) break;
    co_await loop_.sleep_until(std::min(deadline, loop_.now() + config_.scan_interval));
    const Timestamp now = loop_.now();
    if (now >= deadline) break;
    monitor::ScanBuffer buf =
        co_await monitor_.scan(k, std::min(config_.read_timeout, deadline - now), SlotKind::Commit);
    absorb(buf, k);
    if (auto h = votes_.first_decided(config_.quorum())) {
      res.decided = h;
      res.trues = votes_.trues(*h);
      res.falses = votes_.falses(*h);
      co_return res;
    }
  }
  res.abandoned = true;
  if (proposal.hash) {
    res.trues = votes_.trues(*proposal.hash);
    res.falses = votes_.falses(*proposal.hash);
  }
  co_return res;
}

DecideResult SmcaNode::decide_phase(Round, const CommitResult& commit) {
  DecideResult res;
  if (commit.abandoned || !commit.decided) return res;
  const BlockHash& h = *commit.decided;
  if (votes_.trues(h) < config_.quorum()) {
    res.outcome = Outcome::Reject;
    return res;
  }
  res.outcome = Outcome::Accept;
  auto it = seen_.find(h);
  if (it != seen_.end() && it->second.height > chain_->height() + 1) {
    catch_up();
    resolve_pending();
  }
  if (it != seen_.end() && chain_->verify_block(it->second, verifier_)) {
    chain_->append_block(it->second, verifier_, pool_);
    res.appended = true;
    res.txs = it->second.txs.size();
    return res;
  }
  // A quorum vouches for a block this node lacks or cannot yet apply; pull it
  // from peers now or at the start of a later round.
  const Height height = it != seen_.end() ? it->second.height : chain_->height() + 1;
  if (height <= chain_->height() && chain_->hash_at(height) == h) return res;
  pending_ = Pending{height, h};
  catch_up();
  const Height before = chain_->height();
  resolve_pending();
  if (!pending_ && chain_->height() > before) {
    res.appended = true;
    if (auto b = chain_->block_at(chain_->height())) res.txs = b->txs.size();
  } else {
    res.pending = pending_.has_value();
  }
  return res;
}

Task<RoundOutcome> SmcaNode::run_round(Round k) {
  RoundOutcome out;
  out.round = k;
  out.node = id();
  out.leader = leader_of(k);
  out.start = loop_.now();
  const Timestamp t0 = out.start;

  if (monitor_.scan_map().round() < k) monitor_.reset_scan(k);
  votes_ = VoteSets{};
  seen_.clear();
  buffered_.clear();
  duplicates_ = 0;
  const auto reads_before = monitor_.stats().total_successful_reads;
  const auto scans_before = monitor_.stats().scans;

  if (behavior_) behavior_->on_round_start(*this, k);
  catch_up();
  resolve_pending();

  ProposeResult p = co_await propose_phase(k, t0);
  out.proposal_done = loop_.now();
  out.equivocation_seen = p.equivocation_seen;
  out.hash = p.hash;
  if (p.abandoned) {
    out.outcome = Outcome::Abandoned;
    out.abandoned_in = Phase::Propose;
  } else {
    CommitResult c = co_await commit_phase(k, t0, p);
    out.own_vote = c.own_vote;
    out.votes_true = c.trues;
    out.votes_false = c.falses;
    if (c.abandoned) {
      out.outcome = Outcome::Abandoned;
      out.abandoned_in = Phase::Commit;
    } else {
      out.hash = c.decided;
      DecideResult d = decide_phase(k, c);
      out.outcome = d.outcome;
      out.appended = d.appended;
      out.pending = d.pending;
      out.txs_committed = d.txs;
    }
  }
  out.end = loop_.now();
  out.height_after = chain_->height();
  out.scan_reads = monitor_.stats().total_successful_reads - reads_before;
  out.scans = monitor_.stats().scans - scans_before;
  out.scan_duplicates = duplicates_;
  monitor_.reset_scan(k + 1);
  co_return out;
}

Task<Round> SmcaNode::discover_round() {
  std::vector<Round> tags;
  for (std::uint16_t j = 1; j <= config_.n; ++j) {
    const ValidatorId v{j};
    if (v == id()) continue;
    auto r = co_await monitor_.peek_round(v, SlotKind::Commit, config_.read_timeout);
    tags.push_back(r.value_or(0));
  }
  if (tags.empty()) co_return Round{1};
  std::sort(tags.rbegin(), tags.rend());
  co_return tags[std::min(tags.size(), config_.quorum()) - 1] + 1;
}

}  // namespace smchain::consensus
