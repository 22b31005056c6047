#include "smchain/harness/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "smchain/common/rng.hpp"
#include "smchain/harness/adversary.hpp"
#include "smchain/harness/workload.hpp"

namespace smchain::harness {

using consensus::Outcome;
using consensus::RoundOutcome;

Identities derive_identities(const ScenarioConfig& c) {
  Identities ids;
  const auto powers = c.effective_powers();
  chain::GenesisState g;
  for (std::size_t i = 0; i < c.n; ++i) {
    ids.validators.push_back(crypto::keygen_from_label(c.seed, "validator/" + std::to_string(i + 1)));
    g.validators.push_back({ids.validators.back().pk, powers[i]});
  }
  for (std::size_t j = 0; j < c.workload.accounts; ++j) {
    ids.accounts.push_back(crypto::keygen_from_label(c.seed, "account/" + std::to_string(j)));
    g.allocations.push_back({ids.accounts.back().pk, c.workload.initial_balance});
  }
  ids.genesis = chain::make_genesis(std::move(g));
  return ids;
}

consensus::NodeConfig node_config(const ScenarioConfig& c, ValidatorId id) {
  auto nc = consensus::NodeConfig::defaults(id, c.n, c.f, c.delta_max);
  nc.delta1 = c.effective_delta1();
  nc.delta2 = c.effective_delta2();
  nc.scan_interval = c.effective_scan_interval();
  nc.proposal_guard = c.effective_guard();
  nc.limits = c.block;
  return nc;
}

ValidatorId pick_reporter(const ScenarioConfig& c) {
  const auto byz = c.byzantine_set();
  for (std::uint16_t i = 1; i <= c.n; ++i) {
    const ValidatorId id{i};
    if (byz.contains(id)) continue;
    if (std::any_of(c.crash_recover.begin(), c.crash_recover.end(), [&](const auto& cr) { return cr.node == id; }))
      continue;
    return id;
  }
  return ValidatorId{1};
}

std::map<chain::TxId, Round> RunResult::commit_rounds() const {
  std::map<chain::TxId, Round> out;
  const auto& chain = *node(reporter).chain;
  for (Height h = 1; h <= chain.height(); ++h) {
    auto b = chain.block_at(h);
    for (const auto& tx : b->txs) out.emplace(tx.tx_id, b->round);
  }
  return out;
}

namespace {

struct SimNode {
  ValidatorId id;
  bool byzantine = false;
  std::unique_ptr<monitor::SmMonitor> monitor;
  std::unique_ptr<ledger::Blockchain> chain;
  std::unique_ptr<ledger::TransactionPool> pool;
  std::unique_ptr<consensus::Behavior> behavior;
  std::unique_ptr<consensus::SmcaNode> node;
  std::vector<RoundOutcome> outcomes;
  std::optional<std::filesystem::path> store_dir;
  bool online = true;
  bool done = false;
  bool restarted = false;
  Round current = 0;
};

class Sim;

class SimPeers final : public consensus::SyncSource {
 public:
  explicit SimPeers(std::vector<SimNode>& nodes) : nodes_(nodes) {}
  std::vector<const ledger::ChainView*> peers(ValidatorId self) override {
    std::vector<const ledger::ChainView*> out;
    for (auto& n : nodes_)
      if (n.id != self && n.online && n.chain) out.push_back(n.chain.get());
    return out;
  }

 private:
  std::vector<SimNode>& nodes_;
};

class Sim {
 public:
  explicit Sim(const ScenarioConfig& c)
      : config_(c),
        ids_(derive_identities(c)),
        byzantine_(c.byzantine_set()),
        verifier_(c.crypto_cache),
        peers_(nodes_) {}

  RunResult run();

 private:
  Task<void> drive(SimNode& s);
  Task<void> workload();
  void broadcast(const chain::Transaction& tx, std::uint64_t received_at);
  bool all_done() const {
    return std::all_of(nodes_.begin(), nodes_.end(), [](const SimNode& n) { return n.done; });
  }
  Round max_round() const {
    Round r = 0;
    for (const auto& n : nodes_)
      if (n.online) r = std::max(r, n.current);
    return r;
  }
  void trace(TraceEvent ev) {
    if (config_.trace) events_.push_back(std::move(ev));
  }
  std::unique_ptr<ledger::Blockchain> open_chain(SimNode& s, bool reopen);

  const ScenarioConfig& config_;
  Identities ids_;
  std::set<ValidatorId> byzantine_;
  EventLoop loop_{EventLoop::Mode::Virtual};
  crypto::Verifier verifier_;
  std::unique_ptr<transport::SimTransport> transport_;
  std::vector<SimNode> nodes_;
  SimPeers peers_;
  std::vector<TraceEvent> events_;
  std::vector<chain::TxId> submitted_;
};

std::unique_ptr<ledger::Blockchain> Sim::open_chain(SimNode& s, bool reopen) {
  if (!s.store_dir) return std::make_unique<ledger::Blockchain>(ids_.genesis);
  if (reopen) return ledger::Blockchain::open(*s.store_dir, config_.store.options, &verifier_);
  std::filesystem::remove_all(*s.store_dir);
  return ledger::Blockchain::create(*s.store_dir, ids_.genesis, config_.store.options);
}

void Sim::broadcast(const chain::Transaction& tx, std::uint64_t received_at) {
  submitted_.push_back(tx.tx_id);
  for (auto& n : nodes_) {
    if (!n.online) continue;
    n.chain->with_state([&](const ledger::ChainState& st) { n.pool->admit(tx, received_at, st, &verifier_); });
  }
}

Task<void> Sim::workload() {
  const auto& w = config_.workload;
  if (w.accounts < 2) co_return;
  WorkloadGenerator gen(w, ids_.accounts, config_.seed);
  for (std::size_t i = 0; i < w.initial_backlog; ++i) broadcast(gen.next(), 0);
  if (w.rate_tps <= 0) co_return;
  while (!all_done()) {
    co_await loop_.sleep_for(gen.next_gap());
    if (all_done()) break;
    broadcast(gen.next(), static_cast<std::uint64_t>(loop_.now().count()));
  }
}

Task<void> Sim::drive(SimNode& s) {
  Round k = 1;
  while (k <= config_.rounds) {
    auto cr = std::find_if(config_.crash_recover.begin(), config_.crash_recover.end(),
                           [&](const CrashRecover& c) { return c.node == s.id && c.at_round == k; });
    if (cr != config_.crash_recover.end() && !s.restarted) {
      s.online = false;
      trace({loop_.now(), "crash", s.id.value, 0, k, ""});
      const Round target = k + cr->rounds;
      while (max_round() < target && !std::all_of(nodes_.begin(), nodes_.end(), [&](const SimNode& n) {
               return n.id == s.id || n.done || !n.online;
             })) {
        co_await loop_.sleep_for(config_.effective_scan_interval());
      }
      // Restart from whatever the node persisted; the pool starts empty.
      s.chain.reset();
      s.chain = open_chain(s, true);
      s.pool = std::make_unique<ledger::TransactionPool>();
      s.node->rebind(*s.chain, *s.pool);
      s.online = true;
      s.restarted = true;
      const auto synced = s.node->catch_up();
      const Round joined = co_await s.node->discover_round();
      trace({loop_.now(), "recover", s.id.value, 0, joined,
             "height " + std::to_string(synced.from) + "->" + std::to_string(synced.to)});
      k = std::max(k, joined);
      continue;
    }
    s.current = k;
    RoundOutcome out = co_await s.node->run_round(k);
    trace({out.end, out.outcome == Outcome::Abandoned ? "abandon" : "decide", s.id.value, out.leader.value, k,
           std::string(consensus::to_string(out.outcome)) +
               (out.hash ? " " + to_hex(*out.hash).substr(0, 16) : std::string())});
    s.outcomes.push_back(std::move(out));
    ++k;
  }
  s.done = true;
}

RunResult Sim::run() {
  transport::TransportConfig tc;
  tc.delta_max = config_.delta_max;
  tc.delay = config_.transport.delay;
  tc.byzantine = byzantine_;
  tc.hosts = config_.transport.hosts;
  if (config_.transport.drop_probability > 0) {
    tc.drop_policy = transport::DropPolicy::ByzantineOnly;
    tc.byzantine_drop_probability = config_.transport.drop_probability;
  }
  transport_ = std::make_unique<transport::SimTransport>(loop_, config_.n, tc, derive_seed(config_.seed, 0x5e1));
  if (config_.trace) transport_->set_tracer([this](const TraceEvent& ev) { events_.push_back(ev); });

  std::vector<crypto::PublicKey> keys;
  for (const auto& kp : ids_.validators) keys.push_back(kp.pk);

  nodes_.resize(config_.n);
  for (std::size_t i = 0; i < config_.n; ++i) {
    auto& s = nodes_[i];
    s.id = ValidatorId{static_cast<std::uint16_t>(i + 1)};
    s.byzantine = byzantine_.contains(s.id);
    if (config_.store.dir) s.store_dir = *config_.store.dir / ("node-" + std::to_string(i + 1));
    s.monitor = std::make_unique<monitor::SmMonitor>(s.id, *transport_);
    s.monitor->connect_all();
    s.chain = open_chain(s, false);
    s.pool = std::make_unique<ledger::TransactionPool>();
    if (s.byzantine) s.behavior = make_behavior(config_.adversary, derive_seed(config_.seed, 0xad00 + i));
    s.node = std::make_unique<consensus::SmcaNode>(node_config(config_, s.id), ids_.validators[i], keys,
                                                   config_.effective_powers(), loop_, *s.monitor, *s.chain,
                                                   *s.pool, &verifier_, s.behavior.get(), &peers_);
  }

  loop_.spawn(workload());
  for (auto& s : nodes_) loop_.spawn(drive(s));
  loop_.run();

  RunResult res;
  res.config = config_;
  res.reporter = pick_reporter(config_);
  res.transport_stats = transport_->stats();
  res.signatures_computed = verifier_.computed();
  res.signature_memo_hits = verifier_.memo_hits();
  res.submitted = std::move(submitted_);
  for (auto& s : nodes_) {
    NodeResult nr;
    nr.id = s.id;
    nr.byzantine = s.byzantine;
    nr.outcomes = std::move(s.outcomes);
    nr.chain = std::move(s.chain);
    nr.store_dir = s.store_dir;
    nr.restarted = s.restarted;
    res.nodes.push_back(std::move(nr));
  }
  res.metrics = compute_metrics(config_, res.nodes, res.reporter);
  res.checks = check_run(config_, res.nodes);
  res.checks.honest_reads_over_delta = res.transport_stats.honest_reads_over_delta;
  std::stable_sort(events_.begin(), events_.end(),
                   [](const TraceEvent& a, const TraceEvent& b) { return a.at < b.at; });
  res.trace = std::move(events_);
  return res;
}

}  // namespace

RunResult run_simulation(const ScenarioConfig& config) {
  validate(config);
  Sim sim(config);
  return sim.run();
}

RunMetrics compute_metrics(const ScenarioConfig& c, const std::vector<NodeResult>& nodes, ValidatorId reporter) {
  RunMetrics m;
  const auto byz = c.byzantine_set();
  const auto& rep = nodes.at(reporter.value - 1);
  double decided_lat = 0, honest_lat = 0, propose = 0, commit = 0;
  std::size_t honest_n = 0, good = 0;
  for (const auto& o : rep.outcomes) {
    RoundRow row;
    row.round = o.round;
    row.outcome = o.outcome;
    row.leader = o.leader;
    row.leader_byzantine = byz.contains(o.leader);
    row.latency = o.latency();
    row.propose_time = o.proposal_done - o.start;
    row.votes_true = o.votes_true;
    row.votes_false = o.votes_false;
    row.txs_committed = o.txs_committed;
    m.rows.push_back(row);
    if (!row.leader_byzantine) ++good;
    switch (o.outcome) {
      case Outcome::Accept: ++m.accepted; break;
      case Outcome::Reject: ++m.rejected; break;
      case Outcome::Abandoned: ++m.abandoned; break;
    }
    if (o.outcome != Outcome::Abandoned) {
      decided_lat += to_micros(o.latency());
      propose += to_micros(o.proposal_done - o.start);
      commit += to_micros(o.end - o.proposal_done);
      if (!row.leader_byzantine) {
        honest_lat += to_micros(o.latency());
        ++honest_n;
      }
    }
  }
  m.decided = m.accepted + m.rejected;
  if (!m.rows.empty()) m.good_round_fraction = static_cast<double>(good) / static_cast<double>(m.rows.size());
  if (m.decided > 0) {
    m.mean_decided_latency_us = decided_lat / static_cast<double>(m.decided);
    m.mean_propose_us = propose / static_cast<double>(m.decided);
    m.mean_commit_us = commit / static_cast<double>(m.decided);
  }
  if (honest_n > 0) m.mean_honest_led_latency_us = honest_lat / static_cast<double>(honest_n);
  m.committed_txs = rep.chain ? rep.chain->committed_tx_count() : 0;
  for (const auto& n : nodes) {
    if (n.byzantine) continue;
    for (const auto& o : n.outcomes) {
      m.sim_duration = std::max(m.sim_duration, o.end);
      m.max_round_duration = std::max(m.max_round_duration, o.latency());
    }
  }
  if (m.sim_duration.count() > 0)
    m.tps = static_cast<double>(m.committed_txs) / (static_cast<double>(m.sim_duration.count()) / 1e9);
  return m;
}

CheckReport check_run(const ScenarioConfig& c, const std::vector<NodeResult>& nodes) {
  CheckReport r;
  std::vector<const NodeResult*> honest;
  for (const auto& n : nodes)
    if (!n.byzantine && n.chain) honest.push_back(&n);

  // Agreement: one hash per height across honest ledgers.
  Height top = 0;
  for (const auto* n : honest) top = std::max(top, n->chain->height());
  for (Height h = 0; h <= top; ++h) {
    std::set<chain::BlockHash> hashes;
    for (const auto* n : honest)
      if (auto hh = n->chain->hash_at(h)) hashes.insert(*hh);
    if (hashes.size() > 1) {
      ++r.agreement_violations;
      r.messages.push_back("honest ledgers disagree at height " + std::to_string(h));
    }
  }

  // Two variants of one round's proposal appended anywhere.
  std::map<Round, std::set<chain::BlockHash>> by_round;
  for (const auto* n : honest)
    for (Height h = 1; h <= n->chain->height(); ++h) {
      auto b = n->chain->block_at(h);
      by_round[b->round].insert(*n->chain->hash_at(h));
    }
  for (const auto& [round, hashes] : by_round)
    if (hashes.size() > 1) {
      ++r.both_variants_appended;
      r.messages.push_back("two blocks from round " + std::to_string(round) + " appended");
    }

  // Split decisions: accept and reject of the same hash in one round.
  std::map<std::pair<Round, chain::BlockHash>, std::pair<bool, bool>> decisions;
  r.min_scan_reads = UINT64_MAX;
  for (const auto* n : honest) {
    for (const auto& o : n->outcomes) {
      if (o.hash && o.outcome != Outcome::Abandoned) {
        auto& d = decisions[{o.round, *o.hash}];
        (o.outcome == Outcome::Accept ? d.first : d.second) = true;
      }
      if (o.latency() > c.effective_delta2()) {
        ++r.round_overruns;
        r.messages.push_back(n->id.str() + " round " + std::to_string(o.round) + " exceeded delta2");
      }
      r.max_round_duration = std::max(r.max_round_duration, o.latency());
      if (o.outcome != Outcome::Abandoned) {
        r.min_scan_reads = std::min(r.min_scan_reads, o.scan_reads);
        r.max_scan_reads = std::max(r.max_scan_reads, o.scan_reads);
      }
      r.scan_duplicates += o.scan_duplicates;
      if (&o == &n->outcomes.back() && o.pending) ++r.stuck_pending;
    }
  }
  if (r.min_scan_reads == UINT64_MAX) r.min_scan_reads = 0;
  for (const auto& [key, d] : decisions)
    if (d.first && d.second) {
      ++r.split_decisions;
      r.messages.push_back("split decision in round " + std::to_string(key.first));
    }

  // Conservation and replay determinism.
  std::uint64_t supply = 0;
  if (!nodes.empty() && nodes.front().chain)
    for (const auto& a : nodes.front().chain->genesis().allocations) supply += a.balance;
  std::map<Height, Bytes> state_at;
  for (const auto* n : honest) {
    if (n->chain->total_supply() != supply) {
      ++r.conservation_failures;
      r.messages.push_back(n->id.str() + " total supply changed");
    }
    ledger::ChainState replay(n->chain->genesis());
    for (Height h = 1; h <= n->chain->height(); ++h) {
      const auto b = n->chain->block_at(h);
      for (const auto& tx : b->txs) replay.apply(tx);
    }
    const Bytes live = n->chain->state_bytes();
    if (replay.encode() != live) {
      ++r.replay_mismatches;
      r.messages.push_back(n->id.str() + " replayed state differs from live state");
    }
    auto [it, fresh] = state_at.emplace(n->chain->height(), live);
    if (!fresh && it->second != live) {
      ++r.replay_mismatches;
      r.messages.push_back(n->id.str() + " state differs from a peer at equal height");
    }
  }

  // Store integrity.
  for (const auto& n : nodes) {
    if (!n.store_dir || !n.chain) continue;
    const auto rep = ledger::verify_store(*n.store_dir);
    if (!rep.ok || rep.blocks != n.chain->height() + 1 || rep.tip != n.chain->hash_at(n.chain->height())) {
      ++r.store_failures;
      r.messages.push_back(n.id.str() + " store check failed: " + (rep.ok ? "tip mismatch" : rep.error));
    }
  }
  return r;
}

std::string trace_to_jsonl(const std::vector<TraceEvent>& trace) {
  std::string out;
  for (const auto& e : trace) {
    nlohmann::json j = {{"t_ns", e.at.count()}, {"kind", e.kind}, {"node", e.node}, {"round", e.round}};
    if (e.target) j["target"] = e.target;
    if (!e.detail.empty()) j["detail"] = e.detail;
    out += j.dump();
    out += '\n';
  }
  return out;
}

}  // namespace smchain::harness
