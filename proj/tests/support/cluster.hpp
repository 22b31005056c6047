#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "smchain/harness/simulation.hpp"
#include "smchain/transport/sim_transport.hpp"

namespace smchain::test {

/// N in-process validators on one simulated transport, driven round by round
/// with arbitrary per-node behaviours.
class Cluster final : public consensus::SyncSource {
 public:
  using BehaviorFactory = std::function<std::unique_ptr<consensus::Behavior>(ValidatorId)>;

  explicit Cluster(harness::ScenarioConfig config, BehaviorFactory behaviors = {},
                   std::function<void(consensus::NodeConfig&)> tweak = {})
      : config_(std::move(config)), ids_(harness::derive_identities(config_)), verifier_(true) {
    transport::TransportConfig tc;
    tc.delta_max = config_.delta_max;
    tc.delay = config_.transport.delay;
    tc.byzantine = config_.byzantine_set();
    sim_ = std::make_unique<transport::SimTransport>(loop_, config_.n, tc, derive_seed(config_.seed, 1));
    std::vector<crypto::PublicKey> keys;
    for (const auto& kp : ids_.validators) keys.push_back(kp.pk);
    for (std::uint16_t i = 1; i <= config_.n; ++i) {
      auto m = std::make_unique<Member>();
      m->id = ValidatorId{i};
      m->monitor = std::make_unique<monitor::SmMonitor>(m->id, *sim_);
      m->monitor->connect_all();
      m->chain = std::make_unique<ledger::Blockchain>(ids_.genesis);
      m->pool = std::make_unique<ledger::TransactionPool>();
      if (behaviors) m->behavior = behaviors(m->id);
      auto nc = harness::node_config(config_, m->id);
      if (tweak) tweak(nc);
      m->node = std::make_unique<consensus::SmcaNode>(nc, ids_.validators[i - 1], keys, config_.effective_powers(),
                                                      loop_, *m->monitor, *m->chain, *m->pool, &verifier_,
                                                      m->behavior.get(), this);
      members_.push_back(std::move(m));
    }
  }

  std::vector<const ledger::ChainView*> peers(ValidatorId self) override {
    std::vector<const ledger::ChainView*> out;
    for (auto& m : members_)
      if (m->id != self && m->online) out.push_back(m->chain.get());
    return out;
  }

  /// Runs round k on every online node and returns their outcomes by id.
  std::vector<consensus::RoundOutcome> round(Round k) {
    std::vector<consensus::RoundOutcome> out(members_.size());
    auto one = [&](Member& m) -> Task<void> { out[m.id.value - 1] = co_await m.node->run_round(k); };
    for (auto& m : members_)
      if (m->online) loop_.spawn(one(*m));
    loop_.run();
    return out;
  }

  void submit(const chain::Transaction& tx, std::uint64_t received_at = 0) {
    for (auto& m : members_)
      m->chain->with_state([&](const ledger::ChainState& st) { m->pool->admit(tx, received_at, st, &verifier_); });
  }

  consensus::SmcaNode& node(std::uint16_t i) { return *members_.at(i - 1)->node; }
  ledger::Blockchain& chain(std::uint16_t i) { return *members_.at(i - 1)->chain; }
  ledger::TransactionPool& pool(std::uint16_t i) { return *members_.at(i - 1)->pool; }
  void set_online(std::uint16_t i, bool on) { members_.at(i - 1)->online = on; }
  const harness::Identities& ids() const { return ids_; }
  EventLoop& loop() { return loop_; }
  transport::SimTransport& transport() { return *sim_; }
  crypto::Verifier& verifier() { return verifier_; }
  std::size_t size() const { return members_.size(); }

 private:
  struct Member {
    ValidatorId id;
    bool online = true;
    std::unique_ptr<monitor::SmMonitor> monitor;
    std::unique_ptr<ledger::Blockchain> chain;
    std::unique_ptr<ledger::TransactionPool> pool;
    std::unique_ptr<consensus::Behavior> behavior;
    std::unique_ptr<consensus::SmcaNode> node;
  };

  harness::ScenarioConfig config_;
  harness::Identities ids_;
  EventLoop loop_;
  crypto::Verifier verifier_;
  std::unique_ptr<transport::SimTransport> sim_;
  std::vector<std::unique_ptr<Member>> members_;
};

inline harness::ScenarioConfig basic_config(std::size_t n, std::uint64_t seed = 1) {
  harness::ScenarioConfig c;
  c.n = n;
  c.f = (n - 1) / 2;
  c.seed = seed;
  return c;
}

}  // namespace smchain::test
