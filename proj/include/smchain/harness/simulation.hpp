#pragma once

#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "smchain/common/trace.hpp"
#include "smchain/harness/metrics.hpp"
#include "smchain/harness/scenario.hpp"

namespace smchain::harness {

struct NodeResult {
  ValidatorId id;
  bool byzantine = false;
  std::vector<consensus::RoundOutcome> outcomes;
  std::unique_ptr<ledger::Blockchain> chain;
  std::optional<std::filesystem::path> store_dir;
  bool restarted = false;
};

struct RunResult {
  ScenarioConfig config;
  RunMetrics metrics;
  CheckReport checks;
  std::vector<NodeResult> nodes;
  std::vector<TraceEvent> trace;
  ValidatorId reporter;
  /// Workload transactions in submission order.
  std::vector<chain::TxId> submitted;
  transport::SimTransportStats transport_stats;
  std::uint64_t signatures_computed = 0;
  std::uint64_t signature_memo_hits = 0;

  const NodeResult& node(ValidatorId id) const { return nodes.at(id.value - 1); }
  /// Round whose block committed tx on the reporter's chain.
  std::map<chain::TxId, Round> commit_rounds() const;
};

/// Genesis and identities every node of a scenario derives from its seed.
struct Identities {
  std::vector<crypto::KeyPair> validators;
  std::vector<crypto::KeyPair> accounts;
  chain::Block genesis;
};

Identities derive_identities(const ScenarioConfig& config);
consensus::NodeConfig node_config(const ScenarioConfig& config, ValidatorId id);

/// Runs the scenario on the simulated transport and virtual clock, then
/// evaluates the post-run checks. Deterministic in (config, seed).
RunResult run_simulation(const ScenarioConfig& config);

/// Post-run checks over finished nodes.
CheckReport check_run(const ScenarioConfig& config, const std::vector<NodeResult>& nodes);
RunMetrics compute_metrics(const ScenarioConfig& config, const std::vector<NodeResult>& nodes,
                           ValidatorId reporter);
ValidatorId pick_reporter(const ScenarioConfig& config);

/// Event log as JSON lines, sorted by time.
std::string trace_to_jsonl(const std::vector<TraceEvent>& trace);

}  // namespace smchain::harness
