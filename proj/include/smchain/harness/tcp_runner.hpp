#pragma once

#include <filesystem>
#include <optional>

#include "smchain/harness/simulation.hpp"

namespace smchain::harness {

/// One validator process of a TCP scenario.
struct TcpNodeOptions {
  std::filesystem::path scenario_path;
  std::optional<std::uint64_t> seed;
  ValidatorId id;
  /// Run directory shared with the coordinator; the node uses out/node-<id>.
  std::filesystem::path out;
  /// Wall-clock instant (ns since the Unix epoch) at which round 1 starts.
  std::int64_t start_at_unix_ns = 0;
};

/// Serves registers and queries, runs the configured rounds, writes
/// outcomes.json, then keeps serving until the coordinator drops a stop file.
int run_tcp_node(const TcpNodeOptions& options);

struct TcpRunOptions {
  std::filesystem::path scenario_path;
  std::filesystem::path executable;
  std::filesystem::path out;
  /// Gap between launching the processes and round 1.
  Duration startup = std::chrono::milliseconds(1500);
};

/// Starts one `smchain node` process per validator, waits for them, then
/// evaluates the same checks as a simulated run over their stores.
RunResult run_tcp(const ScenarioConfig& config, const TcpRunOptions& options);

/// Path of the running binary, falling back to argv0.
std::filesystem::path tcp_self_executable(const char* argv0);

nlohmann::json outcome_to_json(const consensus::RoundOutcome& o);
consensus::RoundOutcome outcome_from_json(const nlohmann::json& j);

}  // namespace smchain::harness
