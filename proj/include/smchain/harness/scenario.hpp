#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "smchain/ledger/blockchain.hpp"
#include "smchain/transport/sim_transport.hpp"

namespace smchain::harness {

class ConfigError : public std::runtime_error {
 public:
  enum class Kind { Parse, Invariant };
  ConfigError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

enum class Strategy { None, CrashLeader, EquivocateLeader, SilentVoter, FalseVoter, DoubleVoter, StaleReplayer };

const char* to_string(Strategy s);
std::optional<Strategy> parse_strategy(const std::string& s);
const std::vector<Strategy>& all_strategies();

struct AdversaryConfig {
  Strategy strategy = Strategy::None;
  /// crash-leader: chance a Byzantine leader stays silent in a round it leads.
  double crash_probability = 1.0;
  /// crash-leader: if non-empty, crash only in these rounds.
  std::set<Round> rounds;
  /// equivocate-leader: the second variant lands after U[min, max].
  Duration swap_delay_min = micros(0);
  Duration swap_delay_max = micros(400);
  /// double-voter: gap between the TRUE write and the FALSE overwrite.
  Duration flip_delay = micros(50);
};

struct WorkloadConfig {
  std::size_t accounts = 8;
  std::uint64_t initial_balance = 1'000'000;
  /// Poisson arrivals per simulated second after the backlog.
  double rate_tps = 0.0;
  std::size_t initial_backlog = 0;
  std::uint64_t max_amount = 100;
};

struct TransportSettings {
  transport::TransportKind kind = transport::TransportKind::Simulated;
  transport::DelayModel delay;
  /// Loss probability on reads touching a Byzantine endpoint.
  double drop_probability = 0.0;
  std::vector<std::uint32_t> hosts;
  /// TCP: validator i listens for register reads on base_port + i and for
  /// queries on base_port + 100 + i.
  std::uint16_t base_port = 19000;
  std::string host = "127.0.0.1";
};

struct StoreSettings {
  std::optional<std::filesystem::path> dir;
  ledger::StoreOptions options;
};

struct CrashRecover {
  ValidatorId node;
  Round at_round = 0;
  Round rounds = 0;
};

struct ScenarioConfig {
  std::string name = "scenario";
  std::size_t n = 3;
  std::size_t f = 1;
  bool allow_nonconforming = false;
  std::uint64_t seed = 1;
  Round rounds = 100;
  AdversaryConfig adversary;
  std::vector<ValidatorId> byzantine_ids;
  /// Pick f Byzantine ids from the seed instead of byzantine_ids.
  bool byzantine_random = false;
  Duration delta_max = micros(5000);
  std::optional<Duration> delta1;
  std::optional<Duration> delta2;
  std::optional<Duration> scan_interval;
  std::optional<Duration> proposal_guard;
  ledger::BlockLimits block;
  WorkloadConfig workload;
  TransportSettings transport;
  /// Voting power per validator (defaults to 1 each).
  std::vector<std::uint64_t> powers;
  StoreSettings store;
  std::vector<CrashRecover> crash_recover;
  bool trace = false;
  bool crypto_cache = true;

  Duration effective_delta1() const { return delta1.value_or(4 * delta_max); }
  Duration effective_delta2() const { return delta2.value_or(12 * delta_max); }
  Duration effective_scan_interval() const { return scan_interval.value_or(delta_max / 4); }
  Duration effective_guard() const { return proposal_guard.value_or(delta_max / 4); }
  std::vector<std::uint64_t> effective_powers() const;
  /// Byzantine set after resolving byzantine_random.
  std::set<ValidatorId> byzantine_set() const;
};

/// Throws ConfigError: Parse for malformed input, unknown keys or unknown
/// strategy names; Invariant for inconsistent parameters.
ScenarioConfig parse_scenario(const nlohmann::json& j);
ScenarioConfig load_scenario(const std::filesystem::path& path);
void validate(const ScenarioConfig& c);
nlohmann::json to_json(const ScenarioConfig& c);

}  // namespace smchain::harness
