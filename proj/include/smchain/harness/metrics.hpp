#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "smchain/consensus/node.hpp"

namespace smchain::harness {

inline constexpr const char* kCsvSchema = "smchain.rounds/1";
inline constexpr const char* kSummarySchema = "smchain.summary/1";

/// One CSV row, taken from the reporting node (lowest-id honest validator
/// that stays online for the whole run).
struct RoundRow {
  Round round = 0;
  consensus::Outcome outcome = consensus::Outcome::Abandoned;
  ValidatorId leader;
  bool leader_byzantine = false;
  Duration latency{0};
  Duration propose_time{0};
  std::size_t votes_true = 0;
  std::size_t votes_false = 0;
  std::size_t txs_committed = 0;
};

struct RunMetrics {
  std::vector<RoundRow> rows;
  std::size_t decided = 0;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t abandoned = 0;
  /// Share of rounds led by an honest validator.
  double good_round_fraction = 0.0;
  std::size_t committed_txs = 0;
  Duration sim_duration{0};
  double tps = 0.0;
  double mean_decided_latency_us = 0.0;
  double mean_honest_led_latency_us = 0.0;
  double mean_propose_us = 0.0;
  double mean_commit_us = 0.0;
  Duration max_round_duration{0};
};

struct CheckReport {
  std::size_t agreement_violations = 0;
  std::size_t split_decisions = 0;
  std::size_t round_overruns = 0;
  Duration max_round_duration{0};
  std::size_t both_variants_appended = 0;
  std::size_t conservation_failures = 0;
  std::size_t replay_mismatches = 0;
  std::size_t store_failures = 0;
  std::size_t stuck_pending = 0;
  /// Minimum and maximum successful scan reads over honest node-rounds.
  std::uint64_t min_scan_reads = 0;
  std::uint64_t max_scan_reads = 0;
  std::size_t scan_duplicates = 0;
  std::size_t honest_reads_over_delta = 0;
  /// TCP runs: validator processes that crashed or produced no results.
  std::size_t node_failures = 0;
  std::vector<std::string> messages;

  bool ok() const {
    return agreement_violations == 0 && split_decisions == 0 && round_overruns == 0 &&
           both_variants_appended == 0 && conservation_failures == 0 && replay_mismatches == 0 &&
           store_failures == 0 && honest_reads_over_delta == 0 && node_failures == 0;
  }
};

/// Header plus one row per round; fixed formatting so equal runs give
/// byte-identical output.
std::string to_csv(const RunMetrics& m);
nlohmann::json rows_to_json(const RunMetrics& m);
nlohmann::json summary_json(const RunMetrics& m, const CheckReport& checks, const nlohmann::json& scenario);

/// Writes rounds.csv (or rounds.json) and summary.json into dir.
void emit_metrics(const RunMetrics& m, const CheckReport& checks, const nlohmann::json& scenario,
                  const std::filesystem::path& dir, const std::string& format);

}  // namespace smchain::harness
