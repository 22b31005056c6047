#include "smchain/harness/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace smchain::harness {

using nlohmann::json;

namespace {

double fixed3(double v) { return std::round(v * 1000.0) / 1000.0; }

double us_num(Duration d) { return static_cast<double>(d.count()) / 1000.0; }

/// Rounded to the nanosecond-exact microsecond value with three decimals.
std::string us3(Duration d) {
  const auto ns = d.count();
  char buf[64];
  std::snprintf(buf, sizeof buf, "%lld.%03lld", static_cast<long long>(ns / 1000),
                static_cast<long long>(ns % 1000));
  return buf;
}

void write_file(const std::filesystem::path& p, const std::string& data) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << data;
  if (!out) throw std::runtime_error("write failed for " + p.string());
}

}  // namespace

std::string to_csv(const RunMetrics& m) {
  std::string out = "round,outcome,leader,latency_us,votes_true,votes_false,txs_committed\n";
  for (const auto& r : m.rows) {
    out += std::to_string(r.round);
    out += ',';
    out += consensus::to_string(r.outcome);
    out += ',';
    out += std::to_string(r.leader.value);
    out += ',';
    out += us3(r.latency);
    out += ',';
    out += std::to_string(r.votes_true);
    out += ',';
    out += std::to_string(r.votes_false);
    out += ',';
    out += std::to_string(r.txs_committed);
    out += '\n';
  }
  return out;
}

json rows_to_json(const RunMetrics& m) {
  json rows = json::array();
  for (const auto& r : m.rows) {
    rows.push_back({{"round", r.round},
                    {"outcome", consensus::to_string(r.outcome)},
                    {"leader", r.leader.value},
                    {"latency_us", us_num(r.latency)},
                    {"votes_true", r.votes_true},
                    {"votes_false", r.votes_false},
                    {"txs_committed", r.txs_committed}});
  }
  return {{"schema", kCsvSchema}, {"rows", rows}};
}

json summary_json(const RunMetrics& m, const CheckReport& c, const json& scenario) {
  json checks = {{"ok", c.ok()},
                 {"agreement_violations", c.agreement_violations},
                 {"split_decisions", c.split_decisions},
                 {"round_overruns", c.round_overruns},
                 {"max_round_duration_us", us_num(c.max_round_duration)},
                 {"both_variants_appended", c.both_variants_appended},
                 {"conservation_failures", c.conservation_failures},
                 {"replay_mismatches", c.replay_mismatches},
                 {"store_failures", c.store_failures},
                 {"stuck_pending", c.stuck_pending},
                 {"min_scan_reads", c.min_scan_reads},
                 {"max_scan_reads", c.max_scan_reads},
                 {"scan_duplicates", c.scan_duplicates},
                 {"honest_reads_over_delta", c.honest_reads_over_delta},
                 {"node_failures", c.node_failures},
                 {"messages", c.messages}};
  return {{"schema", kSummarySchema},
          {"rows_schema", kCsvSchema},
          {"scenario", scenario},
          {"rounds", m.rows.size()},
          {"decided", m.decided},
          {"accepted", m.accepted},
          {"rejected", m.rejected},
          {"abandoned", m.abandoned},
          {"good_round_fraction", fixed3(m.good_round_fraction)},
          {"committed_txs", m.committed_txs},
          {"sim_duration_us", us_num(m.sim_duration)},
          {"tps", fixed3(m.tps)},
          {"mean_decided_latency_us", fixed3(m.mean_decided_latency_us)},
          {"mean_honest_led_latency_us", fixed3(m.mean_honest_led_latency_us)},
          {"phase_us", {{"propose", fixed3(m.mean_propose_us)}, {"commit", fixed3(m.mean_commit_us)}}},
          {"max_round_duration_us", us_num(m.max_round_duration)},
          {"checks", checks}};
}

void emit_metrics(const RunMetrics& m, const CheckReport& checks, const json& scenario,
                  const std::filesystem::path& dir, const std::string& format) {
  std::filesystem::create_directories(dir);
  if (format == "json") {
    write_file(dir / "rounds.json", rows_to_json(m).dump(2) + "\n");
  } else {
    write_file(dir / "rounds.csv", to_csv(m));
  }
  write_file(dir / "summary.json", summary_json(m, checks, scenario).dump(2) + "\n");
}

}  // namespace smchain::harness
