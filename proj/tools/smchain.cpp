#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "smchain/harness/estimate.hpp"
#include "smchain/harness/simulation.hpp"
#include "smchain/harness/sweep.hpp"
#include "smchain/harness/tcp_runner.hpp"
#include "smchain/ledger/query.hpp"
#include "smchain/ledger/store.hpp"

namespace {

using namespace smchain;
using namespace smchain::harness;

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kInvariant = 2;
constexpr int kConfig = 3;

void write_text(const std::filesystem::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << s;
}

void print_summary(const RunResult& r) {
  const auto& m = r.metrics;
  std::printf("%s: n=%zu f=%zu seed=%llu adversary=%s rounds=%zu decided=%zu (accept %zu, reject %zu) "
              "abandoned=%zu committed_txs=%zu tps=%.1f mean_latency_us=%.1f checks=%s\n",
              r.config.name.c_str(), r.config.n, r.config.f, static_cast<unsigned long long>(r.config.seed),
              to_string(r.config.adversary.strategy), m.rows.size(), m.decided, m.accepted, m.rejected, m.abandoned,
              m.committed_txs, m.tps, m.mean_decided_latency_us, r.checks.ok() ? "ok" : "FAILED");
  for (const auto& msg : r.checks.messages) std::printf("  %s\n", msg.c_str());
}

int cmd_run(const std::filesystem::path& scenario, std::optional<std::uint64_t> seed,
            std::optional<std::filesystem::path> out, const std::string& format, bool trace, const char* argv0) {
  ScenarioConfig c = load_scenario(scenario);
  if (seed) c.seed = *seed;
  if (trace) c.trace = true;
  // Relative store paths live under the output directory when one is given.
  if (out && c.store.dir && c.store.dir->is_relative()) c.store.dir = *out / *c.store.dir;
  RunResult r;
  if (c.transport.kind == transport::TransportKind::Tcp) {
    TcpRunOptions opts;
    opts.scenario_path = std::filesystem::absolute(scenario);
    opts.executable = tcp_self_executable(argv0);
    opts.out = out.value_or(std::filesystem::temp_directory_path() / ("smchain-tcp-" + std::to_string(c.seed)));
    r = run_tcp(c, opts);
  } else {
    r = run_simulation(c);
  }
  print_summary(r);
  if (out) {
    emit_metrics(r.metrics, r.checks, to_json(r.config), *out, format);
    if (!r.trace.empty()) write_text(*out / "trace.jsonl", trace_to_jsonl(r.trace));
  }
  if (!r.checks.ok()) {
    if (out && r.trace.empty() && c.transport.kind == transport::TransportKind::Simulated) {
      // Same config and seed replay the same run, this time recording events.
      ScenarioConfig again = c;
      again.trace = true;
      again.store.dir.reset();
      write_text(*out / "trace.jsonl", trace_to_jsonl(run_simulation(again).trace));
      std::fprintf(stderr, "trace written to %s\n", (*out / "trace.jsonl").c_str());
    }
    return kInvariant;
  }
  return kOk;
}

int cmd_sweep(const std::filesystem::path& scenario, const std::string& param, std::size_t seeds,
              std::optional<std::uint64_t> seed, std::optional<std::filesystem::path> out) {
  ScenarioConfig c = load_scenario(scenario);
  if (seed) c.seed = *seed;
  if (c.transport.kind != transport::TransportKind::Simulated)
    throw ConfigError(ConfigError::Kind::Invariant, "sweep runs on the simulated transport only");
  const auto p = parse_sweep_param(param);
  const auto points = run_sweep(c, p, seeds);
  const auto csv = sweep_to_csv(p, points);
  std::fputs(csv.c_str(), stdout);
  if (out) {
    std::filesystem::create_directories(*out);
    write_text(*out / "sweep.csv", csv);
  }
  for (const auto& pt : points)
    if (!pt.ok) return kInvariant;
  return kOk;
}

int cmd_query(const std::string& node, const std::vector<std::string>& words) {
  auto ep = net::parse_endpoint(node);
  if (!ep) throw ConfigError(ConfigError::Kind::Parse, "node address must be host:port");
  if (words.empty()) throw ConfigError(ConfigError::Kind::Parse, "query needs a kind: head, block <k>, balance <acct>");
  std::string arg;
  for (std::size_t i = 1; i < words.size(); ++i) arg += (i > 1 ? " " : "") + words[i];
  ledger::QueryClient client(*ep);
  const auto j = client.request(words[0], arg);
  std::cout << j.dump(2) << "\n";
  return j.value("status", "") == "ok" ? kOk : kFailure;
}

int cmd_verify_store(const std::filesystem::path& path) {
  const auto rep = ledger::verify_store(path);
  if (rep.ok) {
    std::printf("ok: %llu blocks, %llu index entries, tip %s\n", static_cast<unsigned long long>(rep.blocks),
                static_cast<unsigned long long>(rep.index_entries), rep.tip ? to_hex(*rep.tip).c_str() : "-");
    return kOk;
  }
  std::printf("FAILED: %s\n", rep.error.c_str());
  return kInvariant;
}

int cmd_estimate(const std::filesystem::path& scenario, std::size_t trials, const std::string& model,
                 std::optional<Round> horizon) {
  ScenarioConfig c = load_scenario(scenario);
  if (horizon) c.rounds = *horizon;
  LeaderModel m = LeaderModel::Sampled;
  if (model == "schedule") {
    m = LeaderModel::Schedule;
  } else if (model != "sampled") {
    throw ConfigError(ConfigError::Kind::Parse, "model must be sampled or schedule");
  }
  const auto e = good_round_estimate(c, trials, m);
  std::printf("T=%llu trials=%zu honest_fraction=%.4f Pr[X>T/4]=%.4f bound=%.4f margin=%.2f mean_good=%.4f %s\n",
              static_cast<unsigned long long>(e.horizon), e.trials, e.honest_fraction, e.empirical, e.bound,
              e.margin, e.mean_good_fraction, e.passed() ? "ok" : "FAILED");
  return e.passed() ? kOk : kInvariant;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shared-memory consensus blockchain: simulator and node tools"};
  app.require_subcommand(1);

  std::filesystem::path scenario;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out;
  std::string format = "csv";
  bool trace = false;
  auto* run = app.add_subcommand("run", "Run a scenario");
  run->add_option("--scenario", scenario, "Scenario file (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", seed, "Override the scenario seed");
  run->add_option("--out", out, "Directory for metrics");
  run->add_option("--format", format, "Per-round metrics format")->check(CLI::IsMember({"csv", "json"}));
  run->add_flag("--trace", trace, "Record the event trace");

  std::string param;
  std::size_t seeds = 1;
  auto* sweep = app.add_subcommand("sweep", "Run a scenario over a parameter range");
  sweep->add_option("--scenario", scenario, "Scenario file (JSON)")->required()->check(CLI::ExistingFile);
  sweep->add_option("--param", param, "name=start:step:end or name=v1,v2,...")->required();
  sweep->add_option("--seeds", seeds, "Seeds per point");
  sweep->add_option("--seed", seed, "First seed");
  sweep->add_option("--out", out, "Directory for sweep.csv");

  std::string node;
  std::vector<std::string> words;
  auto* query = app.add_subcommand("query", "Query a running node");
  query->add_option("--node", node, "host:port of the node's query service")->required();
  query->add_option("request", words, "head | block <k> | balance <acct> | hash <k> | tx <id>")->required();

  std::filesystem::path store;
  auto* verify = app.add_subcommand("verify-store", "Check a block store offline");
  verify->add_option("path", store, "Store directory or blocks.log")->required();

  std::size_t trials = 1000;
  std::string model = "sampled";
  std::optional<Round> horizon;
  auto* estimate = app.add_subcommand("estimate", "Monte Carlo estimate of good rounds");
  estimate->add_option("--scenario", scenario, "Scenario file (JSON)")->required()->check(CLI::ExistingFile);
  estimate->add_option("--trials", trials, "Number of trials");
  estimate->add_option("--model", model, "sampled | schedule");
  estimate->add_option("--rounds", horizon, "Horizon T (defaults to the scenario's rounds)");

  TcpNodeOptions node_opts;
  std::uint16_t node_id = 0;
  auto* node_cmd = app.add_subcommand("node", "Run one validator of a TCP scenario");
  node_cmd->group("");
  node_cmd->add_option("--scenario", node_opts.scenario_path)->required();
  node_cmd->add_option("--id", node_id)->required();
  node_cmd->add_option("--seed", node_opts.seed);
  node_cmd->add_option("--out", node_opts.out)->required();
  node_cmd->add_option("--start-at", node_opts.start_at_unix_ns)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  try {
    if (*run) return cmd_run(scenario, seed, out, format, trace, argv[0]);
    if (*sweep) return cmd_sweep(scenario, param, seeds, seed, out);
    if (*query) return cmd_query(node, words);
    if (*verify) return cmd_verify_store(store);
    if (*estimate) return cmd_estimate(scenario, trials, model, horizon);
    if (*node_cmd) {
      node_opts.id = ValidatorId{node_id};
      return run_tcp_node(node_opts);
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfig;
  } catch (const ledger::IntegrityViolation& e) {
    std::fprintf(stderr, "integrity violation: %s\n", e.what());
    return kInvariant;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kFailure;
  }
  return kOk;
}
