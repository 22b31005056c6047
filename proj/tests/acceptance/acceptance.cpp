// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Every tolerance is fixed here.

#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "cluster.hpp"
#include "smchain/consensus/proposer.hpp"
#include "smchain/harness/adversary.hpp"
#include "smchain/harness/estimate.hpp"
#include "smchain/harness/simulation.hpp"
#include "smchain/harness/sweep.hpp"
#include "smchain/ledger/store.hpp"
#include "smchain/ledger/sync.hpp"

using namespace smchain;
using namespace smchain::harness;
using consensus::Outcome;

namespace {

constexpr std::size_t kMatrixSeeds = 50;
constexpr Round kMatrixRounds = 100;
const std::vector<std::size_t> kMatrixSizes{3, 5, 7, 9, 15};
constexpr std::size_t kEquivocationRuns = 1000;
constexpr Round kChernoffHorizon = 64;
constexpr std::size_t kChernoffTrials = 1000;
constexpr double kChernoffMargin = 0.01;
constexpr std::size_t kLivenessRuns = 100;
constexpr std::size_t kTrendSeeds = 10;
constexpr double kByzantineLatencySpread = 0.20;

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::vector<std::pair<std::string, Verdict>> g_results;

void report(int id, const std::string& name, Verdict v) {
  std::printf("[%s] criterion %2d %s: %s\n", v.pass ? "PASS" : "FAIL", id, name.c_str(), v.detail.c_str());
  std::fflush(stdout);
  g_results.emplace_back(name, std::move(v));
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

/// Runs jobs(i) for i in [0, count) on all hardware threads.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& job) {
  const std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) job(i);
    });
  }
  for (auto& t : pool) t.join();
}

ScenarioConfig base(std::size_t n, std::uint64_t seed, Round rounds) {
  ScenarioConfig c;
  c.name = "acceptance";
  c.n = n;
  c.f = (n - 1) / 2;
  c.seed = seed;
  c.rounds = rounds;
  c.workload.accounts = 16;
  c.workload.rate_tps = 500;
  c.workload.initial_backlog = 50;
  return c;
}

std::vector<const NodeResult*> honest_nodes(const RunResult& r) {
  std::vector<const NodeResult*> out;
  for (const auto& n : r.nodes)
    if (!n.byzantine) out.push_back(&n);
  return out;
}

// Independent evaluations over finished runs. These read chains and round
// outcomes directly rather than trusting the harness's own checks.

std::size_t count_disagreements(const RunResult& r) {
  const auto honest = honest_nodes(r);
  std::size_t bad = 0;
  for (std::size_t i = 1; i < honest.size(); ++i) {
    const auto& a = *honest[0]->chain;
    const auto& b = *honest[i]->chain;
    const Height common = std::min(a.height(), b.height());
    for (Height h = 0; h <= common; ++h)
      if (a.hash_at(h) != b.hash_at(h)) ++bad;
  }
  return bad;
}

std::size_t count_splits(const RunResult& r) {
  std::map<Round, std::set<chain::BlockHash>> appended, rejected;
  for (const auto* n : honest_nodes(r)) {
    for (const auto& o : n->outcomes) {
      if (!o.hash) continue;
      if (o.outcome == Outcome::Accept) appended[o.round].insert(*o.hash);
      if (o.outcome == Outcome::Reject) rejected[o.round].insert(*o.hash);
    }
    // Blocks appended by sync or a late certified fetch count as appended too.
    for (Height h = 1; h <= n->chain->height(); ++h) {
      const auto b = n->chain->block_at(h);
      appended[b->round].insert(*n->chain->hash_at(h));
    }
  }
  std::size_t splits = 0;
  for (const auto& [k, hashes] : rejected)
    for (const auto& h : hashes) splits += appended[k].contains(h);
  return splits;
}

/// Rounds whose block appears in two different variants across honest chains.
std::size_t count_double_variants(const RunResult& r) {
  std::map<Round, std::set<chain::BlockHash>> by_round;
  for (const auto* n : honest_nodes(r))
    for (Height h = 1; h <= n->chain->height(); ++h) by_round[n->chain->block_at(h)->round].insert(*n->chain->hash_at(h));
  std::size_t both = 0;
  for (const auto& [k, hashes] : by_round) both += hashes.size() > 1;
  return both;
}

struct Timing {
  std::size_t overruns = 0;
  std::size_t missing = 0;
  Duration max{0};
};

Timing round_timing(const RunResult& r) {
  Timing t;
  const auto d2 = r.config.effective_delta2();
  for (const auto* n : honest_nodes(r)) {
    if (n->outcomes.size() != r.config.rounds && !n->restarted) ++t.missing;
    for (const auto& o : n->outcomes) {
      t.max = std::max(t.max, o.latency());
      t.overruns += o.latency() > d2;
    }
  }
  return t;
}

std::size_t store_failures(const RunResult& r) {
  std::size_t bad = 0;
  for (const auto& n : r.nodes) {
    if (!n.store_dir) {
      ++bad;
      continue;
    }
    const auto rep = ledger::verify_store(*n.store_dir);
    if (!rep.ok || rep.blocks != n.chain->height() + 1 || rep.tip != n.chain->tip_hash()) ++bad;
  }
  return bad;
}

std::filesystem::path scratch_root() {
  static const auto root = [] {
    std::random_device rd;
    auto p = std::filesystem::temp_directory_path() / ("smchain-acceptance-" + std::to_string(rd()));
    std::filesystem::create_directories(p);
    return p;
  }();
  return root;
}

// Criteria 1, 4, 5 and the first half of 12 share one matrix.
struct MatrixTotals {
  std::size_t runs = 0, disagreements = 0, splits = 0, overruns = 0, missing = 0, stores = 0, checks_failed = 0;
  Duration max_round{0};
  Duration delta2{0};
  std::vector<std::string> failures;
};

MatrixTotals run_matrix() {
  struct Job {
    Strategy s;
    std::size_t n;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (auto s : all_strategies())
    for (auto n : kMatrixSizes)
      for (std::uint64_t seed = 1; seed <= kMatrixSeeds; ++seed) jobs.push_back({s, n, seed});

  MatrixTotals t;
  std::mutex mu;
  parallel_for(jobs.size(), [&](std::size_t i) {
    const auto& j = jobs[i];
    auto c = base(j.n, j.seed, kMatrixRounds);
    c.adversary.strategy = j.s;
    c.byzantine_random = j.s != Strategy::None;
    c.store.dir = scratch_root() / ("matrix-" + std::to_string(i));
    const auto r = run_simulation(c);
    const auto dis = count_disagreements(r);
    const auto spl = count_splits(r);
    const auto tim = round_timing(r);
    const auto sto = store_failures(r);
    std::filesystem::remove_all(*c.store.dir);

    std::lock_guard lock(mu);
    ++t.runs;
    t.disagreements += dis;
    t.splits += spl;
    t.overruns += tim.overruns;
    t.missing += tim.missing;
    t.max_round = std::max(t.max_round, tim.max);
    t.delta2 = c.effective_delta2();
    t.stores += sto;
    t.checks_failed += !r.checks.ok();
    if ((dis || spl || tim.overruns || tim.missing || sto || !r.checks.ok()) && t.failures.size() < 5)
      t.failures.push_back(fmt("%s n=%zu seed=%llu", to_string(j.s), j.n, static_cast<unsigned long long>(j.seed)));
  });
  return t;
}

std::string first_failures(const MatrixTotals& t) {
  std::string s;
  for (const auto& f : t.failures) s += " [" + f + "]";
  return s;
}

// Criterion 2: exhaustive vote assignments through real nodes.

Outcome quorum_oracle(const std::vector<int>& votes, std::size_t f) {
  std::size_t t = 0, fl = 0;
  for (int v : votes) {
    t += v == 1;
    fl += v == 0;
  }
  if (t >= f + 1) return Outcome::Accept;
  if (fl >= f + 1) return Outcome::Reject;
  return Outcome::Abandoned;
}

Verdict criterion_quorum_oracle() {
  std::size_t cases = 0, matched = 0;
  std::string first_miss;
  for (std::size_t n : {3u, 5u}) {
    const std::size_t f = (n - 1) / 2;
    std::size_t total = 1;
    for (std::size_t i = 0; i < n; ++i) total *= 3;
    for (std::size_t code = 0; code < total; ++code) {
      // 0 FALSE, 1 TRUE, 2 silent.
      std::vector<int> votes(n);
      for (std::size_t i = 0, c = code; i < n; ++i, c /= 3) votes[i] = static_cast<int>(c % 3);
      auto cfg = test::basic_config(n, 1000 + code);
      test::Cluster cluster(cfg, [&](ValidatorId id) -> std::unique_ptr<consensus::Behavior> {
        const int v = votes[id.value - 1];
        return std::make_unique<ScriptedVote>(v == 2 ? std::nullopt : std::optional<bool>(v == 1));
      });
      const auto outs = cluster.round(1);
      const auto expect = quorum_oracle(votes, f);
      bool all = true;
      for (std::uint16_t i = 1; i <= n; ++i) {
        const auto& o = outs[i - 1];
        bool ok = o.outcome == expect;
        ok = ok && (expect == Outcome::Accept) == (cluster.chain(i).height() == 1);
        all = all && ok;
      }
      ++cases;
      matched += all;
      if (!all && first_miss.empty()) first_miss = fmt(" first mismatch N=%zu code=%zu", n, code);
    }
  }
  return {matched == cases && cases == 27 + 243, fmt("%zu/%zu assignments match (27 at N=3, 243 at N=5)%s", matched,
                                                     cases, first_miss.c_str())};
}

// Criterion 3.

Verdict criterion_equivocation() {
  std::atomic<std::size_t> both{0}, failed{0}, swaps_rounds{0};
  parallel_for(kEquivocationRuns, [&](std::size_t i) {
    auto c = base(5, 7000 + i, 20);
    c.adversary.strategy = Strategy::EquivocateLeader;
    c.byzantine_random = true;
    // Swap windows from immediate up to three times the delay bound.
    std::mt19937_64 rng(i);
    c.adversary.swap_delay_min = micros(static_cast<std::int64_t>(rng() % 2000));
    c.adversary.swap_delay_max = c.adversary.swap_delay_min + micros(static_cast<std::int64_t>(rng() % 13000));
    const auto r = run_simulation(c);
    both += count_double_variants(r);
    failed += !r.checks.ok();
    for (const auto& row : r.metrics.rows) swaps_rounds += row.leader_byzantine;
  });
  return {both == 0 && failed == 0,
          fmt("%zu runs at N=5, %zu equivocating-leader rounds, both variants appended %zu times, failed checks %zu",
              kEquivocationRuns, swaps_rounds.load(), both.load(), failed.load())};
}

// Criterion 6.

Verdict criterion_chernoff() {
  // Five validators with equal power, two Byzantine: honest fraction 0.6.
  const std::vector<std::uint64_t> powers{1, 1, 1, 1, 1};
  const std::set<ValidatorId> byz{ValidatorId{4}, ValidatorId{5}};
  const auto e = good_round_estimate(powers, byz, kChernoffHorizon, kChernoffTrials, 64, LeaderModel::Sampled,
                                     kChernoffMargin);
  const double threshold = 1.0 - std::exp(-4.0) - kChernoffMargin;
  const bool pass = std::abs(e.honest_fraction - 0.6) < 1e-12 && e.empirical >= threshold && e.trials == kChernoffTrials;
  return {pass, fmt("T=%llu honest=%.2f trials=%zu empirical=%.4f threshold=%.4f", kChernoffHorizon,
                    e.honest_fraction, e.trials, e.empirical, threshold)};
}

// Criterion 7.

Verdict criterion_liveness() {
  constexpr std::size_t kBacklog = 60;
  constexpr std::size_t kCapacity = 10;
  constexpr Round kR = (kBacklog + kCapacity - 1) / kCapacity;
  constexpr Round kBound = 4 * kR + 8;
  std::atomic<std::size_t> misses{0}, txs{0}, crashes{0}, failed{0};
  std::atomic<Round> worst{0};
  parallel_for(kLivenessRuns, [&](std::size_t i) {
    auto c = base(5, 9000 + i, kBound + 4);
    c.workload.rate_tps = 0;
    c.workload.initial_backlog = kBacklog;
    c.block.max_txs = kCapacity;
    c.adversary.strategy = Strategy::CrashLeader;
    c.adversary.crash_probability = 0.5;
    c.byzantine_random = true;
    const auto r = run_simulation(c);
    failed += !r.checks.ok();
    for (const auto& row : r.metrics.rows) crashes += row.outcome == Outcome::Abandoned;
    for (const auto* n : honest_nodes(r)) {
      std::map<chain::TxId, Round> at;
      for (Height h = 1; h <= n->chain->height(); ++h) {
        const auto b = n->chain->block_at(h);
        for (const auto& tx : b->txs) at.emplace(tx.tx_id, b->round);
      }
      for (const auto& id : r.submitted) {
        ++txs;
        auto it = at.find(id);
        if (it == at.end() || it->second > kBound) {
          ++misses;
        } else {
          Round w = worst.load();
          while (it->second > w && !worst.compare_exchange_weak(w, it->second)) {
          }
        }
      }
    }
  });
  return {misses == 0 && failed == 0,
          fmt("%zu runs, R=%llu, bound %llu rounds, %zu crashed rounds, %zu tx checks, latest commit round %llu, "
              "misses %zu",
              kLivenessRuns, static_cast<unsigned long long>(kR), static_cast<unsigned long long>(kBound),
              crashes.load(), txs.load(), static_cast<unsigned long long>(worst.load()), misses.load())};
}

// Criterion 8.

Verdict criterion_fairness() {
  consensus::ProposerQueue q({2, 1, 1});
  std::vector<std::size_t> counts(3, 0);
  for (Round k = 1; k <= 400; ++k) ++counts[q.proposer_of(k).value - 1];
  bool rr = true;
  for (std::size_t n : {1u, 2u, 3u, 5u, 7u, 16u}) {
    consensus::ProposerQueue eq(std::vector<std::uint64_t>(n, 3));
    for (Round k = 1; k <= 1000; ++k) rr = rr && eq.proposer_of(k).value == (k - 1) % n + 1;
  }
  const bool exact = counts == std::vector<std::size_t>{200, 100, 100};
  return {exact && rr, fmt("(2,1,1) x 400 -> (%zu,%zu,%zu); equal powers round robin %s", counts[0], counts[1],
                           counts[2], rr ? "exact" : "broken")};
}

// Criterion 9.

Verdict criterion_scan_economy() {
  std::size_t node_rounds = 0, wrong = 0, dups = 0;
  for (std::size_t n : kMatrixSizes) {
    const auto r = run_simulation(base(n, 5, 100));
    for (const auto& node : r.nodes) {
      for (const auto& o : node.outcomes) {
        ++node_rounds;
        wrong += o.scan_reads != n;
        dups += o.scan_duplicates;
      }
    }
  }
  return {wrong == 0 && dups == 0,
          fmt("%zu honest node-rounds over N in {3,5,7,9,15}: reads != N in %zu, duplicate ids %zu", node_rounds,
              wrong, dups)};
}

// Criterion 10.

Verdict criterion_trends() {
  // (a) latency against n.
  const std::vector<std::size_t> sizes{5, 7, 9, 11, 13, 15};
  std::vector<double> lat(sizes.size(), 0.0);
  std::mutex mu;
  parallel_for(sizes.size() * kTrendSeeds, [&](std::size_t i) {
    const auto r = run_simulation(base(sizes[i / kTrendSeeds], 100 + i % kTrendSeeds, 100));
    std::lock_guard lock(mu);
    lat[i / kTrendSeeds] += r.metrics.mean_decided_latency_us / kTrendSeeds;
  });
  bool a = true;
  for (std::size_t i = 1; i < lat.size(); ++i) a = a && lat[i] >= lat[i - 1];

  // (b) throughput against block capacity, under a saturating backlog.
  const std::vector<std::size_t> caps{16, 32, 64, 128, 256};
  std::vector<double> tps(caps.size(), 0.0);
  parallel_for(caps.size() * kTrendSeeds, [&](std::size_t i) {
    auto c = base(7, 200 + i % kTrendSeeds, 50);
    c.workload.accounts = 512;
    c.workload.initial_backlog = 50 * 256 + 500;
    c.workload.rate_tps = 0;
    c.block.max_txs = caps[i / kTrendSeeds];
    c.block.max_bytes = 1 << 22;
    const auto r = run_simulation(c);
    std::lock_guard lock(mu);
    tps[i / kTrendSeeds] += r.metrics.tps / kTrendSeeds;
  });
  bool b = true;
  for (std::size_t i = 1; i < tps.size(); ++i) b = b && tps[i] >= tps[i - 1];

  // (c) honest-led latency against the Byzantine share at n=16.
  const std::vector<std::size_t> byz{1, 2, 3, 4, 5, 6};
  std::vector<double> hl(byz.size(), 0.0);
  parallel_for(byz.size() * kTrendSeeds, [&](std::size_t i) {
    auto c = base(16, 300 + i % kTrendSeeds, 100);
    c.f = 7;
    c.allow_nonconforming = true;
    c.adversary.strategy = Strategy::SilentVoter;
    c = apply_sweep_value(c, "byzantine_count", static_cast<double>(byz[i / kTrendSeeds]));
    const auto r = run_simulation(c);
    std::lock_guard lock(mu);
    hl[i / kTrendSeeds] += r.metrics.mean_honest_led_latency_us / kTrendSeeds;
  });
  const auto [lo, hi] = std::minmax_element(hl.begin(), hl.end());
  const double spread = (*hi - *lo) / *lo;
  const bool cpass = spread < kByzantineLatencySpread;

  auto series = [](const std::vector<double>& v) {
    std::string s;
    for (double x : v) s += fmt("%s%.1f", s.empty() ? "" : ",", x);
    return s;
  };
  return {a && b && cpass,
          fmt("(a) latency_us n=5..15 [%s] %s; (b) tps capacity 16..256 [%s] %s; (c) honest-led latency_us "
              "byzantine 1..6 of 16 [%s] spread %.1f%% %s",
              series(lat).c_str(), a ? "non-decreasing" : "NOT monotone", series(tps).c_str(),
              b ? "non-decreasing" : "NOT monotone", series(hl).c_str(), spread * 100, cpass ? "< 20%" : ">= 20%")};
}

// Criterion 11.

std::string csv_for(const ScenarioConfig& c) { return to_csv(run_simulation(c).metrics); }

/// Runs the scenario in a forked child and returns the CSV it produced.
std::string csv_in_child(const ScenarioConfig& c) {
  int fds[2];
  if (::pipe(fds) != 0) return "";
  const pid_t pid = ::fork();
  if (pid == 0) {
    ::close(fds[0]);
    const auto csv = csv_for(c);
    std::size_t off = 0;
    while (off < csv.size()) {
      const auto n = ::write(fds[1], csv.data() + off, csv.size() - off);
      if (n <= 0) ::_exit(1);
      off += static_cast<std::size_t>(n);
    }
    ::_exit(0);
  }
  ::close(fds[1]);
  std::string out;
  char buf[4096];
  for (;;) {
    const auto n = ::read(fds[0], buf, sizeof buf);
    if (n <= 0) break;
    out.append(buf, static_cast<std::size_t>(n));
  }
  ::close(fds[0]);
  int status = 0;
  ::waitpid(pid, &status, 0);
  return WIFEXITED(status) && WEXITSTATUS(status) == 0 ? out : "";
}

Verdict criterion_determinism() {
  std::size_t scenarios = 0, identical = 0;
  for (auto s : all_strategies()) {
    auto c = base(7, 42, 100);
    c.adversary.strategy = s;
    c.byzantine_random = s != Strategy::None;
    const auto a = csv_for(c);
    const auto b = csv_for(c);
    const auto p = csv_in_child(c);
    const auto q = csv_in_child(c);
    ++scenarios;
    identical += !a.empty() && a == b && a == p && a == q;
  }
  return {identical == scenarios,
          fmt("%zu/%zu scenarios byte-identical over two in-process runs and two child processes", identical,
              scenarios)};
}

// Criterion 12 (second half): restart recovery.

Verdict criterion_recovery(const MatrixTotals& m) {
  std::vector<std::string> problems;
  // In-simulation kill and restart: node 3 offline for 3 rounds, then
  // reopened from its store and synced.
  auto c = base(5, 77, 40);
  c.store.dir = scratch_root() / "recover";
  c.crash_recover.push_back({ValidatorId{3}, 10, 3});
  const auto r = run_simulation(c);
  const auto& n3 = r.node(ValidatorId{3});
  const auto& n1 = r.node(ValidatorId{1});
  if (!n3.restarted) problems.push_back("node 3 did not restart");
  if (n3.chain->tip_hash() != n1.chain->tip_hash()) problems.push_back("node 3 not at tip");
  if (store_failures(r)) problems.push_back("store verification failed after restart");
  if (!r.checks.ok()) problems.push_back("run checks failed");

  // A real process kill: a child persists the chain 3 blocks short of the
  // tip and is SIGKILLed; the parent reopens the store and syncs.
  const auto dir = scratch_root() / "killed";
  const Height tip = n1.chain->height();
  const pid_t pid = ::fork();
  if (pid == 0) {
    auto chain = ledger::Blockchain::create(dir, *n1.chain->block_at(0));
    for (Height h = 1; h + 3 <= tip; ++h) chain->append_block(*n1.chain->block_at(h));
    ::raise(SIGKILL);
    ::_exit(0);
  }
  int status = 0;
  ::waitpid(pid, &status, 0);
  if (!WIFSIGNALED(status)) problems.push_back("child was not killed");
  ledger::SyncResult sync;
  try {
    auto reopened = ledger::Blockchain::open(dir);
    if (reopened->height() + 3 != tip) problems.push_back("reopened store is not 3 behind");
    std::vector<const ledger::ChainView*> peers;
    for (const auto& n : r.nodes)
      if (n.id != ValidatorId{3}) peers.push_back(n.chain.get());
    sync = ledger::sync_state(*reopened, peers, c.f + 1);
    if (sync.status != ledger::SyncStatus::Synced || sync.fetched != 3) problems.push_back("sync did not fetch 3");
    if (reopened->tip_hash() != n1.chain->tip_hash()) problems.push_back("laggard not at tip after sync");
  } catch (const std::exception& e) {
    problems.push_back(std::string("reopen failed: ") + e.what());
  }
  const auto rep = ledger::verify_store(dir);
  if (!rep.ok || rep.blocks != tip + 1) problems.push_back("killed store fails verification");

  std::string detail = fmt("matrix stores failing %zu of %zu runs; restart in simulation and SIGKILL'd laggard "
                           "synced %zu blocks to height %llu",
                           m.stores, m.runs, sync.fetched, static_cast<unsigned long long>(tip));
  for (const auto& p : problems) detail += "; " + p;
  return {m.stores == 0 && problems.empty(), detail};
}

}  // namespace

int main() {
  const auto started = std::chrono::steady_clock::now();
  std::printf("acceptance: %u hardware threads\n", std::max(1u, std::thread::hardware_concurrency()));

  // Forking criteria run first, while this process has a single thread.
  report(11, "determinism", criterion_determinism());

  const auto m = run_matrix();
  report(1, "agreement over the adversary matrix",
         {m.disagreements == 0 && m.runs == 7 * kMatrixSizes.size() * kMatrixSeeds && m.checks_failed == 0,
          fmt("%zu runs (7 strategies x n in {3,5,7,9,15} x 50 seeds x 100 rounds), conflicting heights %zu, "
              "failed run checks %zu%s",
              m.runs, m.disagreements, m.checks_failed, first_failures(m).c_str())});
  report(2, "quorum oracle equivalence", criterion_quorum_oracle());
  report(3, "equivocation safety", criterion_equivocation());
  report(4, "no split decisions", {m.splits == 0, fmt("split decisions across the matrix %zu", m.splits)});
  report(5, "termination within delta2",
         {m.overruns == 0 && m.missing == 0 && m.max_round <= m.delta2,
          fmt("max round %.3f ms <= delta2 %.3f ms, overruns %zu, incomplete nodes %zu", m.max_round.count() / 1e6,
              m.delta2.count() / 1e6, m.overruns, m.missing)});
  report(6, "good-round Chernoff bound", criterion_chernoff());
  report(7, "liveness within 4R+8 rounds", criterion_liveness());
  report(8, "proposer fairness", criterion_fairness());
  report(9, "scan economy", criterion_scan_economy());
  report(10, "performance trends", criterion_trends());
  report(12, "store integrity and restart", criterion_recovery(m));

  std::error_code ec;
  std::filesystem::remove_all(scratch_root(), ec);
  std::size_t passed = 0;
  for (const auto& [name, v] : g_results) passed += v.pass;
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  std::printf("acceptance: %zu/%zu criteria passed in %.1f s\n", passed, g_results.size(), secs);
  return passed == g_results.size() ? 0 : 1;
}
