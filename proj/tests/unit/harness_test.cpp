#include <doctest.h>

#include <cmath>

#include "smchain/harness/estimate.hpp"
#include "smchain/harness/simulation.hpp"
#include "smchain/harness/sweep.hpp"
#include "smchain/harness/workload.hpp"

using namespace smchain;
using namespace smchain::harness;
using nlohmann::json;

namespace {

ConfigError::Kind parse_kind(const json& j) {
  try {
    parse_scenario(j);
  } catch (const ConfigError& e) {
    return e.kind();
  }
  FAIL("expected a ConfigError");
  return ConfigError::Kind::Parse;
}

/// P(Bin(t, p) > t/4), summed in log space.
double binomial_tail(Round t, double p) {
  double total = 0;
  for (Round x = 0; x <= t; ++x) {
    if (4 * x <= t) continue;
    const double lc = std::lgamma(t + 1.0) - std::lgamma(x + 1.0) - std::lgamma(t - x + 1.0);
    total += std::exp(lc + x * std::log(p) + (t - x) * std::log1p(-p));
  }
  return total;
}

ScenarioConfig small(std::size_t n, Round rounds, std::uint64_t seed = 1) {
  ScenarioConfig c;
  c.n = n;
  c.f = (n - 1) / 2;
  c.rounds = rounds;
  c.seed = seed;
  c.workload.rate_tps = 2000;
  c.workload.initial_backlog = 50;
  return c;
}

}  // namespace

TEST_CASE("scenario parsing: valid input, invariants and unknown names") {
  auto c = parse_scenario(json{{"n", 3}, {"f", 1}});
  CHECK(c.n == 3);
  CHECK(c.effective_delta1() == 4 * c.delta_max);
  CHECK(c.effective_delta2() == 12 * c.delta_max);
  CHECK(parse_kind(json{{"n", 4}, {"f", 2}}) == ConfigError::Kind::Invariant);
  CHECK(parse_kind(json{{"n", 5}, {"f", 1}}) == ConfigError::Kind::Invariant);
  CHECK(parse_kind(json{{"n", 3}, {"f", 1}, {"adversary", {{"strategy", "gremlin"}}}}) == ConfigError::Kind::Parse);
  CHECK(parse_kind(json{{"n", 3}, {"f", 1}, {"colour", "red"}}) == ConfigError::Kind::Parse);
  CHECK(parse_kind(json{{"n", "three"}}) == ConfigError::Kind::Parse);
  CHECK(parse_kind(json{{"n", 3}, {"f", 1}, {"byzantine_ids", {1, 2}}}) == ConfigError::Kind::Invariant);
  CHECK(parse_kind(json{{"n", 3}, {"f", 1}, {"powers", {1, 1}}}) == ConfigError::Kind::Invariant);
  CHECK(parse_kind(json{{"n", 3}, {"f", 1}, {"powers", {1, 0, 1}}}) == ConfigError::Kind::Invariant);

  auto nc = parse_scenario(json{{"n", 16}, {"f", 7}, {"allow_nonconforming", true}});
  CHECK(nc.n == 16);
  for (auto s : all_strategies()) CHECK(parse_strategy(to_string(s)) == s);
}

TEST_CASE("scenario JSON round trips") {
  auto c = small(5, 20, 9);
  c.adversary.strategy = Strategy::EquivocateLeader;
  c.byzantine_ids = {ValidatorId{2}};
  c.powers = {1, 2, 1, 1, 1};
  auto back = parse_scenario(to_json(c));
  CHECK(to_json(back) == to_json(c));
}

TEST_CASE("workload is reproducible and only builds valid transfers") {
  auto c = small(3, 1);
  auto ids = derive_identities(c);
  WorkloadGenerator a(c.workload, ids.accounts, 5), b(c.workload, ids.accounts, 5);
  for (int i = 0; i < 200; ++i) {
    auto x = a.next(), y = b.next();
    CHECK(x.tx_id == y.tx_id);
    CHECK(x.sender != x.recipient);
    CHECK(x.amount >= 1);
    CHECK(x.amount <= c.workload.max_amount);
    CHECK(chain::signature_valid(x));
    CHECK(a.next_gap() == b.next_gap());
  }
}

TEST_CASE("honest run at N=5 decides every round with clean checks") {
  auto r = run_simulation(small(5, 100));
  CHECK(r.metrics.rows.size() == 100);
  CHECK(r.metrics.decided == 100);
  CHECK(r.metrics.accepted == 100);
  CHECK(r.metrics.decided + r.metrics.abandoned == 100);
  CHECK(r.checks.ok());
  CHECK(r.checks.min_scan_reads == 5);
  CHECK(r.checks.max_scan_reads == 5);
  CHECK(r.metrics.committed_txs > 50);
  const auto csv = to_csv(r.metrics);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 101);
  CHECK(csv.rfind("round,outcome,leader,latency_us,votes_true,votes_false,txs_committed\n", 0) == 0);
}

TEST_CASE("crashed leaders abandon exactly the rounds they lead") {
  auto c = small(5, 60, 3);
  c.adversary.strategy = Strategy::CrashLeader;
  c.byzantine_ids = {ValidatorId{2}, ValidatorId{4}};
  auto r = run_simulation(c);
  std::size_t byz_led = 0;
  for (const auto& row : r.metrics.rows) {
    CHECK(row.leader_byzantine == (row.outcome == consensus::Outcome::Abandoned));
    byz_led += row.leader_byzantine;
  }
  CHECK(byz_led == 24);
  CHECK(r.metrics.abandoned == byz_led);
  CHECK(r.checks.ok());
}

TEST_CASE("same config gives byte-identical output") {
  auto c = small(7, 40, 11);
  c.adversary.strategy = Strategy::DoubleVoter;
  c.byzantine_random = true;
  auto a = run_simulation(c), b = run_simulation(c);
  CHECK(to_csv(a.metrics) == to_csv(b.metrics));
  CHECK(summary_json(a.metrics, a.checks, to_json(c)) == summary_json(b.metrics, b.checks, to_json(c)));
  c.seed = 12;
  CHECK(to_csv(run_simulation(c).metrics) != to_csv(a.metrics));
}

TEST_CASE("good-round estimate agrees with the binomial tail") {
  // N=3 with one Byzantine validator: honest share 2/3.
  const std::vector<std::uint64_t> powers{1, 1, 1};
  const std::set<ValidatorId> byz{ValidatorId{3}};
  for (Round t : {Round{8}, Round{16}, Round{64}}) {
    auto e = good_round_estimate(powers, byz, t, 4000, 21);
    const double p = binomial_tail(t, 2.0 / 3.0);
    const double sigma = std::sqrt(p * (1 - p) / 4000.0);
    CHECK(std::abs(e.empirical - p) <= 4 * sigma + 1e-9);
    CHECK(e.bound == doctest::Approx(1 - std::exp(-static_cast<double>(t) / 16)));
    CHECK(e.mean_good_fraction == doctest::Approx(2.0 / 3.0).epsilon(0.02));
  }
  auto all = good_round_estimate(powers, {}, 64, 100, 1);
  CHECK(all.empirical == 1.0);
  CHECK(all.passed());
  auto t16 = good_round_estimate(powers, byz, 16, 10, 1);
  CHECK(t16.bound == doctest::Approx(0.632).epsilon(0.001));
  auto sched = good_round_estimate(powers, byz, 64, 500, 3, LeaderModel::Schedule);
  CHECK(sched.empirical == 1.0);
}

TEST_CASE("sweep parameters") {
  auto p = parse_sweep_param("n=5:2:15");
  CHECK(p.name == "n");
  CHECK(p.values == std::vector<double>{5, 7, 9, 11, 13, 15});
  CHECK(parse_sweep_param("delta_max_us=1000,2000").values == std::vector<double>{1000, 2000});
  CHECK_THROWS_AS(parse_sweep_param("warp=1:1:2"), ConfigError);
  CHECK_THROWS_AS(parse_sweep_param("n=5:0:9"), ConfigError);
  CHECK_THROWS_AS(parse_sweep_param("n"), ConfigError);
  auto c = apply_sweep_value(small(3, 5), "n", 9);
  CHECK(c.n == 9);
  CHECK(c.f == 4);
  auto pts = run_sweep(small(3, 6), parse_sweep_param("n=3:2:5"), 2);
  CHECK(pts.size() == 4);
  for (const auto& pt : pts) CHECK(pt.ok);
  const auto csv = sweep_to_csv(parse_sweep_param("n=3:2:5"), pts);
  CHECK(csv.rfind("n,seed,decided,accepted,abandoned,mean_latency_us,tps,committed_txs,ok\n", 0) == 0);
}

TEST_CASE("the signature memo does not change results") {
  auto c = small(5, 30, 4);
  c.adversary.strategy = Strategy::EquivocateLeader;
  c.byzantine_random = true;
  const auto with = to_csv(run_simulation(c).metrics);
  c.crypto_cache = false;
  CHECK(to_csv(run_simulation(c).metrics) == with);
}
