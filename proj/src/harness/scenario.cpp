#include "smchain/harness/scenario.hpp"

#include <algorithm>
#include <fstream>

#include "smchain/common/rng.hpp"

namespace smchain::harness {

using nlohmann::json;

namespace {

const std::vector<std::pair<Strategy, const char*>> kStrategyNames = {
    {Strategy::None, "none"},
    {Strategy::CrashLeader, "crash-leader"},
    {Strategy::EquivocateLeader, "equivocate-leader"},
    {Strategy::SilentVoter, "silent-voter"},
    {Strategy::FalseVoter, "false-voter"},
    {Strategy::DoubleVoter, "double-voter"},
    {Strategy::StaleReplayer, "stale-replayer"},
};

[[noreturn]] void parse_fail(const std::string& msg) { throw ConfigError(ConfigError::Kind::Parse, msg); }
[[noreturn]] void invariant_fail(const std::string& msg) { throw ConfigError(ConfigError::Kind::Invariant, msg); }

void only_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) parse_fail(where + " must be an object");
  for (const auto& [key, _] : j.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
      parse_fail("unknown key '" + key + "' in " + where);
  }
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    parse_fail(std::string("bad value for '") + key + "': " + e.what());
  }
}

void read_us(const json& j, const char* key, Duration& out) {
  if (!j.contains(key)) return;
  std::int64_t us = 0;
  read(j, key, us);
  if (us < 0) parse_fail(std::string(key) + " must be non-negative");
  out = micros(us);
}

void read_us(const json& j, const char* key, std::optional<Duration>& out) {
  if (!j.contains(key)) return;
  Duration d{0};
  read_us(j, key, d);
  out = d;
}

std::int64_t us_of(Duration d) { return std::chrono::duration_cast<std::chrono::microseconds>(d).count(); }

}  // namespace

const char* to_string(Strategy s) {
  for (const auto& [v, name] : kStrategyNames)
    if (v == s) return name;
  return "?";
}

std::optional<Strategy> parse_strategy(const std::string& s) {
  for (const auto& [v, name] : kStrategyNames)
    if (s == name) return v;
  return std::nullopt;
}

const std::vector<Strategy>& all_strategies() {
  static const std::vector<Strategy> all = [] {
    std::vector<Strategy> v;
    for (const auto& [s, _] : kStrategyNames) v.push_back(s);
    return v;
  }();
  return all;
}

std::vector<std::uint64_t> ScenarioConfig::effective_powers() const {
  if (!powers.empty()) return powers;
  return std::vector<std::uint64_t>(n, 1);
}

std::set<ValidatorId> ScenarioConfig::byzantine_set() const {
  if (!byzantine_random) return {byzantine_ids.begin(), byzantine_ids.end()};
  std::vector<std::uint16_t> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = static_cast<std::uint16_t>(i + 1);
  Rng rng(derive_seed(seed, 0xB12));
  for (std::size_t i = n; i > 1; --i) std::swap(ids[i - 1], ids[rng.below(i)]);
  std::set<ValidatorId> out;
  for (std::size_t i = 0; i < std::min(f, n); ++i) out.insert(ValidatorId{ids[i]});
  return out;
}

ScenarioConfig parse_scenario(const json& j) {
  only_keys(j,
            {"name", "n", "f", "allow_nonconforming", "seed", "rounds", "adversary", "byzantine_ids",
             "byzantine_random", "delta_max_us", "delta1_us", "delta2_us", "scan_interval_us", "proposal_guard_us",
             "block", "workload", "transport", "powers", "store", "crash_recover", "trace", "crypto_cache"},
            "scenario");
  ScenarioConfig c;
  read(j, "name", c.name);
  read(j, "n", c.n);
  read(j, "f", c.f);
  read(j, "allow_nonconforming", c.allow_nonconforming);
  read(j, "seed", c.seed);
  read(j, "rounds", c.rounds);
  read(j, "byzantine_random", c.byzantine_random);
  read_us(j, "delta_max_us", c.delta_max);
  read_us(j, "delta1_us", c.delta1);
  read_us(j, "delta2_us", c.delta2);
  read_us(j, "scan_interval_us", c.scan_interval);
  read_us(j, "proposal_guard_us", c.proposal_guard);
  read(j, "powers", c.powers);
  read(j, "trace", c.trace);
  read(j, "crypto_cache", c.crypto_cache);

  if (j.contains("byzantine_ids")) {
    std::vector<std::uint16_t> ids;
    read(j, "byzantine_ids", ids);
    for (auto id : ids) c.byzantine_ids.push_back(ValidatorId{id});
  }

  if (j.contains("adversary")) {
    const json& a = j.at("adversary");
    if (a.is_string()) {
      auto s = parse_strategy(a.get<std::string>());
      if (!s) parse_fail("unknown adversary strategy '" + a.get<std::string>() + "'");
      c.adversary.strategy = *s;
    } else {
      only_keys(a, {"strategy", "crash_probability", "rounds", "swap_delay_min_us", "swap_delay_max_us",
                    "flip_delay_us"},
                "adversary");
      std::string name = "none";
      read(a, "strategy", name);
      auto s = parse_strategy(name);
      if (!s) parse_fail("unknown adversary strategy '" + name + "'");
      c.adversary.strategy = *s;
      read(a, "crash_probability", c.adversary.crash_probability);
      std::vector<Round> rounds;
      read(a, "rounds", rounds);
      c.adversary.rounds = {rounds.begin(), rounds.end()};
      read_us(a, "swap_delay_min_us", c.adversary.swap_delay_min);
      read_us(a, "swap_delay_max_us", c.adversary.swap_delay_max);
      read_us(a, "flip_delay_us", c.adversary.flip_delay);
    }
  }

  if (j.contains("block")) {
    const json& b = j.at("block");
    only_keys(b, {"max_bytes", "max_txs"}, "block");
    read(b, "max_bytes", c.block.max_bytes);
    read(b, "max_txs", c.block.max_txs);
  }

  if (j.contains("workload")) {
    const json& w = j.at("workload");
    only_keys(w, {"accounts", "initial_balance", "rate_tps", "initial_backlog", "max_amount"}, "workload");
    read(w, "accounts", c.workload.accounts);
    read(w, "initial_balance", c.workload.initial_balance);
    read(w, "rate_tps", c.workload.rate_tps);
    read(w, "initial_backlog", c.workload.initial_backlog);
    read(w, "max_amount", c.workload.max_amount);
  }

  if (j.contains("transport")) {
    const json& t = j.at("transport");
    only_keys(t, {"kind", "internal_latency_us", "base_latency_us", "jitter_us", "ns_per_byte", "drop_probability",
                  "hosts", "base_port", "host"},
              "transport");
    std::string kind = "simulated";
    read(t, "kind", kind);
    if (kind == "simulated") {
      c.transport.kind = transport::TransportKind::Simulated;
    } else if (kind == "tcp") {
      c.transport.kind = transport::TransportKind::Tcp;
    } else {
      parse_fail("unknown transport kind '" + kind + "'");
    }
    read_us(t, "internal_latency_us", c.transport.delay.internal_latency);
    read_us(t, "base_latency_us", c.transport.delay.external_latency);
    read_us(t, "jitter_us", c.transport.delay.jitter);
    read(t, "ns_per_byte", c.transport.delay.ns_per_byte);
    read(t, "drop_probability", c.transport.drop_probability);
    read(t, "hosts", c.transport.hosts);
    read(t, "base_port", c.transport.base_port);
    read(t, "host", c.transport.host);
  }

  if (j.contains("store")) {
    const json& s = j.at("store");
    only_keys(s, {"dir", "fsync", "index_interval"}, "store");
    if (s.contains("dir")) {
      std::string dir;
      read(s, "dir", dir);
      c.store.dir = dir;
    }
    read(s, "fsync", c.store.options.fsync);
    read(s, "index_interval", c.store.options.index_interval);
  }

  if (j.contains("crash_recover")) {
    const json& arr = j.at("crash_recover");
    if (!arr.is_array()) parse_fail("crash_recover must be an array");
    for (const auto& e : arr) {
      only_keys(e, {"node", "at_round", "rounds"}, "crash_recover entry");
      CrashRecover cr;
      std::uint16_t node = 0;
      read(e, "node", node);
      cr.node = ValidatorId{node};
      read(e, "at_round", cr.at_round);
      read(e, "rounds", cr.rounds);
      c.crash_recover.push_back(cr);
    }
  }

  validate(c);
  return c;
}

void validate(const ScenarioConfig& c) {
  if (c.n == 0) invariant_fail("n must be at least 1");
  if (c.n > 1000) invariant_fail("n above 1000 is not supported");
  if (c.rounds == 0) invariant_fail("rounds must be at least 1");
  if (!c.allow_nonconforming && c.n != 2 * c.f + 1)
    invariant_fail("n must equal 2f+1 (n=" + std::to_string(c.n) + ", f=" + std::to_string(c.f) +
                   "); set allow_nonconforming to override");
  for (auto id : c.byzantine_ids)
    if (id.value < 1 || id.value > c.n) invariant_fail("byzantine id " + id.str() + " outside 1..n");
  if (std::set<ValidatorId>(c.byzantine_ids.begin(), c.byzantine_ids.end()).size() != c.byzantine_ids.size())
    invariant_fail("byzantine_ids has duplicates");
  if (!c.allow_nonconforming && c.byzantine_ids.size() > c.f)
    invariant_fail("more byzantine ids than f");
  if (c.byzantine_random && !c.byzantine_ids.empty())
    invariant_fail("byzantine_random and byzantine_ids are exclusive");
  if (c.delta_max.count() <= 0) invariant_fail("delta_max must be positive");
  const auto d1 = c.effective_delta1();
  const auto d2 = c.effective_delta2();
  if (d1 >= d2) invariant_fail("delta1 must be below delta2");
  if (!c.allow_nonconforming && (d1 < 2 * c.delta_max || d2 < 2 * c.delta_max))
    invariant_fail("delta1 and delta2 must be at least 2 delta_max");
  if (c.effective_scan_interval().count() <= 0) invariant_fail("scan interval must be positive");
  if (!c.powers.empty()) {
    if (c.powers.size() != c.n) invariant_fail("powers must list one value per validator");
    for (auto p : c.powers)
      if (p == 0) invariant_fail("voting powers must be positive");
  }
  if (c.block.max_txs == 0 || c.block.max_bytes == 0) invariant_fail("block limits must be positive");
  if (c.workload.accounts < 2 && (c.workload.rate_tps > 0 || c.workload.initial_backlog > 0))
    invariant_fail("a transfer workload needs at least two accounts");
  if (c.workload.rate_tps < 0) invariant_fail("rate_tps must be non-negative");
  if (c.workload.max_amount == 0) invariant_fail("max_amount must be positive");
  if (c.adversary.crash_probability < 0 || c.adversary.crash_probability > 1)
    invariant_fail("crash_probability must be in [0, 1]");
  if (c.adversary.swap_delay_min > c.adversary.swap_delay_max)
    invariant_fail("swap_delay_min above swap_delay_max");
  if (c.transport.drop_probability < 0 || c.transport.drop_probability > 1)
    invariant_fail("drop_probability must be in [0, 1]");
  if (!c.transport.hosts.empty() && c.transport.hosts.size() != c.n)
    invariant_fail("hosts must list one host per validator");
  if (c.store.options.index_interval == 0) invariant_fail("index_interval must be positive");
  for (const auto& cr : c.crash_recover) {
    if (cr.node.value < 1 || cr.node.value > c.n) invariant_fail("crash_recover node outside 1..n");
    if (cr.at_round < 1 || cr.rounds < 1) invariant_fail("crash_recover needs at_round >= 1 and rounds >= 1");
    if (c.byzantine_set().contains(cr.node)) invariant_fail("crash_recover applies to honest nodes only");
  }
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) parse_fail("cannot open scenario file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    parse_fail(path.string() + ": " + e.what());
  }
  return parse_scenario(j);
}

json to_json(const ScenarioConfig& c) {
  json byz = json::array();
  for (auto id : c.byzantine_set()) byz.push_back(id.value);
  json adv = {{"strategy", to_string(c.adversary.strategy)},
              {"crash_probability", c.adversary.crash_probability},
              {"rounds", std::vector<Round>(c.adversary.rounds.begin(), c.adversary.rounds.end())},
              {"swap_delay_min_us", us_of(c.adversary.swap_delay_min)},
              {"swap_delay_max_us", us_of(c.adversary.swap_delay_max)},
              {"flip_delay_us", us_of(c.adversary.flip_delay)}};
  json j = {{"name", c.name},
            {"n", c.n},
            {"f", c.f},
            {"seed", c.seed},
            {"rounds", c.rounds},
            {"adversary", adv},
            {"byzantine_ids", byz},
            {"delta_max_us", us_of(c.delta_max)},
            {"delta1_us", us_of(c.effective_delta1())},
            {"delta2_us", us_of(c.effective_delta2())},
            {"scan_interval_us", us_of(c.effective_scan_interval())},
            {"proposal_guard_us", us_of(c.effective_guard())},
            {"block", {{"max_bytes", c.block.max_bytes}, {"max_txs", c.block.max_txs}}},
            {"workload",
             {{"accounts", c.workload.accounts},
              {"initial_balance", c.workload.initial_balance},
              {"rate_tps", c.workload.rate_tps},
              {"initial_backlog", c.workload.initial_backlog},
              {"max_amount", c.workload.max_amount}}},
            {"transport",
             {{"kind", c.transport.kind == transport::TransportKind::Tcp ? "tcp" : "simulated"},
              {"internal_latency_us", us_of(c.transport.delay.internal_latency)},
              {"base_latency_us", us_of(c.transport.delay.external_latency)},
              {"jitter_us", us_of(c.transport.delay.jitter)},
              {"ns_per_byte", c.transport.delay.ns_per_byte},
              {"drop_probability", c.transport.drop_probability}}},
            {"powers", c.effective_powers()}};
  if (c.allow_nonconforming) j["allow_nonconforming"] = true;
  return j;
}

}  // namespace smchain::harness
