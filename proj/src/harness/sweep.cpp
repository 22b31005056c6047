#include "smchain/harness/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace smchain::harness {

namespace {

[[noreturn]] void parse_fail(const std::string& msg) { throw ConfigError(ConfigError::Kind::Parse, msg); }

double number(const std::string& s) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    parse_fail("bad sweep value '" + s + "'");
  }
  if (used != s.size()) parse_fail("bad sweep value '" + s + "'");
  return v;
}

std::uint64_t whole(double v, const std::string& name) {
  if (v < 0 || std::floor(v) != v) parse_fail(name + " takes non-negative integers");
  return static_cast<std::uint64_t>(v);
}

}  // namespace

const std::vector<std::string>& sweep_parameter_names() {
  static const std::vector<std::string> names = {
      "n",          "f",           "rounds",         "seed",          "delta_max_us",      "block.max_txs",
      "block.max_bytes", "workload.rate_tps", "workload.initial_backlog", "byzantine_count"};
  return names;
}

SweepParam parse_sweep_param(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) parse_fail("sweep parameter must look like name=start:step:end");
  SweepParam p;
  p.name = text.substr(0, eq);
  const auto& names = sweep_parameter_names();
  if (std::find(names.begin(), names.end(), p.name) == names.end()) parse_fail("unknown sweep parameter '" + p.name + "'");
  const std::string spec = text.substr(eq + 1);
  if (spec.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
    if (parts.size() != 3) parse_fail("range must be start:step:end");
    const double start = number(parts[0]), step = number(parts[1]), end = number(parts[2]);
    if (step <= 0) parse_fail("sweep step must be positive");
    if (end < start) parse_fail("sweep end below start");
    for (std::size_t i = 0;; ++i) {
      const double v = start + static_cast<double>(i) * step;
      if (v > end + 1e-9) break;
      p.values.push_back(v);
    }
  } else {
    std::stringstream ss(spec);
    for (std::string part; std::getline(ss, part, ',');) p.values.push_back(number(part));
  }
  if (p.values.empty()) parse_fail("sweep has no values");
  return p;
}

ScenarioConfig apply_sweep_value(const ScenarioConfig& base, const std::string& name, double value) {
  ScenarioConfig c = base;
  if (name == "n") {
    c.n = whole(value, name);
    c.f = c.n > 0 ? (c.n - 1) / 2 : 0;
    if (c.powers.size() != c.n) c.powers.clear();
    if (!c.transport.hosts.empty() && c.transport.hosts.size() != c.n) c.transport.hosts.clear();
    std::erase_if(c.byzantine_ids, [&](ValidatorId id) { return id.value > c.n; });
    while (c.byzantine_ids.size() > c.f) c.byzantine_ids.pop_back();
  } else if (name == "f") {
    c.f = whole(value, name);
  } else if (name == "rounds") {
    c.rounds = whole(value, name);
  } else if (name == "seed") {
    c.seed = whole(value, name);
  } else if (name == "delta_max_us") {
    c.delta_max = micros(static_cast<std::int64_t>(whole(value, name)));
  } else if (name == "block.max_txs") {
    c.block.max_txs = whole(value, name);
  } else if (name == "block.max_bytes") {
    c.block.max_bytes = whole(value, name);
  } else if (name == "workload.rate_tps") {
    c.workload.rate_tps = value;
  } else if (name == "workload.initial_backlog") {
    c.workload.initial_backlog = whole(value, name);
  } else if (name == "byzantine_count") {
    const auto k = whole(value, name);
    if (k > c.n) throw ConfigError(ConfigError::Kind::Invariant, "byzantine_count above n");
    c.byzantine_random = false;
    c.byzantine_ids.clear();
    for (std::uint64_t i = 0; i < k; ++i) c.byzantine_ids.push_back(ValidatorId{static_cast<std::uint16_t>(c.n - i)});
  } else {
    parse_fail("unknown sweep parameter '" + name + "'");
  }
  validate(c);
  return c;
}

std::vector<SweepPoint> run_sweep(const ScenarioConfig& base, const SweepParam& param, std::size_t seeds) {
  std::vector<SweepPoint> out;
  for (double v : param.values) {
    const ScenarioConfig point = apply_sweep_value(base, param.name, v);
    for (std::size_t s = 0; s < std::max<std::size_t>(seeds, 1); ++s) {
      ScenarioConfig c = point;
      c.seed = point.seed + s;
      c.store.dir.reset();
      auto r = run_simulation(c);
      out.push_back({v, c.seed, std::move(r.metrics), r.checks.ok()});
    }
  }
  return out;
}

std::string sweep_to_csv(const SweepParam& param, const std::vector<SweepPoint>& points) {
  std::string out = param.name + ",seed,decided,accepted,abandoned,mean_latency_us,tps,committed_txs,ok\n";
  char buf[256];
  for (const auto& p : points) {
    std::snprintf(buf, sizeof buf, "%g,%llu,%zu,%zu,%zu,%.3f,%.3f,%zu,%d\n", p.value,
                  static_cast<unsigned long long>(p.seed), p.metrics.decided, p.metrics.accepted,
                  p.metrics.abandoned, p.metrics.mean_decided_latency_us, p.metrics.tps, p.metrics.committed_txs,
                  p.ok ? 1 : 0);
    out += buf;
  }
  return out;
}

}  // namespace smchain::harness
