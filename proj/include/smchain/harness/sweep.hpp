#pragma once

#include <string>
#include <vector>

#include "smchain/harness/simulation.hpp"

namespace smchain::harness {

/// "name=start:step:end" (inclusive) or "name=v1,v2,...".
struct SweepParam {
  std::string name;
  std::vector<double> values;
};

/// Throws ConfigError on malformed input or an unknown parameter name.
SweepParam parse_sweep_param(const std::string& text);
const std::vector<std::string>& sweep_parameter_names();

/// Copy of base with one parameter set. Setting n also sets f = (n-1)/2.
ScenarioConfig apply_sweep_value(const ScenarioConfig& base, const std::string& name, double value);

struct SweepPoint {
  double value = 0;
  std::uint64_t seed = 0;
  RunMetrics metrics;
  bool ok = false;
};

/// One simulation per (value, seed), seeds base.seed .. base.seed+seeds-1.
std::vector<SweepPoint> run_sweep(const ScenarioConfig& base, const SweepParam& param, std::size_t seeds = 1);
std::string sweep_to_csv(const SweepParam& param, const std::vector<SweepPoint>& points);

}  // namespace smchain::harness
