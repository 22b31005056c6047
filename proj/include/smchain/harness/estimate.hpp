#pragma once

#include <cstdint>
#include <set>
#include <vector>

#include "smchain/harness/scenario.hpp"

namespace smchain::harness {

enum class LeaderModel {
  /// Each round's leader is drawn independently, weighted by power.
  Sampled,
  /// Weighted round-robin schedule from a uniformly random start round.
  Schedule,
};

struct GoodRoundEstimate {
  std::size_t trials = 0;
  Round horizon = 0;
  double honest_fraction = 0.0;
  /// Trials with more than horizon/4 honest-led rounds.
  std::size_t successes = 0;
  double empirical = 0.0;
  /// 1 - exp(-horizon/16).
  double bound = 0.0;
  double margin = 0.0;
  /// Mean share of honest-led rounds.
  double mean_good_fraction = 0.0;

  bool passed() const { return empirical >= bound - margin; }
};

GoodRoundEstimate good_round_estimate(const std::vector<std::uint64_t>& powers, const std::set<ValidatorId>& byzantine,
                                      Round horizon, std::size_t trials, std::uint64_t seed,
                                      LeaderModel model = LeaderModel::Sampled, double margin = 0.01);

/// Uses the scenario's powers, Byzantine set, rounds and seed.
GoodRoundEstimate good_round_estimate(const ScenarioConfig& config, std::size_t trials,
                                      LeaderModel model = LeaderModel::Sampled, double margin = 0.01);

}  // namespace smchain::harness
