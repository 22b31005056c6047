#include "smchain/harness/estimate.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "smchain/common/rng.hpp"
#include "smchain/consensus/proposer.hpp"

namespace smchain::harness {

GoodRoundEstimate good_round_estimate(const std::vector<std::uint64_t>& powers, const std::set<ValidatorId>& byzantine,
                                      Round horizon, std::size_t trials, std::uint64_t seed, LeaderModel model,
                                      double margin) {
  if (powers.empty()) throw std::invalid_argument("no validators");
  GoodRoundEstimate e;
  e.trials = trials;
  e.horizon = horizon;
  e.margin = margin;
  e.bound = 1.0 - std::exp(-static_cast<double>(horizon) / 16.0);

  const std::uint64_t total = std::accumulate(powers.begin(), powers.end(), std::uint64_t{0});
  std::uint64_t honest_power = 0;
  for (std::size_t i = 0; i < powers.size(); ++i)
    if (!byzantine.contains(ValidatorId{static_cast<std::uint16_t>(i + 1)})) honest_power += powers[i];
  e.honest_fraction = static_cast<double>(honest_power) / static_cast<double>(total);

  Rng rng(derive_seed(seed, 0x600d));
  consensus::ProposerQueue queue(powers);
  double good_sum = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    Round good = 0;
    if (model == LeaderModel::Sampled) {
      for (Round k = 0; k < horizon; ++k) {
        std::uint64_t pick = rng.below(total);
        std::size_t i = 0;
        while (pick >= powers[i]) pick -= powers[i++];
        if (!byzantine.contains(ValidatorId{static_cast<std::uint16_t>(i + 1)})) ++good;
      }
    } else {
      const Round start = 1 + rng.below(total);
      for (Round k = start; k < start + horizon; ++k)
        if (!byzantine.contains(queue.proposer_of(k))) ++good;
    }
    if (4 * good > horizon) ++e.successes;
    if (horizon > 0) good_sum += static_cast<double>(good) / static_cast<double>(horizon);
  }
  if (trials > 0) {
    e.empirical = static_cast<double>(e.successes) / static_cast<double>(trials);
    e.mean_good_fraction = good_sum / static_cast<double>(trials);
  }
  return e;
}

GoodRoundEstimate good_round_estimate(const ScenarioConfig& config, std::size_t trials, LeaderModel model,
                                      double margin) {
  return good_round_estimate(config.effective_powers(), config.byzantine_set(), config.rounds, trials, config.seed,
                             model, margin);
}

}  // namespace smchain::harness
