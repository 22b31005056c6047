#include "smchain/harness/workload.hpp"

#include <algorithm>
#include <cmath>

namespace smchain::harness {

WorkloadGenerator::WorkloadGenerator(const WorkloadConfig& config, const std::vector<crypto::KeyPair>& accounts,
                                     std::uint64_t seed)
    : config_(config), accounts_(accounts), rng_(derive_seed(seed, 0x7a11)), nonces_(accounts.size(), 0) {}

chain::Transaction WorkloadGenerator::next() {
  const auto n = accounts_.size();
  const auto from = rng_.below(n);
  const auto to = (from + 1 + rng_.below(n - 1)) % n;
  const auto amount = 1 + rng_.below(config_.max_amount);
  return chain::make_transfer(accounts_[from], accounts_[to].pk, amount, nonces_[from]++);
}

Duration WorkloadGenerator::next_gap() {
  const double gap_s = -std::log(1.0 - rng_.unit()) / config_.rate_tps;
  return Duration{std::max<std::int64_t>(1, std::llround(gap_s * 1e9))};
}

}  // namespace smchain::harness
