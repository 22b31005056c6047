#pragma once

#include <vector>

#include "smchain/chain/transaction.hpp"
#include "smchain/common/rng.hpp"
#include "smchain/harness/scenario.hpp"

namespace smchain::harness {

/// Seeded transfer stream: random sender and recipient, amount in
/// [1, max_amount], per-sender nonces, exponential inter-arrival gaps.
class WorkloadGenerator {
 public:
  WorkloadGenerator(const WorkloadConfig& config, const std::vector<crypto::KeyPair>& accounts, std::uint64_t seed);

  chain::Transaction next();
  /// Gap before the next arrival; only meaningful when rate_tps > 0.
  Duration next_gap();

 private:
  const WorkloadConfig& config_;
  const std::vector<crypto::KeyPair>& accounts_;
  Rng rng_;
  std::vector<std::uint64_t> nonces_;
};

}  // namespace smchain::harness
