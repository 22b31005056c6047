#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "smchain/common/types.hpp"

namespace smchain::consensus {

class EmptyQueue : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Weighted round-robin leader schedule. Each step adds every validator's
/// power to its accumulator, picks the largest accumulator (lowest id on
/// ties) and charges the winner the total power.
class ProposerQueue {
 public:
  /// powers[i] belongs to validator i+1; every power must be positive.
  explicit ProposerQueue(std::vector<std::uint64_t> powers);

  /// Leader of round k (k >= 1). Deterministic in (powers, k).
  ValidatorId proposer_of(Round k);

  std::size_t size() const { return powers_.size(); }
  std::uint64_t total_power() const { return total_; }
  const std::vector<std::uint64_t>& powers() const { return powers_; }

 private:
  void step();

  std::vector<std::uint64_t> powers_;
  std::vector<std::int64_t> acc_;
  std::uint64_t total_ = 0;
  std::vector<ValidatorId> schedule_;
};

}  // namespace smchain::consensus
