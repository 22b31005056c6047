#include "smchain/consensus/proposer.hpp"

namespace smchain::consensus {

ProposerQueue::ProposerQueue(std::vector<std::uint64_t> powers) : powers_(std::move(powers)) {
  if (powers_.empty()) throw EmptyQueue("proposer queue needs at least one validator");
  for (auto p : powers_) {
    if (p == 0) throw EmptyQueue("voting powers must be positive");
    total_ += p;
  }
  acc_.assign(powers_.size(), 0);
}

void ProposerQueue::step() {
  std::size_t best = 0;
  for (std::size_t i = 0; i < powers_.size(); ++i) {
    acc_[i] += static_cast<std::int64_t>(powers_[i]);
    if (acc_[i] > acc_[best]) best = i;
  }
  acc_[best] -= static_cast<std::int64_t>(total_);
  schedule_.push_back(ValidatorId{static_cast<std::uint16_t>(best + 1)});
}

ValidatorId ProposerQueue::proposer_of(Round k) {
  if (k == 0) throw std::invalid_argument("rounds start at 1");
  while (schedule_.size() < k) step();
  return schedule_[k - 1];
}

}  // namespace smchain::consensus
