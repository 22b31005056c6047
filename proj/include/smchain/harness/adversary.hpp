#pragma once

#include <memory>

#include "smchain/consensus/node.hpp"
#include "smchain/harness/scenario.hpp"

namespace smchain::harness {

/// Behaviour for one Byzantine validator under the configured strategy;
/// nullptr for Strategy::None. seed drives the strategy's own choices.
std::unique_ptr<consensus::Behavior> make_behavior(const AdversaryConfig& config, std::uint64_t seed);

/// Casts a fixed vote (or none) every round; used to drive exhaustive vote
/// assignments through real nodes.
class ScriptedVote final : public consensus::Behavior {
 public:
  explicit ScriptedVote(std::optional<bool> vote) : vote_(vote) {}
  std::optional<bool> choose_vote(consensus::SmcaNode&, Round, const chain::BlockHash&, bool) override {
    return vote_;
  }

 private:
  std::optional<bool> vote_;
};

}  // namespace smchain::harness
