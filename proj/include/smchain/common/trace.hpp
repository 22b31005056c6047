#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "smchain/common/types.hpp"

namespace smchain {

/// One entry of a run's ordered event log.
struct TraceEvent {
  Timestamp at{0};
  std::string kind;  // write | read | timeout | decide | abandon | crash | recover
  std::uint16_t node = 0;
  std::uint16_t target = 0;
  Round round = 0;
  std::string detail;
};

using TraceSink = std::function<void(const TraceEvent&)>;

}  // namespace smchain
