#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <functional>
#include <string>

namespace smchain {

/// 1-based validator index; doubles as the index of the validator's register.
struct ValidatorId {
  std::uint16_t value = 0;

  constexpr ValidatorId() = default;
  constexpr explicit ValidatorId(std::uint16_t v) : value(v) {}
  constexpr auto operator<=>(const ValidatorId&) const = default;
  std::string str() const { return "v" + std::to_string(value); }
};

enum class SlotKind : std::uint8_t { Propose = 0, Commit = 1 };

inline const char* to_string(SlotKind k) { return k == SlotKind::Propose ? "propose" : "commit"; }

using Round = std::uint64_t;
using Height = std::uint64_t;

/// Durations and timestamps are both nanoseconds; timestamps count from the
/// origin of the run's clock.
using Duration = std::chrono::nanoseconds;
using Timestamp = std::chrono::nanoseconds;

constexpr Duration micros(std::int64_t us) { return std::chrono::microseconds(us); }

inline double to_micros(Duration d) { return static_cast<double>(d.count()) / 1000.0; }

}  // namespace smchain

template <>
struct std::hash<smchain::ValidatorId> {
  std::size_t operator()(const smchain::ValidatorId& id) const noexcept { return id.value; }
};
