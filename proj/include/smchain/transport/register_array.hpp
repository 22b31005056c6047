#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "smchain/common/bytes.hpp"
#include "smchain/common/types.hpp"

namespace smchain::transport {

/// Immutable content of one register write.
struct RegisterSnapshot {
  Round round = 0;
  SlotKind slot = SlotKind::Commit;
  Bytes payload;
  std::uint64_t version = 0;
};

/// The N-entry shared memory. Entry i has one PROPOSE-slot and one
/// COMMIT-slot, both writable only by validator i. Writes replace the whole
/// snapshot under a per-register lock, so readers never observe a torn value.
class RegisterArray {
 public:
  explicit RegisterArray(std::size_t n);

  std::size_t size() const { return cells_.size() / 2; }
  bool contains(ValidatorId id) const { return id.value >= 1 && id.value <= size(); }

  /// Throws TransportError(PolicyViolation) unless owner == index.
  std::uint64_t write(ValidatorId owner, ValidatorId index, SlotKind slot, Bytes payload, Round round);

  /// nullptr until the first write.
  std::shared_ptr<const RegisterSnapshot> read(ValidatorId index, SlotKind slot) const;

 private:
  struct Cell {
    mutable std::mutex mutex;
    std::shared_ptr<const RegisterSnapshot> current;
    std::uint64_t version = 0;
  };

  Cell& cell(ValidatorId index, SlotKind slot) const;

  std::vector<std::unique_ptr<Cell>> cells_;
};

}  // namespace smchain::transport
