#include "smchain/transport/register_array.hpp"

#include "smchain/transport/transport.hpp"

namespace smchain::transport {

RegisterArray::RegisterArray(std::size_t n) {
  cells_.reserve(2 * n);
  for (std::size_t i = 0; i < 2 * n; ++i) cells_.push_back(std::make_unique<Cell>());
}

RegisterArray::Cell& RegisterArray::cell(ValidatorId index, SlotKind slot) const {
  if (!contains(index)) throw TransportError(TransportErrorCode::UnknownId, index.str());
  return *cells_[2 * (index.value - 1) + static_cast<std::size_t>(slot)];
}

std::uint64_t RegisterArray::write(ValidatorId owner, ValidatorId index, SlotKind slot, Bytes payload,
                                   Round round) {
  if (!contains(owner)) throw TransportError(TransportErrorCode::UnknownId, owner.str());
  Cell& c = cell(index, slot);
  if (owner != index) {
    throw TransportError(TransportErrorCode::PolicyViolation,
                         owner.str() + " may not write register " + index.str());
  }
  std::lock_guard lock(c.mutex);
  auto snap = std::make_shared<RegisterSnapshot>();
  snap->round = round;
  snap->slot = slot;
  snap->payload = std::move(payload);
  snap->version = ++c.version;
  c.current = std::move(snap);
  return c.version;
}

std::shared_ptr<const RegisterSnapshot> RegisterArray::read(ValidatorId index, SlotKind slot) const {
  Cell& c = cell(index, slot);
  std::lock_guard lock(c.mutex);
  return c.current;
}

}  // namespace smchain::transport
