#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "smchain/common/bytes.hpp"
#include "smchain/common/task.hpp"
#include "smchain/common/types.hpp"
#include "smchain/transport/register_array.hpp"

namespace smchain::transport {

enum class TransportErrorCode { UnknownId, TransportUnreachable, PolicyViolation, DisconnectedChannel };

const char* to_string(TransportErrorCode c);

class TransportError : public std::runtime_error {
 public:
  TransportError(TransportErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  TransportErrorCode code() const { return code_; }

 private:
  TransportErrorCode code_;
};

enum class ChannelKind { Internal, External };
enum class TransportKind { Simulated, Tcp };

/// A (local, remote, slot) channel. Copies share connection state, so a
/// disconnect through any copy is visible to all of them.
class ChannelHandle {
 public:
  ChannelHandle() = default;

  ValidatorId local_id() const { return local_; }
  ValidatorId remote_id() const { return remote_; }
  SlotKind slot() const { return slot_; }
  ChannelKind kind() const { return kind_; }
  TransportKind transport() const { return transport_; }
  bool connected() const;
  bool valid() const { return state_ != nullptr; }

 private:
  friend class ChannelManager;
  struct State {
    mutable std::mutex mutex;
    bool connected = true;
  };

  ValidatorId local_;
  ValidatorId remote_;
  SlotKind slot_ = SlotKind::Commit;
  ChannelKind kind_ = ChannelKind::External;
  TransportKind transport_ = TransportKind::Simulated;
  std::shared_ptr<State> state_;
};

/// Tracks every channel a transport has opened.
class ChannelManager {
 public:
  ChannelHandle open(ValidatorId local, ValidatorId remote, SlotKind slot, ChannelKind kind,
                     TransportKind transport);
  void close(const ChannelHandle& h);
  std::size_t connected_count() const;
  std::string describe() const;

 private:
  using Key = std::tuple<std::uint16_t, std::uint16_t, std::uint8_t>;
  mutable std::mutex mutex_;
  std::map<Key, ChannelHandle> channels_;
};

enum class ReadStatus { Fresh, NoFreshData, Timeout };

const char* to_string(ReadStatus s);

struct ReadResult {
  ReadStatus status = ReadStatus::NoFreshData;
  RegisterSnapshot snapshot;
  Duration elapsed{0};
};

struct ReadRequest {
  ChannelHandle handle;
  ValidatorId reader;
  ValidatorId index;
  Round min_round = 0;
};

/// Remote register access. Writes are owner-only and local; reads may cross
/// the network and are awaited.
class Transport {
 public:
  virtual ~Transport() = default;

  virtual TransportKind kind() const = 0;
  virtual std::size_t size() const = 0;

  /// Repeated calls return the existing handle for (local, remote, slot).
  virtual ChannelHandle connect(ValidatorId local, ValidatorId remote, SlotKind slot) = 0;

  /// Replaces the register snapshot; returns the new version.
  virtual std::uint64_t raw_write(const ChannelHandle& h, ValidatorId owner, ValidatorId index,
                                  Bytes payload, Round round) = 0;

  /// Latest snapshot, or NoFreshData when the register is empty or older
  /// than min_round, or Timeout when the response takes longer than timeout.
  virtual Task<ReadResult> raw_read(const ChannelHandle& h, ValidatorId reader, ValidatorId index,
                                    Duration timeout, Round min_round = 0) = 0;

  /// Issues the reads together; results come back in request order.
  virtual Task<std::vector<ReadResult>> raw_read_batch(std::vector<ReadRequest> requests,
                                                       Duration timeout);

  void disconnect(const ChannelHandle& h) { channels_.close(h); }
  const ChannelManager& channels() const { return channels_; }

 protected:
  void check_connected(const ChannelHandle& h) const;
  void check_write(const ChannelHandle& h, ValidatorId owner, ValidatorId index) const;
  void check_read(const ChannelHandle& h, ValidatorId reader, ValidatorId index) const;

  ChannelManager channels_;
};

}  // namespace smchain::transport
