#pragma once

#include <array>
#include <cstdint>
#include <mutex>
#include <string_view>
#include <string>
#include <unordered_map>

#include "smchain/common/bytes.hpp"

namespace smchain::crypto {

using PublicKey = std::array<std::uint8_t, 32>;
using Hash32 = std::array<std::uint8_t, 32>;
using SignatureBytes = std::array<std::uint8_t, 64>;

/// Ed25519 expanded secret key (seed followed by public key).
struct SecretKey {
  std::array<std::uint8_t, 64> bytes{};
};

struct KeyPair {
  SecretKey sk;
  PublicKey pk{};
};

struct Signature {
  SignatureBytes bytes{};
  PublicKey signer{};

  bool operator==(const Signature&) const = default;
};

/// Fresh key pair from the system CSPRNG. Only 128-bit security is offered.
KeyPair keygen(unsigned security_bits = 128);
/// Deterministic key pair from a 32-byte seed.
KeyPair keygen_from_seed(const std::array<std::uint8_t, 32>& seed);
/// Deterministic key pair for simulation identities.
KeyPair keygen_from_label(std::uint64_t run_seed, std::string_view label);

PublicKey derive_public_key(const SecretKey& sk);

/// Deterministic signature: the same key and message always give the same bytes.
Signature sign(const SecretKey& sk, ByteView message);
/// Never throws; malformed or foreign signatures simply fail.
bool verify(const PublicKey& pk, ByteView message, const Signature& sig);

Hash32 sha256(ByteView data);

/// Signature verification with an optional memo of earlier results. verify is
/// a pure function, so memoized answers are identical to recomputed ones; in
/// simulation this lets co-hosted validators skip repeated curve arithmetic.
class Verifier {
 public:
  explicit Verifier(bool memoize = false) : memoize_(memoize) {}

  bool verify(const PublicKey& pk, ByteView message, const Signature& sig);

  std::uint64_t computed() const { return computed_; }
  std::uint64_t memo_hits() const { return hits_; }

 private:
  bool memoize_;
  std::mutex mutex_;
  /// Keyed by the exact bytes of (pk, signature, message).
  std::unordered_map<std::string, bool> memo_;
  std::uint64_t computed_ = 0;
  std::uint64_t hits_ = 0;
};

inline constexpr Hash32 kZeroHash{};

}  // namespace smchain::crypto
