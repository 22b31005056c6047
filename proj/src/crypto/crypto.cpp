#include "smchain/crypto/crypto.hpp"

#include <sodium.h>

#include <cstring>
#include <stdexcept>

namespace smchain::crypto {

namespace {

void ensure_init() {
  static const bool ok = [] { return sodium_init() >= 0; }();
  if (!ok) throw std::runtime_error("libsodium initialisation failed");
}

}  // namespace

KeyPair keygen(unsigned security_bits) {
  if (security_bits != 128) throw std::invalid_argument("only 128-bit security is supported");
  ensure_init();
  KeyPair kp;
  crypto_sign_keypair(kp.pk.data(), kp.sk.bytes.data());
  return kp;
}

KeyPair keygen_from_seed(const std::array<std::uint8_t, 32>& seed) {
  ensure_init();
  KeyPair kp;
  crypto_sign_seed_keypair(kp.pk.data(), kp.sk.bytes.data(), seed.data());
  return kp;
}

KeyPair keygen_from_label(std::uint64_t run_seed, std::string_view label) {
  ByteWriter w;
  w.put_raw(as_view(std::string("smchain-key")));
  w.put_u64(run_seed);
  w.put_raw(ByteView{reinterpret_cast<const std::uint8_t*>(label.data()), label.size()});
  return keygen_from_seed(sha256(w.bytes()));
}

PublicKey derive_public_key(const SecretKey& sk) {
  ensure_init();
  PublicKey pk{};
  crypto_sign_ed25519_sk_to_pk(pk.data(), sk.bytes.data());
  return pk;
}

Signature sign(const SecretKey& sk, ByteView message) {
  ensure_init();
  Signature sig;
  crypto_sign_detached(sig.bytes.data(), nullptr, message.data(), message.size(), sk.bytes.data());
  sig.signer = derive_public_key(sk);
  return sig;
}

bool verify(const PublicKey& pk, ByteView message, const Signature& sig) {
  ensure_init();
  if (sig.signer != pk) return false;
  return crypto_sign_verify_detached(sig.bytes.data(), message.data(), message.size(), pk.data()) == 0;
}

Hash32 sha256(ByteView data) {
  ensure_init();
  Hash32 out{};
  crypto_hash_sha256(out.data(), data.data(), data.size());
  return out;
}

bool Verifier::verify(const PublicKey& pk, ByteView message, const Signature& sig) {
  if (!memoize_) {
    ++computed_;
    return crypto::verify(pk, message, sig);
  }
  std::string key;
  key.reserve(pk.size() + sig.bytes.size() + sig.signer.size() + message.size());
  key.append(reinterpret_cast<const char*>(pk.data()), pk.size());
  key.append(reinterpret_cast<const char*>(sig.bytes.data()), sig.bytes.size());
  key.append(reinterpret_cast<const char*>(sig.signer.data()), sig.signer.size());
  key.append(reinterpret_cast<const char*>(message.data()), message.size());

  std::lock_guard lock(mutex_);
  if (auto it = memo_.find(key); it != memo_.end()) {
    ++hits_;
    return it->second;
  }
  ++computed_;
  const bool ok = crypto::verify(pk, message, sig);
  memo_.emplace(std::move(key), ok);
  return ok;
}

}  // namespace smchain::crypto
