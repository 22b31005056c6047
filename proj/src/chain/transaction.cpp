#include "smchain/chain/transaction.hpp"

namespace smchain::chain {

namespace {
constexpr std::string_view kTxDomain = "smchain/tx/v1";
}

Bytes Transaction::signing_bytes() const {
  ByteWriter w;
  w.put_raw(ByteView{reinterpret_cast<const std::uint8_t*>(kTxDomain.data()), kTxDomain.size()});
  w.put_bytes(sender);
  w.put_bytes(recipient);
  w.put_u64(amount);
  w.put_u64(nonce);
  return w.take();
}

TxId Transaction::compute_id() const { return crypto::sha256(signing_bytes()); }

Transaction make_transfer(const crypto::KeyPair& from, const AccountId& to, std::uint64_t amount,
                          std::uint64_t nonce) {
  Transaction tx;
  tx.sender = from.pk;
  tx.recipient = to;
  tx.amount = amount;
  tx.nonce = nonce;
  tx.tx_id = tx.compute_id();
  tx.sig = crypto::sign(from.sk, tx.signing_bytes());
  return tx;
}

bool signature_valid(const Transaction& tx, crypto::Verifier* verifier) {
  const Bytes msg = tx.signing_bytes();
  return verifier ? verifier->verify(tx.sender, msg, tx.sig) : crypto::verify(tx.sender, msg, tx.sig);
}

void encode(ByteWriter& w, const Transaction& tx) {
  w.put_bytes(tx.sender);
  w.put_bytes(tx.recipient);
  w.put_u64(tx.amount);
  w.put_u64(tx.nonce);
  w.put_bytes(tx.sig.bytes);
  w.put_bytes(tx.sig.signer);
}

Transaction decode_transaction(ByteReader& r) {
  Transaction tx;
  tx.sender = r.get_array<32>();
  tx.recipient = r.get_array<32>();
  tx.amount = r.get_u64();
  tx.nonce = r.get_u64();
  tx.sig.bytes = r.get_array<64>();
  tx.sig.signer = r.get_array<32>();
  tx.tx_id = tx.compute_id();
  return tx;
}

std::size_t encoded_size(const Transaction&) {
  // Four length-prefixed keys/signature plus two u64 fields, wrapped in the
  // block's per-transaction length prefix.
  return 4 + (4 + 32) + (4 + 32) + 8 + 8 + (4 + 64) + (4 + 32);
}

}  // namespace smchain::chain
