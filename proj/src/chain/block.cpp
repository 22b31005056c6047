#include "smchain/chain/block.hpp"

namespace smchain::chain {

namespace {

void encode_genesis(ByteWriter& w, const GenesisState& g) {
  w.put_u32(static_cast<std::uint32_t>(g.validators.size()));
  for (const auto& v : g.validators) {
    w.put_bytes(v.id);
    w.put_u64(v.power);
  }
  w.put_u32(static_cast<std::uint32_t>(g.allocations.size()));
  for (const auto& a : g.allocations) {
    w.put_bytes(a.account);
    w.put_u64(a.balance);
  }
}

GenesisState decode_genesis(ByteReader& r) {
  GenesisState g;
  const auto nv = r.get_u32();
  if (nv > r.remaining()) throw DecodeError("validator count exceeds record");
  for (std::uint32_t i = 0; i < nv; ++i) {
    ValidatorEntry v;
    v.id = r.get_array<32>();
    v.power = r.get_u64();
    g.validators.push_back(v);
  }
  const auto na = r.get_u32();
  if (na > r.remaining()) throw DecodeError("allocation count exceeds record");
  for (std::uint32_t i = 0; i < na; ++i) {
    Allocation a;
    a.account = r.get_array<32>();
    a.balance = r.get_u64();
    g.allocations.push_back(a);
  }
  return g;
}

void encode_tx_list(ByteWriter& w, const std::vector<Transaction>& txs) {
  w.put_u32(static_cast<std::uint32_t>(txs.size()));
  for (const auto& tx : txs) {
    ByteWriter inner;
    encode(inner, tx);
    w.put_bytes(inner.bytes());
  }
}

}  // namespace

crypto::Hash32 compute_body_digest(const std::vector<Transaction>& txs) {
  ByteWriter w;
  encode_tx_list(w, txs);
  return crypto::sha256(w.bytes());
}

Bytes encode_block(const Block& b) {
  ByteWriter w;
  w.put_u64(b.height);
  w.put_u64(b.round);
  w.put_bytes(b.prev_hash);
  w.put_bytes(b.proposer);
  w.put_u64(b.timestamp);
  encode_tx_list(w, b.txs);
  w.put_bytes(b.body_digest);
  w.put_bool(b.genesis.has_value());
  if (b.genesis) encode_genesis(w, *b.genesis);
  return w.take();
}

Block decode_block(ByteView bytes) {
  ByteReader r(bytes);
  Block b;
  b.height = r.get_u64();
  b.round = r.get_u64();
  b.prev_hash = r.get_array<32>();
  b.proposer = r.get_array<32>();
  b.timestamp = r.get_u64();
  const auto n = r.get_u32();
  if (n > r.remaining()) throw DecodeError("transaction count exceeds record");
  b.txs.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    ByteReader inner(r.get_bytes_view());
    b.txs.push_back(decode_transaction(inner));
    inner.expect_end();
  }
  b.body_digest = r.get_array<32>();
  if (r.get_bool()) b.genesis = decode_genesis(r);
  r.expect_end();
  return b;
}

std::size_t empty_block_size(const Block& header) {
  Block copy = header;
  copy.txs.clear();
  return encode_block(copy).size();
}

Block make_genesis(GenesisState state) {
  Block b;
  b.height = 0;
  b.round = 0;
  b.body_digest = compute_body_digest(b.txs);
  b.genesis = std::move(state);
  return b;
}

}  // namespace smchain::chain

namespace smchain::crypto {

Hash32 hash_block(const chain::Block& b) { return sha256(chain::encode_block(b)); }

}  // namespace smchain::crypto
