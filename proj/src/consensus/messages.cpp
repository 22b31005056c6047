#include "smchain/consensus/messages.hpp"

namespace smchain::consensus {

namespace {

constexpr std::string_view kProposeTag = "PROPOSE";
constexpr std::string_view kCommitTag = "COMMIT";

void put_tag(ByteWriter& w, std::string_view tag) {
  w.put_raw(ByteView{reinterpret_cast<const std::uint8_t*>(tag.data()), tag.size()});
}

void put_sig(ByteWriter& w, const crypto::Signature& s) {
  w.put_bytes(s.bytes);
  w.put_bytes(s.signer);
}

crypto::Signature get_sig(ByteReader& r) {
  crypto::Signature s;
  s.bytes = r.get_array<64>();
  s.signer = r.get_array<32>();
  return s;
}

}  // namespace

Bytes ProposalMessage::signing_bytes() const {
  ByteWriter w;
  put_tag(w, kProposeTag);
  w.put_raw(chain::encode_block(block));
  return w.take();
}

Bytes CommitMessage::signing_bytes() const {
  ByteWriter w;
  put_tag(w, kCommitTag);
  w.put_bytes(block_hash);
  w.put_bool(vote);
  w.put_u64(round);
  return w.take();
}

ProposalMessage make_proposal(const crypto::KeyPair& leader, Block block) {
  ProposalMessage m{std::move(block), {}};
  m.sig = crypto::sign(leader.sk, m.signing_bytes());
  return m;
}

CommitMessage make_commit(const crypto::KeyPair& voter_keys, ValidatorId voter, const BlockHash& h, bool vote,
                          Round round) {
  CommitMessage m;
  m.block_hash = h;
  m.vote = vote;
  m.round = round;
  m.voter = voter;
  m.sig = crypto::sign(voter_keys.sk, m.signing_bytes());
  return m;
}

Bytes encode(const ProposalMessage& m) {
  ByteWriter w;
  w.put_u8(static_cast<std::uint8_t>(MessageTag::Propose));
  w.put_bytes(chain::encode_block(m.block));
  put_sig(w, m.sig);
  return w.take();
}

Bytes encode(const CommitMessage& m) {
  ByteWriter w;
  w.put_u8(static_cast<std::uint8_t>(MessageTag::Commit));
  w.put_bytes(m.block_hash);
  w.put_bool(m.vote);
  w.put_u64(m.round);
  w.put_u16(m.voter.value);
  put_sig(w, m.sig);
  return w.take();
}

std::optional<ProposalMessage> decode_proposal(ByteView bytes) {
  try {
    ByteReader r(bytes);
    if (r.get_u8() != static_cast<std::uint8_t>(MessageTag::Propose)) return std::nullopt;
    ProposalMessage m;
    m.block = chain::decode_block(r.get_bytes_view());
    m.sig = get_sig(r);
    r.expect_end();
    return m;
  } catch (const DecodeError&) {
    return std::nullopt;
  }
}

std::optional<CommitMessage> decode_commit(ByteView bytes) {
  try {
    ByteReader r(bytes);
    if (r.get_u8() != static_cast<std::uint8_t>(MessageTag::Commit)) return std::nullopt;
    CommitMessage m;
    m.block_hash = r.get_array<32>();
    m.vote = r.get_bool();
    m.round = r.get_u64();
    m.voter = ValidatorId{r.get_u16()};
    m.sig = get_sig(r);
    r.expect_end();
    return m;
  } catch (const DecodeError&) {
    return std::nullopt;
  }
}

bool signature_valid(const ProposalMessage& m, const crypto::PublicKey& leader, crypto::Verifier* verifier) {
  if (m.sig.signer != leader) return false;
  const Bytes msg = m.signing_bytes();
  return verifier ? verifier->verify(leader, msg, m.sig) : crypto::verify(leader, msg, m.sig);
}

bool signature_valid(const CommitMessage& m, const crypto::PublicKey& voter, crypto::Verifier* verifier) {
  if (m.sig.signer != voter) return false;
  const Bytes msg = m.signing_bytes();
  return verifier ? verifier->verify(voter, msg, m.sig) : crypto::verify(voter, msg, m.sig);
}

bool VoteSets::add(const BlockHash& h, ValidatorId voter, bool vote) {
  auto [it, fresh] = sets_.try_emplace(h);
  if (fresh) order_.push_back(h);
  auto& e = it->second;
  if (e.s0.contains(voter) || e.s1.contains(voter)) return false;
  (vote ? e.s1 : e.s0).insert(voter);
  return true;
}

std::size_t VoteSets::trues(const BlockHash& h) const {
  auto it = sets_.find(h);
  return it == sets_.end() ? 0 : it->second.s1.size();
}

std::size_t VoteSets::falses(const BlockHash& h) const {
  auto it = sets_.find(h);
  return it == sets_.end() ? 0 : it->second.s0.size();
}

const std::set<ValidatorId>* VoteSets::s1(const BlockHash& h) const {
  auto it = sets_.find(h);
  return it == sets_.end() ? nullptr : &it->second.s1;
}

const std::set<ValidatorId>* VoteSets::s0(const BlockHash& h) const {
  auto it = sets_.find(h);
  return it == sets_.end() ? nullptr : &it->second.s0;
}

std::optional<BlockHash> VoteSets::first_decided(std::size_t threshold) const {
  for (const auto& h : order_) {
    const auto& e = sets_.at(h);
    if (e.s0.size() >= threshold || e.s1.size() >= threshold) return h;
  }
  return std::nullopt;
}

}  // namespace smchain::consensus
