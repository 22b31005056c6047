#include "smchain/common/bytes.hpp"

#include <limits>

namespace smchain {

void ByteWriter::put_bytes(ByteView v) {
  if (v.size() > std::numeric_limits<std::uint32_t>::max()) throw std::length_error("field too long");
  put_u32(static_cast<std::uint32_t>(v.size()));
  put_raw(v);
}

bool ByteReader::get_bool() {
  const auto b = get_u8();
  if (b > 1) throw DecodeError("boolean out of range");
  return b == 1;
}

std::uint64_t ByteReader::get_le(int width) {
  if (remaining() < static_cast<std::size_t>(width)) throw DecodeError("truncated integer");
  std::uint64_t v = 0;
  for (int i = 0; i < width; ++i) v |= static_cast<std::uint64_t>(in_[pos_ + i]) << (8 * i);
  pos_ += static_cast<std::size_t>(width);
  return v;
}

ByteView ByteReader::get_raw(std::size_t n) {
  if (remaining() < n) throw DecodeError("truncated field");
  ByteView v = in_.subspan(pos_, n);
  pos_ += n;
  return v;
}

ByteView ByteReader::get_bytes_view() {
  const auto len = get_u32();
  return get_raw(len);
}

Bytes ByteReader::get_bytes() {
  ByteView v = get_bytes_view();
  return Bytes(v.begin(), v.end());
}

std::string to_hex(ByteView v) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out;
  out.reserve(v.size() * 2);
  for (auto b : v) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 0xf]);
  }
  return out;
}

namespace {
int nibble(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}
}  // namespace

bool from_hex(std::string_view hex, Bytes& out) {
  if (hex.size() % 2 != 0) return false;
  out.clear();
  out.reserve(hex.size() / 2);
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    const int hi = nibble(hex[i]);
    const int lo = nibble(hex[i + 1]);
    if (hi < 0 || lo < 0) return false;
    out.push_back(static_cast<std::uint8_t>(hi << 4 | lo));
  }
  return true;
}

}  // namespace smchain
