#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace smchain {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

class DecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Little-endian writer for the canonical encoding. Integers are fixed width;
/// byte strings and sequences carry a u32 length prefix.
class ByteWriter {
 public:
  void put_u8(std::uint8_t v) { out_.push_back(v); }
  void put_u16(std::uint16_t v) { put_le(v, 2); }
  void put_u32(std::uint32_t v) { put_le(v, 4); }
  void put_u64(std::uint64_t v) { put_le(v, 8); }
  void put_bool(bool v) { put_u8(v ? 1 : 0); }

  void put_bytes(ByteView v);
  template <std::size_t N>
  void put_bytes(const std::array<std::uint8_t, N>& a) {
    put_bytes(ByteView{a.data(), a.size()});
  }
  void put_raw(ByteView v) { out_.insert(out_.end(), v.begin(), v.end()); }

  std::size_t size() const { return out_.size(); }
  const Bytes& bytes() const { return out_; }
  Bytes take() { return std::move(out_); }

 private:
  void put_le(std::uint64_t v, int width) {
    for (int i = 0; i < width; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }

  Bytes out_;
};

class ByteReader {
 public:
  explicit ByteReader(ByteView in) : in_(in) {}

  std::uint8_t get_u8() { return static_cast<std::uint8_t>(get_le(1)); }
  std::uint16_t get_u16() { return static_cast<std::uint16_t>(get_le(2)); }
  std::uint32_t get_u32() { return static_cast<std::uint32_t>(get_le(4)); }
  std::uint64_t get_u64() { return get_le(8); }
  bool get_bool();

  Bytes get_bytes();
  ByteView get_bytes_view();
  template <std::size_t N>
  std::array<std::uint8_t, N> get_array() {
    ByteView v = get_bytes_view();
    if (v.size() != N) throw DecodeError("fixed-width field has wrong length");
    std::array<std::uint8_t, N> out{};
    std::copy(v.begin(), v.end(), out.begin());
    return out;
  }
  ByteView get_raw(std::size_t n);

  std::size_t remaining() const { return in_.size() - pos_; }
  bool at_end() const { return pos_ == in_.size(); }
  void expect_end() const {
    if (!at_end()) throw DecodeError("trailing bytes after record");
  }

 private:
  std::uint64_t get_le(int width);

  ByteView in_;
  std::size_t pos_ = 0;
};

std::string to_hex(ByteView v);
template <std::size_t N>
std::string to_hex(const std::array<std::uint8_t, N>& a) {
  return to_hex(ByteView{a.data(), a.size()});
}
/// Returns false on odd length or non-hex characters.
bool from_hex(std::string_view hex, Bytes& out);

inline ByteView as_view(const std::string& s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

}  // namespace smchain
