#include "hsfe/bytes.hpp"

#include <algorithm>

#include "hsfe/errors.hpp"

namespace hsfe {

std::string to_hex(ByteView b) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out;
  out.reserve(b.size() * 2);
  for (auto c : b) {
    out.push_back(digits[c >> 4]);
    out.push_back(digits[c & 15]);
  }
  return out;
}

namespace {
int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}
}  // namespace

Bytes from_hex(std::string_view hex) {
  std::string clean;
  for (char c : hex)
    if (!std::isspace(static_cast<unsigned char>(c))) clean.push_back(c);
  if (clean.size() % 2) throw ConfigError("hex string has odd length");
  Bytes out(clean.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    int hi = hex_value(clean[2 * i]);
    int lo = hex_value(clean[2 * i + 1]);
    if (hi < 0 || lo < 0) throw ConfigError("invalid hex digit");
    out[i] = static_cast<std::uint8_t>(hi << 4 | lo);
  }
  return out;
}

bool contains(ByteView haystack, ByteView needle) {
  if (needle.empty()) return true;
  return std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end()) != haystack.end();
}

BitVec u64_to_bits_lsb(std::uint64_t v, std::size_t width) {
  BitVec bits(width, 0);
  for (std::size_t i = 0; i < width && i < 64; ++i) bits[i] = (v >> i) & 1;
  return bits;
}

std::uint64_t bits_to_u64_lsb(std::span<const std::uint8_t> bits) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < bits.size() && i < 64; ++i) v |= std::uint64_t(bits[i] & 1) << i;
  return v;
}

BitVec parse_bitstring(std::string_view s) {
  BitVec bits;
  bits.reserve(s.size());
  for (char c : s) {
    if (c != '0' && c != '1') throw ConfigError("bitstring may contain only 0 and 1");
    bits.push_back(static_cast<std::uint8_t>(c - '0'));
  }
  return bits;
}

std::string format_bitstring(std::span<const std::uint8_t> bits) {
  std::string s;
  s.reserve(bits.size());
  for (auto b : bits) s.push_back(b ? '1' : '0');
  return s;
}

Bytes pack_bits(std::span<const std::uint8_t> bits) {
  Bytes out((bits.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < bits.size(); ++i)
    if (bits[i]) out[i / 8] |= static_cast<std::uint8_t>(0x80u >> (i % 8));
  return out;
}

BitVec unpack_bits(ByteView bytes, std::size_t nbits) {
  if (bytes.size() * 8 < nbits) throw Error("unpack_bits: not enough bytes");
  BitVec bits(nbits);
  for (std::size_t i = 0; i < nbits; ++i) bits[i] = (bytes[i / 8] >> (7 - i % 8)) & 1;
  return bits;
}

}  // namespace hsfe
