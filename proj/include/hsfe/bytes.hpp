#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hsfe {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

// One bit per element, values 0 or 1.
using BitVec = std::vector<std::uint8_t>;

inline Bytes to_bytes(std::string_view s) { return Bytes(s.begin(), s.end()); }

inline std::string to_string(ByteView b) { return std::string(b.begin(), b.end()); }

inline void append(Bytes& dst, ByteView src) { dst.insert(dst.end(), src.begin(), src.end()); }

inline Bytes concat(ByteView a, ByteView b) {
  Bytes out;
  out.reserve(a.size() + b.size());
  append(out, a);
  append(out, b);
  return out;
}

std::string to_hex(ByteView b);
Bytes from_hex(std::string_view hex);

// True when `needle` occurs as a contiguous substring of `haystack`.
bool contains(ByteView haystack, ByteView needle);

// Bit helpers. "lsb" orders put bit i of the integer at position i.
BitVec u64_to_bits_lsb(std::uint64_t v, std::size_t width);
std::uint64_t bits_to_u64_lsb(std::span<const std::uint8_t> bits);
BitVec parse_bitstring(std::string_view s);  // "0110" -> {0,1,1,0}
std::string format_bitstring(std::span<const std::uint8_t> bits);

// Packs bits MSB-first into bytes (trailing pad bits are zero).
Bytes pack_bits(std::span<const std::uint8_t> bits);
BitVec unpack_bits(ByteView bytes, std::size_t nbits);

}  // namespace hsfe
