#pragma once

#include <cstdint>

// Constant-shape primitives. None of these branch on their arguments; the
// lint test in tests/unit checks the marked hardened regions stay that way.
namespace hsfe {

// All ones when bit 0 of t is set, zero otherwise. Only bit 0 is consulted.
inline std::uint64_t make_mask(std::uint64_t t) { return std::uint64_t(0) - (t & 1); }

// t ? x : y
inline std::uint64_t bf_select(std::uint64_t t, std::uint64_t x, std::uint64_t y) {
  std::uint64_t m = make_mask(t);
  return (x & m) | (y & ~m);
}

inline std::uint64_t bf_eq(std::uint64_t a, std::uint64_t b) {
  std::uint64_t d = a ^ b;
  return ((d | (std::uint64_t(0) - d)) >> 63) ^ 1;
}

// Unsigned a < b, from the borrow of a - b.
inline std::uint64_t bf_lt(std::uint64_t a, std::uint64_t b) {
  return ((~a & b) | (~(a ^ b) & (a - b))) >> 63;
}

inline std::uint64_t bf_min_update(std::uint64_t cur, std::uint64_t cand) { return bf_select(bf_lt(cand, cur), cand, cur); }

// Swaps x and y when t is set.
inline void bf_cswap(std::uint64_t t, std::uint64_t& x, std::uint64_t& y) {
  std::uint64_t d = (x ^ y) & make_mask(t);
  x ^= d;
  y ^= d;
}

}  // namespace hsfe
