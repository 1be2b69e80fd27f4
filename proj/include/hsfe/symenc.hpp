#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

#include "hsfe/bytes.hpp"
#include "hsfe/random.hpp"

namespace hsfe {

// AES-128-GCM with a random 96-bit nonce. Wire layout: nonce || body || tag.
inline constexpr std::size_t kNonceBytes = 12;
inline constexpr std::size_t kTagBytes = 16;
inline constexpr std::size_t kCiphertextOverhead = kNonceBytes + kTagBytes;

struct SymKey {
  std::array<std::uint8_t, 16> bytes{};
  bool operator==(const SymKey&) const = default;
};

// Which way a ciphertext travels relative to the enclave. Bound into the
// associated data together with the round index.
enum class Direction : std::uint8_t { ToEnclave = 0, FromEnclave = 1 };

SymKey keygen(RandomSource& rng);
SymKey key_from_hex(std::string_view hex);
std::string key_to_hex(const SymKey& k);
SymKey load_key_file(const std::string& path);
void save_key_file(const std::string& path, const SymKey& k);

Bytes enc(const SymKey& k, ByteView m, RandomSource& rng, std::uint32_t round = 0, Direction dir = Direction::ToEnclave);
// nullopt on tag failure, wrong key, wrong round or direction, or a truncated input.
std::optional<Bytes> dec(const SymKey& k, ByteView c, std::uint32_t round = 0, Direction dir = Direction::ToEnclave);

}  // namespace hsfe
