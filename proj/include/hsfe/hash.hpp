#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <memory>

#include "hsfe/bytes.hpp"

namespace hsfe {

using Digest = std::array<std::uint8_t, 32>;

Digest sha256(ByteView data);
Digest sha256(std::initializer_list<ByteView> parts);

class Sha256Stream {
 public:
  Sha256Stream();
  ~Sha256Stream();
  Sha256Stream(const Sha256Stream&) = delete;
  Sha256Stream& operator=(const Sha256Stream&) = delete;
  void update(ByteView data);
  Digest finish();

 private:
  struct Ctx;
  std::unique_ptr<Ctx> ctx_;
};

// Expands a hash of `parts` to `out.size()` bytes with a block counter.
void sha256_expand(std::initializer_list<ByteView> parts, std::span<std::uint8_t> out);

}  // namespace hsfe
