#define OPENSSL_SUPPRESS_DEPRECATED
#include "hsfe/hash.hpp"

#include <openssl/sha.h>

#include <algorithm>

namespace hsfe {

Digest sha256(ByteView data) {
  SHA256_CTX ctx;
  SHA256_Init(&ctx);
  SHA256_Update(&ctx, data.data(), data.size());
  Digest d;
  SHA256_Final(d.data(), &ctx);
  return d;
}

Digest sha256(std::initializer_list<ByteView> parts) {
  SHA256_CTX ctx;
  SHA256_Init(&ctx);
  for (auto p : parts) SHA256_Update(&ctx, p.data(), p.size());
  Digest d;
  SHA256_Final(d.data(), &ctx);
  return d;
}

struct Sha256Stream::Ctx {
  SHA256_CTX c;
};

Sha256Stream::Sha256Stream() : ctx_(std::make_unique<Ctx>()) { SHA256_Init(&ctx_->c); }
Sha256Stream::~Sha256Stream() = default;

void Sha256Stream::update(ByteView data) { SHA256_Update(&ctx_->c, data.data(), data.size()); }

Digest Sha256Stream::finish() {
  Digest d;
  SHA256_Final(d.data(), &ctx_->c);
  return d;
}

void sha256_expand(std::initializer_list<ByteView> parts, std::span<std::uint8_t> out) {
  std::uint32_t block = 0;
  std::size_t pos = 0;
  while (pos < out.size()) {
    std::uint8_t ctr[4] = {std::uint8_t(block >> 24), std::uint8_t(block >> 16), std::uint8_t(block >> 8),
                           std::uint8_t(block)};
    SHA256_CTX ctx;
    SHA256_Init(&ctx);
    SHA256_Update(&ctx, ctr, 4);
    for (auto p : parts) SHA256_Update(&ctx, p.data(), p.size());
    Digest d;
    SHA256_Final(d.data(), &ctx);
    std::size_t n = std::min<std::size_t>(d.size(), out.size() - pos);
    std::copy_n(d.begin(), n, out.begin() + pos);
    pos += n;
    ++block;
  }
}

}  // namespace hsfe
