#include "hsfe/random.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cstring>

#include "hsfe/errors.hpp"
#include "hsfe/hash.hpp"

namespace hsfe {

std::uint64_t RandomSource::next_u64() {
  std::uint8_t b[8];
  fill(b);
  std::uint64_t v = 0;
  for (auto c : b) v = v << 8 | c;
  return v;
}

bool RandomSource::next_bit() {
  std::uint8_t b;
  fill({&b, 1});
  return b & 1;
}

Bytes RandomSource::bytes(std::size_t n) {
  Bytes out(n);
  fill(out);
  return out;
}

std::uint64_t RandomSource::uniform(std::uint64_t bound) {
  if (bound == 0) throw Error("uniform: zero bound");
  // Rejection sampling keeps the result unbiased.
  const std::uint64_t limit = ~std::uint64_t(0) - (~std::uint64_t(0) % bound);
  for (;;) {
    std::uint64_t v = next_u64();
    if (v < limit) return v % bound;
  }
}

struct Drbg::Impl {
  EVP_CIPHER_CTX* ctx = nullptr;
  std::array<std::uint8_t, 4096> buf{};
  std::size_t pos = 4096;
  ~Impl() { EVP_CIPHER_CTX_free(ctx); }
  void refill() {
    static const std::array<std::uint8_t, 4096> zeros{};
    int outl = 0;
    EVP_EncryptUpdate(ctx, buf.data(), &outl, zeros.data(), static_cast<int>(zeros.size()));
    pos = 0;
  }
};

Drbg::Drbg(std::uint64_t seed, std::string_view label) {
  std::uint8_t s[8];
  for (int i = 0; i < 8; ++i) s[i] = static_cast<std::uint8_t>(seed >> (56 - 8 * i));
  auto d = sha256({ByteView(s, 8), ByteView(reinterpret_cast<const std::uint8_t*>(label.data()), label.size())});
  init(d);
}

Drbg::Drbg(ByteView seed_material) { init(sha256(seed_material)); }

Drbg::~Drbg() = default;
Drbg::Drbg(Drbg&&) noexcept = default;
Drbg& Drbg::operator=(Drbg&&) noexcept = default;

void Drbg::init(ByteView material) {
  std::copy_n(material.begin(), 32, material_.begin());
  impl_ = std::make_unique<Impl>();
  impl_->ctx = EVP_CIPHER_CTX_new();
  if (!impl_->ctx) throw Error("EVP_CIPHER_CTX_new failed");
  // key = material[0..16), counter block = material[16..32)
  if (EVP_EncryptInit_ex(impl_->ctx, EVP_aes_128_ctr(), nullptr, material_.data(), material_.data() + 16) != 1)
    throw Error("AES-CTR init failed");
}

void Drbg::fill(std::span<std::uint8_t> out) {
  std::size_t done = 0;
  while (done < out.size()) {
    if (impl_->pos == impl_->buf.size()) impl_->refill();
    std::size_t n = std::min(out.size() - done, impl_->buf.size() - impl_->pos);
    std::memcpy(out.data() + done, impl_->buf.data() + impl_->pos, n);
    impl_->pos += n;
    done += n;
  }
}

Drbg Drbg::fork(std::string_view label) const {
  Bytes m(material_.begin(), material_.end());
  append(m, to_bytes("fork:"));
  append(m, to_bytes(label));
  return Drbg(ByteView(m));
}

void RecordingSource::fill(std::span<std::uint8_t> out) {
  inner_.fill(out);
  log_.insert(log_.end(), out.begin(), out.end());
}

Bytes RecordingSource::take() {
  Bytes out;
  out.swap(log_);
  return out;
}

void ReplaySource::fill(std::span<std::uint8_t> out) {
  if (coins_.size() - pos_ < out.size()) throw ProtocolError("replay: logged coins exhausted");
  std::memcpy(out.data(), coins_.data() + pos_, out.size());
  pos_ += out.size();
}

}  // namespace hsfe
