#include "hsfe/symenc.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <memory>
#include <sstream>

#include "hsfe/errors.hpp"

namespace hsfe {

namespace {

struct CtxDel {
  void operator()(EVP_CIPHER_CTX* p) const { EVP_CIPHER_CTX_free(p); }
};
using CtxPtr = std::unique_ptr<EVP_CIPHER_CTX, CtxDel>;

std::array<std::uint8_t, 5> associated_data(std::uint32_t round, Direction dir) {
  return {std::uint8_t(round >> 24), std::uint8_t(round >> 16), std::uint8_t(round >> 8), std::uint8_t(round),
          static_cast<std::uint8_t>(dir)};
}

}  // namespace

SymKey keygen(RandomSource& rng) {
  SymKey k;
  rng.fill(k.bytes);
  return k;
}

SymKey key_from_hex(std::string_view hex) {
  Bytes b = from_hex(hex);
  if (b.size() != 16) throw ConfigError("key must be 16 bytes (32 hex digits)");
  SymKey k;
  std::copy(b.begin(), b.end(), k.bytes.begin());
  return k;
}

std::string key_to_hex(const SymKey& k) { return to_hex(k.bytes); }

SymKey load_key_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read key file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return key_from_hex(ss.str());
}

void save_key_file(const std::string& path, const SymKey& k) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write key file " + path);
  out << key_to_hex(k) << '\n';
}

Bytes enc(const SymKey& k, ByteView m, RandomSource& rng, std::uint32_t round, Direction dir) {
  Bytes out(kNonceBytes + m.size() + kTagBytes);
  rng.fill(std::span(out.data(), kNonceBytes));
  CtxPtr ctx(EVP_CIPHER_CTX_new());
  auto ad = associated_data(round, dir);
  int len = 0;
  if (!ctx || EVP_EncryptInit_ex(ctx.get(), EVP_aes_128_gcm(), nullptr, nullptr, nullptr) != 1 ||
      EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_IVLEN, kNonceBytes, nullptr) != 1 ||
      EVP_EncryptInit_ex(ctx.get(), nullptr, nullptr, k.bytes.data(), out.data()) != 1 ||
      EVP_EncryptUpdate(ctx.get(), nullptr, &len, ad.data(), static_cast<int>(ad.size())) != 1)
    throw Error("AES-GCM setup failed");
  if (!m.empty() && EVP_EncryptUpdate(ctx.get(), out.data() + kNonceBytes, &len, m.data(), static_cast<int>(m.size())) != 1)
    throw Error("AES-GCM encryption failed");
  if (EVP_EncryptFinal_ex(ctx.get(), out.data() + kNonceBytes + m.size(), &len) != 1 ||
      EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_GET_TAG, kTagBytes, out.data() + kNonceBytes + m.size()) != 1)
    throw Error("AES-GCM finalization failed");
  return out;
}

std::optional<Bytes> dec(const SymKey& k, ByteView c, std::uint32_t round, Direction dir) {
  if (c.size() < kCiphertextOverhead) return std::nullopt;
  const std::size_t n = c.size() - kCiphertextOverhead;
  Bytes out(n);
  CtxPtr ctx(EVP_CIPHER_CTX_new());
  auto ad = associated_data(round, dir);
  int len = 0;
  if (!ctx || EVP_DecryptInit_ex(ctx.get(), EVP_aes_128_gcm(), nullptr, nullptr, nullptr) != 1 ||
      EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_IVLEN, kNonceBytes, nullptr) != 1 ||
      EVP_DecryptInit_ex(ctx.get(), nullptr, nullptr, k.bytes.data(), c.data()) != 1 ||
      EVP_DecryptUpdate(ctx.get(), nullptr, &len, ad.data(), static_cast<int>(ad.size())) != 1)
    throw Error("AES-GCM setup failed");
  if (n && EVP_DecryptUpdate(ctx.get(), out.data(), &len, c.data() + kNonceBytes, static_cast<int>(n)) != 1) return std::nullopt;
  Bytes tag(c.end() - kTagBytes, c.end());
  if (EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_TAG, kTagBytes, tag.data()) != 1) return std::nullopt;
  if (EVP_DecryptFinal_ex(ctx.get(), out.data() + n, &len) != 1) return std::nullopt;
  return out;
}

}  // namespace hsfe
