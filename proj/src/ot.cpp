#include "hsfe/ot.hpp"

#include <openssl/bn.h>
#include <openssl/ec.h>
#include <openssl/obj_mac.h>

#include "hsfe/codec.hpp"
#include "hsfe/errors.hpp"
#include "hsfe/hash.hpp"

namespace hsfe {

namespace {

struct BnCtxDel {
  void operator()(BN_CTX* p) const { BN_CTX_free(p); }
};
struct BnDel {
  void operator()(BIGNUM* p) const { BN_clear_free(p); }
};
struct PointDel {
  void operator()(EC_POINT* p) const { EC_POINT_free(p); }
};
using BnCtxPtr = std::unique_ptr<BN_CTX, BnCtxDel>;
using BnPtr = std::unique_ptr<BIGNUM, BnDel>;
using PointPtr = std::unique_ptr<EC_POINT, PointDel>;

const EC_GROUP* group() {
  static EC_GROUP* g = [] {
    EC_GROUP* p = EC_GROUP_new_by_curve_name(NID_X9_62_prime256v1);
    if (!p) throw Error("P-256 unavailable");
    return p;
  }();
  return g;
}

PointPtr new_point() {
  PointPtr p(EC_POINT_new(group()));
  if (!p) throw Error("EC_POINT_new failed");
  return p;
}

// Scalar in [1, order) from 48 random bytes, so the modular bias is negligible.
BnPtr random_scalar(RandomSource& rng, BN_CTX* ctx) {
  std::uint8_t buf[48];
  BnPtr x(BN_new()), r(BN_new());
  const BIGNUM* order = EC_GROUP_get0_order(group());
  do {
    rng.fill(buf);
    BN_bin2bn(buf, sizeof buf, x.get());
    BN_nnmod(r.get(), x.get(), order, ctx);
  } while (BN_is_zero(r.get()));
  return r;
}

Bytes encode_point(const EC_POINT* p, BN_CTX* ctx) {
  Bytes out(kOtPointBytes);
  if (EC_POINT_point2oct(group(), p, POINT_CONVERSION_COMPRESSED, out.data(), out.size(), ctx) != kOtPointBytes)
    throw ProtocolError("cannot encode group element");
  return out;
}

PointPtr decode_point(ByteView in, BN_CTX* ctx) {
  auto p = new_point();
  if (in.size() != kOtPointBytes || EC_POINT_oct2point(group(), p.get(), in.data(), in.size(), ctx) != 1 ||
      EC_POINT_is_at_infinity(group(), p.get()) || EC_POINT_is_on_curve(group(), p.get(), ctx) != 1)
    throw ProtocolError("OT: malformed group element");
  return p;
}

void derive_pad(std::uint32_t j, ByteView A, ByteView B, ByteView S, std::span<std::uint8_t> out) {
  std::uint8_t idx[4] = {std::uint8_t(j >> 24), std::uint8_t(j >> 16), std::uint8_t(j >> 8), std::uint8_t(j)};
  static const Bytes tag = to_bytes("hsfe-ot-pad");
  sha256_expand({ByteView(tag), ByteView(idx, 4), A, B, S}, out);
}

}  // namespace

void check_ot_pairs(const OtPairs& pairs) {
  for (const auto& [x0, x1] : pairs) {
    if (x0.size() != x1.size()) throw ProtocolError("OT pair strings differ in length");
    if (x0.size() != pairs.front().first.size()) throw ProtocolError("OT pairs must share one length");
    if (x0.size() > kOtMaxPayload) throw ProtocolError("OT payloads longer than " + std::to_string(kOtMaxPayload) + " bytes are not supported");
  }
}

std::size_t ot_message_bytes(std::size_t n, std::size_t payload_len) {
  return kOtPointBytes + (4 + n * kOtPointBytes) + (8 + n * 2 * payload_len);
}

struct OtSender::Impl {
  explicit Impl(RandomSource& r) : rng(r) {}
  RandomSource& rng;
  BnCtxPtr ctx{BN_CTX_new()};
  BnPtr a;
  PointPtr A, aA;
  Bytes A_enc;
};

OtSender::OtSender(RandomSource& rng) : impl_(std::make_unique<Impl>(rng)) {}
OtSender::~OtSender() = default;

Bytes OtSender::first_message() {
  auto& s = *impl_;
  s.a = random_scalar(s.rng, s.ctx.get());
  s.A = new_point();
  EC_POINT_mul(group(), s.A.get(), s.a.get(), nullptr, nullptr, s.ctx.get());
  s.aA = new_point();
  EC_POINT_mul(group(), s.aA.get(), nullptr, s.A.get(), s.a.get(), s.ctx.get());
  s.A_enc = encode_point(s.A.get(), s.ctx.get());
  return s.A_enc;
}

Bytes OtSender::answer(ByteView ot2, const OtPairs& pairs) {
  auto& s = *impl_;
  if (!s.a) throw ProtocolError("OT sender answered before sending its first message");
  check_ot_pairs(pairs);
  Reader r(ot2);
  std::uint32_t n = r.u32();
  if (n != pairs.size()) throw ProtocolError("OT: receiver sent " + std::to_string(n) + " choices for " + std::to_string(pairs.size()) + " pairs");
  const std::size_t L = pairs.empty() ? 0 : pairs.front().first.size();
  Writer w;
  w.u32(n).u32(static_cast<std::uint32_t>(L));
  Bytes out = std::move(w).bytes();
  out.reserve(out.size() + n * 2 * L);
  auto S0 = new_point(), S1 = new_point();
  Bytes pad(L);
  for (std::uint32_t j = 0; j < n; ++j) {
    ByteView Bj = r.raw(kOtPointBytes);
    auto B = decode_point(Bj, s.ctx.get());
    EC_POINT_mul(group(), S0.get(), nullptr, B.get(), s.a.get(), s.ctx.get());
    // a(B - A) = aB - aA
    EC_POINT_copy(S1.get(), s.aA.get());
    EC_POINT_invert(group(), S1.get(), s.ctx.get());
    EC_POINT_add(group(), S1.get(), S1.get(), S0.get(), s.ctx.get());
    Bytes s0 = encode_point(S0.get(), s.ctx.get());
    Bytes s1 = EC_POINT_is_at_infinity(group(), S1.get()) ? Bytes(kOtPointBytes, 0) : encode_point(S1.get(), s.ctx.get());
    derive_pad(j, s.A_enc, Bj, s0, pad);
    for (std::size_t t = 0; t < L; ++t) out.push_back(pairs[j].first[t] ^ pad[t]);
    derive_pad(j, s.A_enc, Bj, s1, pad);
    for (std::size_t t = 0; t < L; ++t) out.push_back(pairs[j].second[t] ^ pad[t]);
  }
  r.expect_done();
  return out;
}

struct OtReceiver::Impl {
  Impl(BitVec c, RandomSource& r) : choices(std::move(c)), rng(r) {}
  BitVec choices;
  RandomSource& rng;
  BnCtxPtr ctx{BN_CTX_new()};
  std::vector<Bytes> keys_shared;  // encoded b_j A
  std::vector<Bytes> B_enc;
  Bytes A_enc;
};

OtReceiver::OtReceiver(BitVec choices, RandomSource& rng) : impl_(std::make_unique<Impl>(std::move(choices), rng)) {}
OtReceiver::~OtReceiver() = default;

Bytes OtReceiver::respond(ByteView ot1) {
  auto& s = *impl_;
  auto A = decode_point(ot1, s.ctx.get());
  s.A_enc.assign(ot1.begin(), ot1.end());
  const std::size_t n = s.choices.size();
  Writer w;
  w.u32(static_cast<std::uint32_t>(n));
  Bytes out = std::move(w).bytes();
  out.reserve(4 + n * kOtPointBytes);
  auto B = new_point(), S = new_point();
  for (std::size_t j = 0; j < n; ++j) {
    auto b = random_scalar(s.rng, s.ctx.get());
    EC_POINT_mul(group(), B.get(), b.get(), nullptr, nullptr, s.ctx.get());
    if (s.choices[j] & 1) EC_POINT_add(group(), B.get(), B.get(), A.get(), s.ctx.get());
    EC_POINT_mul(group(), S.get(), nullptr, A.get(), b.get(), s.ctx.get());
    Bytes enc = encode_point(B.get(), s.ctx.get());
    append(out, enc);
    s.B_enc.push_back(std::move(enc));
    s.keys_shared.push_back(encode_point(S.get(), s.ctx.get()));
  }
  return out;
}

std::vector<Bytes> OtReceiver::finish(ByteView ot3) {
  auto& s = *impl_;
  Reader r(ot3);
  std::uint32_t n = r.u32(), L = r.u32();
  if (n != s.choices.size()) throw ProtocolError("OT: sender answered a different batch size");
  if (L > kOtMaxPayload) throw ProtocolError("OT payload too long");
  if (r.remaining() != std::size_t(n) * 2 * L) throw ProtocolError("OT: answer has the wrong length");
  std::vector<Bytes> out(n, Bytes(L));
  Bytes pad(L);
  for (std::uint32_t j = 0; j < n; ++j) {
    ByteView e0 = r.raw(L), e1 = r.raw(L);
    ByteView e = (s.choices[j] & 1) ? e1 : e0;
    derive_pad(j, s.A_enc, s.B_enc[j], s.keys_shared[j], pad);
    for (std::size_t t = 0; t < L; ++t) out[j][t] = e[t] ^ pad[t];
  }
  return out;
}

}  // namespace hsfe
