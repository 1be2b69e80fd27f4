#define OPENSSL_SUPPRESS_DEPRECATED
#include "hsfe/garbling.hpp"

#include <openssl/sha.h>

#include <cstring>

#include "hsfe/codec.hpp"
#include "hsfe/errors.hpp"

namespace hsfe {

namespace {

constexpr std::uint8_t kMagic[4] = {'H', 'G', 'F', '1'};

void check_k(unsigned k) {
  if (k != 80 && k != 128) throw GarblingError("unsupported security parameter k=" + std::to_string(k) + " (use 80 or 128)");
}

void store(std::uint8_t* out, const Label& l, unsigned k) {
  std::uint8_t tmp[16];
  for (int i = 0; i < 8; ++i) {
    tmp[i] = static_cast<std::uint8_t>(l.lo >> (8 * i));
    tmp[8 + i] = static_cast<std::uint8_t>(l.hi >> (8 * i));
  }
  std::memcpy(out, tmp, k / 8);
}

Label load(const std::uint8_t* in, unsigned k) {
  std::uint8_t tmp[16] = {};
  std::memcpy(tmp, in, k / 8);
  Label l;
  for (int i = 0; i < 8; ++i) {
    l.lo |= std::uint64_t(tmp[i]) << (8 * i);
    l.hi |= std::uint64_t(tmp[8 + i]) << (8 * i);
  }
  return l;
}

Label random_label(RandomSource& rng, unsigned k) {
  std::uint8_t b[16];
  rng.fill(b);
  return load(b, k);
}

// H(gate id || A || B) truncated to k/8+1 bytes.
void row_hash(std::uint64_t gid, const Label& a, const Label& b, unsigned k, std::uint8_t* out) {
  std::uint8_t buf[8 + 32];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<std::uint8_t>(gid >> (56 - 8 * i));
  const std::size_t lb = k / 8;
  store(buf + 8, a, k);
  store(buf + 8 + lb, b, k);
  std::uint8_t d[32];
  SHA256_CTX ctx;
  SHA256_Init(&ctx);
  SHA256_Update(&ctx, buf, 8 + 2 * lb);
  SHA256_Final(d, &ctx);
  std::memcpy(out, d, lb + 1);
}

Digest decode_hash(std::uint32_t i, const Label& l, unsigned k) {
  static const Bytes tag = to_bytes("hsfe-decode");
  std::uint8_t idx[4] = {std::uint8_t(i >> 24), std::uint8_t(i >> 16), std::uint8_t(i >> 8), std::uint8_t(i)};
  std::uint8_t tok[16];
  store(tok, l, k);
  return sha256({ByteView(tag), ByteView(idx, 4), ByteView(tok, k / 8)});
}

inline bool gate_fn(GateKind kind, bool a, bool b) { return kind == GateKind::AND ? (a && b) : (a || b); }

}  // namespace

std::size_t token_bytes(unsigned k) { return k / 8 + 1; }

void write_token(Bytes& out, const Label& l, unsigned k) {
  std::size_t n = out.size();
  out.resize(n + k / 8 + 1);
  store(out.data() + n, l, k);
  out[n + k / 8] = l.permute_bit();
}

Label read_token(ByteView in, unsigned k) {
  if (in.size() != k / 8 + 1) throw GarblingError("token has wrong length");
  Label l = load(in.data(), k);
  if (in[k / 8] != std::uint8_t(l.permute_bit())) throw GarblingError("token permute byte disagrees with its label");
  return l;
}

Garbling garble(std::shared_ptr<const Circuit> cp, unsigned k, RandomSource& rng, GarbleTrace* trace,
                const std::optional<Digest>& digest) {
  check_k(k);
  const Circuit& c = *cp;
  const std::size_t lb = k / 8, rb = lb + 1;
  Label delta = random_label(rng, k);
  delta.lo |= 1;

  std::vector<Label> z(c.wire_count);
  Garbling g;
  g.e.k = g.d.k = g.F.k = k;
  g.e.alice_bits = c.alice_bits;
  g.e.pairs.reserve(c.input_count());
  for (std::uint32_t i = 0; i < c.input_count(); ++i) {
    z[i] = random_label(rng, k);
    g.e.pairs.emplace_back(z[i], z[i] ^ delta);
  }

  g.F.tables.resize(c.nonlinear_count() * 3 * rb);
  std::uint8_t* row = g.F.tables.data();
  std::uint8_t h[4][17];
  std::uint8_t pt[17];
  for (std::size_t gi = 0; gi < c.gates.size(); ++gi) {
    const Gate& gate = c.gates[gi];
    switch (gate.kind) {
      case GateKind::XOR: z[gate.out] = z[gate.in0] ^ z[gate.in1]; break;
      case GateKind::NOT: z[gate.out] = z[gate.in0] ^ delta; break;
      case GateKind::CONST: {
        z[gate.out] = random_label(rng, k);
        g.F.const_labels.push_back(gate.in0 ? z[gate.out] ^ delta : z[gate.out]);
        break;
      }
      case GateKind::AND:
      case GateKind::OR: {
        const Label A0 = z[gate.in0], B0 = z[gate.in1];
        const bool pa = A0.permute_bit(), pb = B0.permute_bit();
        for (int idx = 0; idx < 4; ++idx) {
          bool a = ((idx >> 1) & 1) ^ pa, b = (idx & 1) ^ pb;
          row_hash(gi, a ? A0 ^ delta : A0, b ? B0 ^ delta : B0, k, h[idx]);
        }
        // Row (0,0) is implicit: its output token is the hash itself.
        Label c00 = load(h[0], k);
        Label C0 = gate_fn(gate.kind, pa, pb) ? c00 ^ delta : c00;
        z[gate.out] = C0;
        for (int idx = 1; idx < 4; ++idx) {
          bool a = ((idx >> 1) & 1) ^ pa, b = (idx & 1) ^ pb;
          Label Cv = gate_fn(gate.kind, a, b) ? C0 ^ delta : C0;
          store(pt, Cv, k);
          pt[lb] = Cv.permute_bit();
          for (std::size_t t = 0; t < rb; ++t) row[t] = h[idx][t] ^ pt[t];
          row += rb;
        }
        break;
      }
    }
  }

  g.d.entries.reserve(c.outputs.size());
  for (std::size_t i = 0; i < c.outputs.size(); ++i) {
    Label y0 = z[c.outputs[i]];
    g.d.entries.emplace_back(decode_hash(static_cast<std::uint32_t>(i), y0, k),
                             decode_hash(static_cast<std::uint32_t>(i), y0 ^ delta, k));
  }
  g.F.digest = digest ? *digest : circuit_digest(c);
  g.F.circuit = std::move(cp);
  if (trace) {
    trace->delta = delta;
    trace->zero_labels = std::move(z);
  }
  return g;
}

GarbledInput encode(const EncodingInfo& e, std::span<const std::uint8_t> x) {
  if (x.size() != e.pairs.size()) throw GarblingError("encode: expected " + std::to_string(e.pairs.size()) + " bits, got " + std::to_string(x.size()));
  GarbledInput X(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) X[i] = x[i] ? e.pairs[i].second : e.pairs[i].first;
  return X;
}

GarbledInput encode_a(const EncodingInfo& e, std::span<const std::uint8_t> a) {
  if (a.size() != e.alice_bits) throw GarblingError("encode_a: expected " + std::to_string(e.alice_bits) + " bits, got " + std::to_string(a.size()));
  GarbledInput X(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) X[i] = a[i] ? e.pairs[i].second : e.pairs[i].first;
  return X;
}

GarbledInput encode_b(const EncodingInfo& e, std::span<const std::uint8_t> b) {
  const std::size_t r = e.pairs.size() - e.alice_bits;
  if (b.size() != r) throw GarblingError("encode_b: expected " + std::to_string(r) + " bits, got " + std::to_string(b.size()));
  GarbledInput X(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) X[i] = b[i] ? e.pairs[e.alice_bits + i].second : e.pairs[e.alice_bits + i].first;
  return X;
}

GarbledOutput evaluate(const GarbledCircuit& F, const GarbledInput& X, std::vector<Label>* all_wires) {
  check_k(F.k);
  if (!F.circuit) throw GarblingError("garbled circuit has no topology attached");
  const Circuit& c = *F.circuit;
  const unsigned k = F.k;
  const std::size_t lb = k / 8, rb = lb + 1;
  if (X.size() != c.input_count()) throw GarblingError("evaluate: expected " + std::to_string(c.input_count()) + " tokens, got " + std::to_string(X.size()));
  if (F.tables.size() != c.nonlinear_count() * 3 * rb) throw GarblingError("garbled table size does not match the circuit");
  if (F.const_labels.size() != c.count(GateKind::CONST)) throw GarblingError("constant token count does not match the circuit");

  std::vector<Label> w(c.wire_count);
  std::copy(X.begin(), X.end(), w.begin());
  const std::uint8_t* rows = F.tables.data();
  std::size_t next_const = 0;
  std::uint8_t h[17];
  for (std::size_t gi = 0; gi < c.gates.size(); ++gi) {
    const Gate& gate = c.gates[gi];
    switch (gate.kind) {
      case GateKind::XOR: w[gate.out] = w[gate.in0] ^ w[gate.in1]; break;
      case GateKind::NOT: w[gate.out] = w[gate.in0]; break;
      case GateKind::CONST: w[gate.out] = F.const_labels[next_const++]; break;
      case GateKind::AND:
      case GateKind::OR: {
        const Label& A = w[gate.in0];
        const Label& B = w[gate.in1];
        const int idx = (A.permute_bit() << 1) | B.permute_bit();
        row_hash(gi, A, B, k, h);
        if (idx != 0) {
          const std::uint8_t* r = rows + (idx - 1) * rb;
          for (std::size_t t = 0; t < rb; ++t) h[t] ^= r[t];
        }
        Label C = load(h, k);
        if (idx != 0 && h[lb] != std::uint8_t(C.permute_bit()))
          throw GarblingError("garbled row failed its consistency check at gate " + std::to_string(gi));
        w[gate.out] = C;
        rows += 3 * rb;
        break;
      }
    }
  }
  GarbledOutput Y;
  Y.reserve(c.outputs.size());
  for (auto o : c.outputs) Y.push_back(w[o]);
  if (all_wires) *all_wires = std::move(w);
  return Y;
}

std::optional<BitVec> decode(const DecodingInfo& d, const GarbledOutput& Y) {
  if (Y.size() != d.entries.size()) throw GarblingError("decode: expected " + std::to_string(d.entries.size()) + " tokens, got " + std::to_string(Y.size()));
  BitVec out(Y.size());
  for (std::size_t i = 0; i < Y.size(); ++i) {
    Digest h = decode_hash(static_cast<std::uint32_t>(i), Y[i], d.k);
    if (h == d.entries[i].first) out[i] = 0;
    else if (h == d.entries[i].second) out[i] = 1;
    else return std::nullopt;
  }
  return out;
}

Bytes serialize_garbled(const GarbledCircuit& F) {
  Writer w;
  w.raw(ByteView(kMagic, 4)).u16(static_cast<std::uint16_t>(F.k));
  w.u32(static_cast<std::uint32_t>(F.table_rows() / 3)).u32(static_cast<std::uint32_t>(F.const_labels.size()));
  w.raw(F.digest);
  Bytes out = std::move(w).bytes();
  out.reserve(out.size() + F.tables.size() + F.const_labels.size() * token_bytes(F.k));
  append(out, F.tables);
  for (const auto& l : F.const_labels) write_token(out, l, F.k);
  return out;
}

GarbledCircuit deserialize_garbled(ByteView in, std::shared_ptr<const Circuit> c, const std::optional<Digest>& digest) {
  Reader r(in);
  ByteView magic = r.raw(4);
  if (!std::equal(magic.begin(), magic.end(), kMagic)) throw GarblingError("not a garbled circuit record");
  GarbledCircuit F;
  F.k = r.u16();
  check_k(F.k);
  const std::size_t rb = token_bytes(F.k);
  std::uint32_t gates = r.u32(), consts = r.u32();
  ByteView dg = r.raw(32);
  std::copy(dg.begin(), dg.end(), F.digest.begin());
  Digest expect = digest ? *digest : circuit_digest(*c);
  if (expect != F.digest) throw GarblingError("garbled circuit was built for a different circuit");
  if (gates != c->nonlinear_count() || consts != c->count(GateKind::CONST)) throw GarblingError("garbled circuit gate counts do not match");
  ByteView rows = r.raw(std::size_t(gates) * 3 * rb);
  F.tables.assign(rows.begin(), rows.end());
  F.const_labels.reserve(consts);
  for (std::uint32_t i = 0; i < consts; ++i) F.const_labels.push_back(read_token(r.raw(rb), F.k));
  r.expect_done();
  F.circuit = std::move(c);
  return F;
}

Bytes serialize_tokens(const std::vector<Label>& X, unsigned k) {
  check_k(k);
  Writer w;
  w.u16(static_cast<std::uint16_t>(k)).u32(static_cast<std::uint32_t>(X.size()));
  Bytes out = std::move(w).bytes();
  out.reserve(out.size() + X.size() * token_bytes(k));
  for (const auto& l : X) write_token(out, l, k);
  return out;
}

std::vector<Label> deserialize_tokens(ByteView in, unsigned k) {
  Reader r(in);
  if (r.u16() != k) throw GarblingError("token record has a different security parameter");
  std::uint32_t n = r.u32();
  if (r.remaining() != std::size_t(n) * token_bytes(k)) throw GarblingError("token record has the wrong length");
  std::vector<Label> X;
  X.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) X.push_back(read_token(r.raw(token_bytes(k)), k));
  return X;
}

Bytes serialize_decoding(const DecodingInfo& d) {
  Writer w;
  w.u16(static_cast<std::uint16_t>(d.k)).u32(static_cast<std::uint32_t>(d.entries.size()));
  for (const auto& [h0, h1] : d.entries) w.raw(h0).raw(h1);
  return std::move(w).bytes();
}

DecodingInfo deserialize_decoding(ByteView in) {
  Reader r(in);
  DecodingInfo d;
  d.k = r.u16();
  check_k(d.k);
  std::uint32_t n = r.u32();
  if (r.remaining() != std::size_t(n) * 64) throw GarblingError("decoding record has the wrong length");
  d.entries.resize(n);
  for (auto& [h0, h1] : d.entries) {
    ByteView a = r.raw(32), b = r.raw(32);
    std::copy(a.begin(), a.end(), h0.begin());
    std::copy(b.begin(), b.end(), h1.begin());
  }
  return d;
}

}  // namespace hsfe
