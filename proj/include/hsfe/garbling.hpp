#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "hsfe/bytes.hpp"
#include "hsfe/circuit.hpp"
#include "hsfe/hash.hpp"
#include "hsfe/random.hpp"

namespace hsfe {

// A wire token. Only the first k/8 bytes are meaningful; the rest stay zero.
// The permute bit is bit 0 of byte 0.
struct Label {
  std::uint64_t lo = 0, hi = 0;

  bool permute_bit() const { return lo & 1; }
  Label operator^(const Label& o) const { return {lo ^ o.lo, hi ^ o.hi}; }
  Label& operator^=(const Label& o) {
    lo ^= o.lo;
    hi ^= o.hi;
    return *this;
  }
  bool operator==(const Label&) const = default;
};

// Token encoding on the wire: k/8 label bytes then one permute byte.
std::size_t token_bytes(unsigned k);
void write_token(Bytes& out, const Label& l, unsigned k);
Label read_token(ByteView in, unsigned k);  // throws GarblingError on a malformed token

using GarbledInput = std::vector<Label>;
using GarbledOutput = std::vector<Label>;

struct EncodingInfo {
  unsigned k = 128;
  std::uint32_t alice_bits = 0;
  std::vector<std::pair<Label, Label>> pairs;  // one per input wire, Alice's first
};

struct DecodingInfo {
  unsigned k = 128;
  // Hashes of both tokens of each output wire, indexed by semantic bit.
  std::vector<std::pair<Digest, Digest>> entries;
};

struct GarbledCircuit {
  unsigned k = 128;
  std::shared_ptr<const Circuit> circuit;
  Digest digest{};
  Bytes tables;                   // 3 rows of k/8+1 bytes per AND/OR gate, gate order
  std::vector<Label> const_labels;  // active token of each CONST gate, gate order

  std::size_t table_rows() const { return tables.size() / (k / 8 + 1); }
};

struct Garbling {
  GarbledCircuit F;
  EncodingInfo e;
  DecodingInfo d;
};

// Diagnostic hooks used by the structural tests.
struct GarbleTrace {
  Label delta;
  std::vector<Label> zero_labels;  // token for semantic 0 on every wire
};

// `digest` may be supplied when the caller already hashed the circuit.
Garbling garble(std::shared_ptr<const Circuit> c, unsigned k, RandomSource& rng, GarbleTrace* trace = nullptr,
                const std::optional<Digest>& digest = std::nullopt);

GarbledInput encode_a(const EncodingInfo& e, std::span<const std::uint8_t> a);
GarbledInput encode_b(const EncodingInfo& e, std::span<const std::uint8_t> b);
GarbledInput encode(const EncodingInfo& e, std::span<const std::uint8_t> x);

// X holds one token per input wire. all_wires, when given, receives the
// active token of every wire.
GarbledOutput evaluate(const GarbledCircuit& F, const GarbledInput& X, std::vector<Label>* all_wires = nullptr);

// nullopt when some token matches neither entry of its wire.
std::optional<BitVec> decode(const DecodingInfo& d, const GarbledOutput& Y);

// Length-prefixed binary records shared by both parties.
Bytes serialize_garbled(const GarbledCircuit& F);
GarbledCircuit deserialize_garbled(ByteView in, std::shared_ptr<const Circuit> c, const std::optional<Digest>& digest = std::nullopt);
Bytes serialize_tokens(const std::vector<Label>& X, unsigned k);
std::vector<Label> deserialize_tokens(ByteView in, unsigned k);
Bytes serialize_decoding(const DecodingInfo& d);
DecodingInfo deserialize_decoding(ByteView in);

}  // namespace hsfe
