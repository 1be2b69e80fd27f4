#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "hsfe/bytes.hpp"
#include "hsfe/hash.hpp"

namespace hsfe {

enum class GateKind : std::uint8_t { XOR, AND, OR, NOT, CONST };

std::string_view gate_kind_name(GateKind k);

// For CONST gates in0 holds the constant bit and in1 is unused.
// For NOT gates in1 is unused.
struct Gate {
  GateKind kind;
  std::uint32_t in0 = 0;
  std::uint32_t in1 = 0;
  std::uint32_t out = 0;
};

// Input wires are 0 .. alice_bits+bob_bits-1, Alice's first.
struct Circuit {
  std::uint32_t wire_count = 0;
  std::uint32_t alice_bits = 0;
  std::uint32_t bob_bits = 0;
  std::vector<std::uint32_t> outputs;
  std::vector<Gate> gates;

  std::uint32_t input_count() const { return alice_bits + bob_bits; }
  std::size_t count(GateKind k) const;
  // AND + OR: the gates that cost garbled-table rows.
  std::size_t nonlinear_count() const;

  // Throws CircuitError on any topology or arity violation.
  void validate() const;
};

Circuit parse_circuit(std::string_view text);
std::string serialize_circuit(const Circuit& c);

// Hash of the canonical binary form; binds garbled material to a topology.
Digest circuit_digest(const Circuit& c);

BitVec eval_plain(const Circuit& c, std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);

// Generators refuse to build anything larger than this many wires.
inline constexpr std::uint32_t kMaxWires = 1u << 28;

}  // namespace hsfe
