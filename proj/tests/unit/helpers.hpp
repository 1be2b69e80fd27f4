#pragma once

#include <random>

#include "hsfe/circuit.hpp"
#include "hsfe/random.hpp"

namespace hsfe::testing {

// Random well-formed circuit mixing every gate kind.
inline Circuit random_circuit(std::mt19937_64& gen, std::uint32_t alice, std::uint32_t bob, std::uint32_t gates,
                              std::uint32_t outputs) {
  Circuit c;
  c.alice_bits = alice;
  c.bob_bits = bob;
  std::uint32_t next = alice + bob;
  for (std::uint32_t i = 0; i < gates; ++i) {
    Gate g;
    std::uint32_t r = gen() % 100;
    g.kind = r < 35 ? GateKind::XOR : r < 65 ? GateKind::AND : r < 85 ? GateKind::OR : r < 97 ? GateKind::NOT : GateKind::CONST;
    if (next == 0) g.kind = GateKind::CONST;
    if (g.kind == GateKind::CONST) {
      g.in0 = gen() & 1;
    } else {
      g.in0 = static_cast<std::uint32_t>(gen() % next);
      g.in1 = static_cast<std::uint32_t>(gen() % next);
      if (g.kind == GateKind::NOT) g.in1 = 0;
    }
    g.out = next++;
    c.gates.push_back(g);
  }
  c.wire_count = next;
  for (std::uint32_t i = 0; i < outputs; ++i) c.outputs.push_back(next - 1 - static_cast<std::uint32_t>(gen() % std::min<std::uint32_t>(next, gates ? gates : next)));
  return c;
}

inline BitVec random_bits(std::mt19937_64& gen, std::size_t n) {
  BitVec b(n);
  for (auto& x : b) x = gen() & 1;
  return b;
}

inline BitVec msb_bits(std::uint64_t v, std::size_t n) {
  BitVec b(n);
  for (std::size_t i = 0; i < n; ++i) b[i] = (v >> (n - 1 - i)) & 1;
  return b;
}

}  // namespace hsfe::testing
