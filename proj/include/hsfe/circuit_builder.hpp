#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "hsfe/circuit.hpp"

namespace hsfe {

using Wire = std::uint32_t;
using Word = std::vector<Wire>;  // least significant bit first

// Appends gates in topological order. Every arithmetic helper costs one
// AND per bit, XOR and NOT are free under free-XOR garbling.
class CircuitBuilder {
 public:
  CircuitBuilder(std::uint32_t alice_bits, std::uint32_t bob_bits);

  Wire alice(std::uint32_t i) const;
  Wire bob(std::uint32_t i) const;
  Word alice_word(std::uint32_t offset, std::uint32_t width) const;
  Word bob_word(std::uint32_t offset, std::uint32_t width) const;

  Wire zero();
  Wire one();
  Word constant(std::uint64_t v, std::size_t width);

  Wire XOR(Wire a, Wire b);
  Wire AND(Wire a, Wire b);
  Wire OR(Wire a, Wire b);
  Wire NOT(Wire a);

  // s ? x : y
  Wire mux(Wire s, Wire x, Wire y);
  Word mux(Wire s, const Word& x, const Word& y);

  // Sum of equal-width words. With carry_out the result is one bit wider.
  Word add(const Word& a, const Word& b, bool carry_out = false);
  Wire lt(const Word& a, const Word& b);  // unsigned a < b
  Wire eq(const Word& a, const Word& b);
  // one-hot[i] = (idx == i) for i < n
  std::vector<Wire> decoder(const Word& idx, std::size_t n);

  void output(Wire w) { outputs_.push_back(w); }
  void output(const Word& w) { outputs_.insert(outputs_.end(), w.begin(), w.end()); }

  std::size_t gate_count() const { return gates_.size(); }
  Circuit build();

 private:
  Wire fresh();
  Wire emit(GateKind k, Wire a, Wire b);
  std::uint32_t alice_bits_, bob_bits_, next_;
  std::vector<Gate> gates_;
  std::vector<Wire> outputs_;
  std::optional<Wire> zero_, one_;
};

// Bit width needed to encode values 0..max_value.
std::uint32_t bits_for(std::uint64_t max_value);

// a > b over n-bit unsigned integers. Inputs are MSB first so the bitstring
// "0110" is 6. Ties output 0.
Circuit gen_millionaires(std::uint32_t n);

// Alice holds `entries` words of `entry_bits` (entry i at offset i*entry_bits,
// LSB first). Bob holds `queries` indices of bits_for(entries-1) bits each,
// LSB first. Output: the selected entries in query order; an index >= entries
// selects 0.
Circuit gen_select(std::uint32_t entries, std::uint32_t entry_bits = 64, std::uint32_t queries = 1);

// Database over Alice's table. Every query has the same shape, so the circuit
// depends only on the table size and the query count. Bob holds per query a
// set flag, an index of bits_for(entries-1) bits and a value word (all LSB
// first). A select outputs the entry, a set writes the value and outputs 0.
// An index >= entries selects 0 and writes nothing.
Circuit gen_database_ops(std::uint32_t entries, std::uint32_t entry_bits, std::uint32_t queries);

// Sensitive region of a routing instance. Local node ids are 0..nodes-1;
// each boundary edge joins an outside node to boundary_node[e].
struct SensitiveGraphConfig {
  std::uint32_t nodes = 0;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;  // undirected
  std::vector<std::uint32_t> boundary_node;
  std::uint32_t weight_bits = 32;
};

// Layout of gen_dijkstra_sensitive.
//   Alice: din[E], dout[E], direct  (each weight_bits, LSB first)
//   Bob:   w[edges], bw[E]          (each weight_bits, LSB first)
// din[e] is the outside cost from the start to the outer end of boundary e,
// bw[e] the weight of boundary edge e (paid on entering and on leaving),
// dout[e] from the outer end of e to the destination, direct the cost that
// avoids the region. The all-ones value means unreachable.
//   Output: exit (bits_for(E)), entry (bits_for(E)), path[nodes]
//   (bits_for(nodes) each, walked from exit node back to entry node),
//   cost (weight_bits). When the best route avoids the region exit, entry and
//   every path slot are all ones.
struct SensitiveCircuitLayout {
  std::uint32_t boundary, nodes, weight_bits, index_bits, node_bits;
};
SensitiveCircuitLayout sensitive_layout(const SensitiveGraphConfig& cfg);
Circuit gen_dijkstra_sensitive(const SensitiveGraphConfig& cfg);

// Whole-graph shortest path for the pure garbled-circuit mode.
//   Alice: start, end (node_bits each)
//   Bob:   w[edges] (weight_bits each)
//   Output: cost (weight_bits), path[nodes] (node_bits each, from end back to
//   start, all ones after the start). Unreachable end yields cost all ones.
struct FullGraphConfig {
  std::uint32_t nodes = 0;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;  // undirected
  std::uint32_t weight_bits = 32;
};
Circuit gen_dijkstra_full(const FullGraphConfig& cfg);

}  // namespace hsfe
