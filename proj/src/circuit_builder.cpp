#include "hsfe/circuit_builder.hpp"

#include <algorithm>

#include "hsfe/errors.hpp"

namespace hsfe {

CircuitBuilder::CircuitBuilder(std::uint32_t alice_bits, std::uint32_t bob_bits)
    : alice_bits_(alice_bits), bob_bits_(bob_bits), next_(alice_bits + bob_bits) {
  if (std::uint64_t(alice_bits) + bob_bits >= kMaxWires) throw CircuitError("input width exceeds wire budget");
}

Wire CircuitBuilder::alice(std::uint32_t i) const {
  if (i >= alice_bits_) throw CircuitError("Alice input index out of range");
  return i;
}

Wire CircuitBuilder::bob(std::uint32_t i) const {
  if (i >= bob_bits_) throw CircuitError("Bob input index out of range");
  return alice_bits_ + i;
}

Word CircuitBuilder::alice_word(std::uint32_t offset, std::uint32_t width) const {
  Word w(width);
  for (std::uint32_t i = 0; i < width; ++i) w[i] = alice(offset + i);
  return w;
}

Word CircuitBuilder::bob_word(std::uint32_t offset, std::uint32_t width) const {
  Word w(width);
  for (std::uint32_t i = 0; i < width; ++i) w[i] = bob(offset + i);
  return w;
}

Wire CircuitBuilder::fresh() {
  if (next_ >= kMaxWires) throw CircuitError("circuit exceeds the wire budget of " + std::to_string(kMaxWires));
  return next_++;
}

Wire CircuitBuilder::emit(GateKind k, Wire a, Wire b) {
  Wire out = fresh();
  gates_.push_back(Gate{k, a, b, out});
  return out;
}

Wire CircuitBuilder::zero() {
  if (!zero_) zero_ = emit(GateKind::CONST, 0, 0);
  return *zero_;
}

Wire CircuitBuilder::one() {
  if (!one_) one_ = emit(GateKind::CONST, 1, 0);
  return *one_;
}

Word CircuitBuilder::constant(std::uint64_t v, std::size_t width) {
  Word w(width);
  for (std::size_t i = 0; i < width; ++i) w[i] = (i < 64 && (v >> i) & 1) ? one() : zero();
  return w;
}

Wire CircuitBuilder::XOR(Wire a, Wire b) { return emit(GateKind::XOR, a, b); }
Wire CircuitBuilder::AND(Wire a, Wire b) { return emit(GateKind::AND, a, b); }
Wire CircuitBuilder::OR(Wire a, Wire b) { return emit(GateKind::OR, a, b); }
Wire CircuitBuilder::NOT(Wire a) { return emit(GateKind::NOT, a, 0); }

Wire CircuitBuilder::mux(Wire s, Wire x, Wire y) { return XOR(y, AND(s, XOR(x, y))); }

Word CircuitBuilder::mux(Wire s, const Word& x, const Word& y) {
  if (x.size() != y.size()) throw CircuitError("mux width mismatch");
  Word out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = mux(s, x[i], y[i]);
  return out;
}

Word CircuitBuilder::add(const Word& a, const Word& b, bool carry_out) {
  if (a.size() != b.size()) throw CircuitError("add width mismatch");
  Word s;
  if (a.empty()) return carry_out ? Word{zero()} : s;
  s.reserve(a.size() + 1);
  s.push_back(XOR(a[0], b[0]));
  if (a.size() == 1 && !carry_out) return s;
  Wire c = AND(a[0], b[0]);
  for (std::size_t i = 1; i < a.size(); ++i) {
    Wire ac = XOR(a[i], c);
    s.push_back(XOR(ac, b[i]));
    if (i + 1 < a.size() || carry_out) c = XOR(c, AND(ac, XOR(b[i], c)));
  }
  if (carry_out) s.push_back(c);
  return s;
}

Wire CircuitBuilder::lt(const Word& a, const Word& b) {
  if (a.size() != b.size()) throw CircuitError("lt width mismatch");
  if (a.empty()) return zero();
  // c is the carry of a + ~b + 1, which is set iff a >= b.
  Wire c = NOT(AND(NOT(a[0]), b[0]));
  for (std::size_t i = 1; i < a.size(); ++i) {
    Wire nb = NOT(b[i]);
    c = XOR(c, AND(XOR(a[i], c), XOR(nb, c)));
  }
  return NOT(c);
}

Wire CircuitBuilder::eq(const Word& a, const Word& b) {
  if (a.size() != b.size()) throw CircuitError("eq width mismatch");
  if (a.empty()) return one();
  Wire diff = XOR(a[0], b[0]);
  for (std::size_t i = 1; i < a.size(); ++i) diff = OR(diff, XOR(a[i], b[i]));
  return NOT(diff);
}

std::vector<Wire> CircuitBuilder::decoder(const Word& idx, std::size_t n) {
  if (idx.empty()) return std::vector<Wire>(std::min<std::size_t>(n, 1), one());
  std::vector<Wire> cur{NOT(idx.back()), idx.back()};
  for (std::size_t k = idx.size() - 1; k-- > 0;) {
    // Only prefixes that can still lead to a value below n are expanded.
    std::size_t remaining = k + 1;
    std::vector<Wire> next;
    next.reserve(cur.size() * 2);
    for (std::size_t p = 0; p < cur.size(); ++p) {
      std::uint64_t lo = std::uint64_t(p) << remaining;
      if (lo >= n) break;
      Wire hi = AND(cur[p], idx[k]);
      next.push_back(XOR(cur[p], hi));
      next.push_back(hi);
    }
    cur.swap(next);
  }
  cur.resize(std::min(cur.size(), n));
  return cur;
}

Circuit CircuitBuilder::build() {
  Circuit c;
  c.wire_count = next_;
  c.alice_bits = alice_bits_;
  c.bob_bits = bob_bits_;
  c.outputs = std::move(outputs_);
  c.gates = std::move(gates_);
  gates_.clear();
  outputs_.clear();
  return c;
}

std::uint32_t bits_for(std::uint64_t max_value) {
  std::uint32_t b = 1;
  while (b < 64 && (max_value >> b) != 0) ++b;
  return b;
}

Circuit gen_millionaires(std::uint32_t n) {
  if (n == 0) throw CircuitError("millionaires width must be positive");
  CircuitBuilder cb(n, n);
  Word a(n), b(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    a[i] = cb.alice(n - 1 - i);
    b[i] = cb.bob(n - 1 - i);
  }
  cb.output(cb.lt(b, a));
  return cb.build();
}

namespace {

// XOR_i (sel[i] & words[i]) for a one-hot selector.
Word select_word(CircuitBuilder& cb, const std::vector<Wire>& sel, const std::vector<Word>& words, std::size_t width) {
  Word acc;
  for (std::size_t i = 0; i < sel.size(); ++i) {
    Word term(width);
    for (std::size_t j = 0; j < width; ++j) term[j] = cb.AND(sel[i], words[i][j]);
    if (acc.empty()) {
      acc = std::move(term);
    } else {
      for (std::size_t j = 0; j < width; ++j) acc[j] = cb.XOR(acc[j], term[j]);
    }
  }
  if (acc.empty()) acc = cb.constant(0, width);
  return acc;
}

void check_budget(std::uint64_t estimate) {
  if (estimate >= kMaxWires) throw CircuitError("requested circuit needs about " + std::to_string(estimate) + " wires, over the budget of " + std::to_string(kMaxWires));
}

}  // namespace

Circuit gen_select(std::uint32_t entries, std::uint32_t entry_bits, std::uint32_t queries) {
  if (entries == 0 || entry_bits == 0) throw CircuitError("select needs at least one entry and one bit");
  const std::uint32_t ib = bits_for(entries - 1);
  check_budget(std::uint64_t(entries) * entry_bits * (queries + 1) * 2 + std::uint64_t(entries) * ib);
  CircuitBuilder cb(entries * entry_bits, queries * ib);
  std::vector<Word> db(entries);
  for (std::uint32_t i = 0; i < entries; ++i) db[i] = cb.alice_word(i * entry_bits, entry_bits);
  for (std::uint32_t q = 0; q < queries; ++q) {
    auto sel = cb.decoder(cb.bob_word(q * ib, ib), entries);
    cb.output(select_word(cb, sel, db, entry_bits));
  }
  return cb.build();
}

Circuit gen_database_ops(std::uint32_t entries, std::uint32_t entry_bits, std::uint32_t queries) {
  if (entries == 0 || entry_bits == 0) throw CircuitError("database needs at least one entry and one bit");
  const std::uint32_t ib = bits_for(entries - 1);
  const std::uint64_t per_query = 1 + ib + entry_bits;
  check_budget(std::uint64_t(entries) * entry_bits * (3 * std::uint64_t(queries) + 1) + per_query * queries);
  CircuitBuilder cb(entries * entry_bits, static_cast<std::uint32_t>(per_query * queries));
  std::vector<Word> db(entries);
  for (std::uint32_t i = 0; i < entries; ++i) db[i] = cb.alice_word(i * entry_bits, entry_bits);
  for (std::uint32_t q = 0; q < queries; ++q) {
    const auto off = static_cast<std::uint32_t>(q * per_query);
    Wire is_set = cb.bob(off);
    auto sel = cb.decoder(cb.bob_word(off + 1, ib), entries);
    Word value = cb.bob_word(off + 1 + ib, entry_bits);
    Word got = select_word(cb, sel, db, entry_bits);
    Wire is_select = cb.NOT(is_set);
    for (auto& bit : got) bit = cb.AND(bit, is_select);
    cb.output(got);
    // The last query's writes are never read.
    if (q + 1 == queries) break;
    for (std::uint32_t i = 0; i < entries; ++i) db[i] = cb.mux(cb.AND(sel[i], is_set), value, db[i]);
  }
  return cb.build();
}

namespace {

Word slice(const Word& w, std::size_t from, std::size_t len) { return Word(w.begin() + from, w.begin() + from + len); }

// dist_v <- min(dist_v, dist_u + w), pred_v follows. The sum is computed one
// bit wider so an overflow (in particular an unreachable all-ones dist_u)
// never counts as an improvement.
void relax(CircuitBuilder& cb, Word& dist_v, Word& pred_v, const Word& dist_u, const Word& w, const Word& code_u) {
  Word cand = cb.add(dist_u, w, true);
  Word cur = dist_v;
  cur.push_back(cb.zero());
  Wire better = cb.lt(cand, cur);
  dist_v = cb.mux(better, slice(cand, 0, dist_v.size()), dist_v);
  pred_v = cb.mux(better, code_u, pred_v);
}

Word all_ones(CircuitBuilder& cb, std::size_t width) { return Word(width, cb.one()); }

Word extend(CircuitBuilder& cb, Word w, std::size_t width) {
  while (w.size() < width) w.push_back(cb.zero());
  return w;
}

}  // namespace

SensitiveCircuitLayout sensitive_layout(const SensitiveGraphConfig& cfg) {
  SensitiveCircuitLayout l;
  l.boundary = static_cast<std::uint32_t>(cfg.boundary_node.size());
  l.nodes = cfg.nodes;
  l.weight_bits = cfg.weight_bits;
  l.index_bits = bits_for(l.boundary);
  l.node_bits = bits_for(cfg.nodes);
  return l;
}

Circuit gen_dijkstra_sensitive(const SensitiveGraphConfig& cfg) {
  const auto L = sensitive_layout(cfg);
  const std::uint32_t E = L.boundary, S = L.nodes, W = L.weight_bits;
  if (W == 0 || W > 62) throw CircuitError("weight width must be in 1..62");
  if (E > 0 && S == 0) throw CircuitError("boundary edges need a sensitive node to attach to");
  for (auto [u, v] : cfg.edges)
    if (u >= S || v >= S) throw CircuitError("sensitive edge endpoint out of range");
  for (auto v : cfg.boundary_node)
    if (v >= S) throw CircuitError("boundary node out of range");
  const std::uint64_t m = cfg.edges.size();
  check_budget((std::uint64_t(S) * 2 * m + 2 * E) * (10ull * W + 40) + std::uint64_t(S) * S * 40);

  const std::uint32_t alice_bits = (2 * E + 1) * W;
  const std::uint32_t bob_bits = static_cast<std::uint32_t>((m + E) * W);
  CircuitBuilder cb(alice_bits, bob_bits);
  std::vector<Word> din(E), dout(E), bw(E), w(m);
  for (std::uint32_t e = 0; e < E; ++e) {
    din[e] = cb.alice_word(e * W, W);
    dout[e] = cb.alice_word((E + e) * W, W);
    bw[e] = cb.bob_word(static_cast<std::uint32_t>((m + e) * W), W);
  }
  Word direct = cb.alice_word(2 * E * W, W);
  for (std::uint64_t i = 0; i < m; ++i) w[i] = cb.bob_word(static_cast<std::uint32_t>(i * W), W);

  // Predecessor code: low bits index, top bit set when the predecessor is a
  // boundary edge rather than a region node.
  const std::uint32_t low = std::max(L.node_bits, L.index_bits);
  const std::uint32_t pw = low + 1;
  auto node_code = [&](std::uint32_t u) { return cb.constant(u, pw); };
  auto entry_code = [&](std::uint32_t e) { return cb.constant(e | (std::uint64_t(1) << low), pw); };

  std::vector<Word> dist(S, all_ones(cb, W)), pred(S, all_ones(cb, pw));
  for (std::uint32_t e = 0; e < E; ++e) {
    std::uint32_t v = cfg.boundary_node[e];
    relax(cb, dist[v], pred[v], din[e], bw[e], entry_code(e));
  }
  for (std::uint32_t round = 0; round + 1 < S; ++round) {
    for (std::uint64_t i = 0; i < m; ++i) {
      auto [u, v] = cfg.edges[i];
      relax(cb, dist[v], pred[v], dist[u], w[i], node_code(u));
      relax(cb, dist[u], pred[u], dist[v], w[i], node_code(v));
    }
  }

  Word best = direct;
  Word exit = all_ones(cb, L.index_bits);
  for (std::uint32_t e = 0; e < E; ++e) {
    Word t = cb.add(cb.add(dist[cfg.boundary_node[e]], bw[e], true), extend(cb, dout[e], W + 1), true);
    Word cur = extend(cb, best, W + 2);
    Wire better = cb.lt(t, cur);
    best = cb.mux(better, slice(t, 0, W), best);
    exit = cb.mux(better, cb.constant(e, L.index_bits), exit);
  }

  // Walk predecessors from the exit node back to the entering boundary edge.
  auto exit_sel = cb.decoder(exit, E);
  Wire active = cb.zero();
  Word cur(L.node_bits, cb.zero());
  for (std::uint32_t e = 0; e < E; ++e) {
    active = cb.XOR(active, exit_sel[e]);
    for (std::uint32_t j = 0; j < L.node_bits; ++j)
      if ((cfg.boundary_node[e] >> j) & 1) cur[j] = cb.XOR(cur[j], exit_sel[e]);
  }
  Word entry = all_ones(cb, L.index_bits);
  const Word ones_node = all_ones(cb, L.node_bits);
  std::vector<Word> path;
  for (std::uint32_t t = 0; t < S; ++t) {
    path.push_back(cb.mux(active, cur, ones_node));
    auto sel = cb.decoder(cur, S);
    Word p = select_word(cb, sel, pred, pw);
    Wire at_entry = cb.AND(active, p[low]);
    entry = cb.mux(at_entry, slice(p, 0, L.index_bits), entry);
    active = cb.AND(active, cb.NOT(p[low]));
    cur = slice(p, 0, L.node_bits);
  }

  cb.output(exit);
  cb.output(entry);
  for (const auto& n : path) cb.output(n);
  cb.output(best);
  return cb.build();
}

Circuit gen_dijkstra_full(const FullGraphConfig& cfg) {
  const std::uint32_t V = cfg.nodes, W = cfg.weight_bits;
  if (V == 0 || W == 0 || W > 62) throw CircuitError("graph needs nodes and a weight width in 1..62");
  for (auto [u, v] : cfg.edges)
    if (u >= V || v >= V) throw CircuitError("edge endpoint out of range");
  const std::uint32_t nb = bits_for(V);
  const std::uint64_t m = cfg.edges.size();
  check_budget(std::uint64_t(V) * 2 * m * (10ull * W + 4 * nb + 8) + std::uint64_t(V) * V * (2 * nb + 4) + std::uint64_t(V) * W * 2);

  CircuitBuilder cb(2 * nb, static_cast<std::uint32_t>(m * W));
  Word start = cb.alice_word(0, nb), end = cb.alice_word(nb, nb);
  std::vector<Word> w(m);
  for (std::uint64_t i = 0; i < m; ++i) w[i] = cb.bob_word(static_cast<std::uint32_t>(i * W), W);

  auto start_sel = cb.decoder(start, V);
  std::vector<Word> dist(V), pred(V, all_ones(cb, nb));
  for (std::uint32_t v = 0; v < V; ++v) dist[v] = Word(W, cb.NOT(start_sel[v]));
  std::vector<Word> code(V);
  for (std::uint32_t v = 0; v < V; ++v) code[v] = cb.constant(v, nb);

  for (std::uint32_t round = 0; round + 1 < V; ++round) {
    for (std::uint64_t i = 0; i < m; ++i) {
      auto [u, v] = cfg.edges[i];
      relax(cb, dist[v], pred[v], dist[u], w[i], code[u]);
      relax(cb, dist[u], pred[u], dist[v], w[i], code[v]);
    }
  }

  auto end_sel = cb.decoder(end, V);
  Word cost = select_word(cb, end_sel, dist, W);
  // Reachable iff the cost is not all ones.
  Wire unreachable = cb.one();
  for (auto bit : cost) unreachable = cb.AND(unreachable, bit);
  Wire active = cb.NOT(unreachable);
  Word cur = end;
  const Word ones_node = all_ones(cb, nb);
  std::vector<Word> path;
  for (std::uint32_t t = 0; t < V; ++t) {
    path.push_back(cb.mux(active, cur, ones_node));
    active = cb.AND(active, cb.NOT(cb.eq(cur, start)));
    auto sel = cb.decoder(cur, V);
    cur = select_word(cb, sel, pred, nb);
  }

  cb.output(cost);
  for (const auto& n : path) cb.output(n);
  return cb.build();
}

}  // namespace hsfe
