#include <gtest/gtest.h>

#include <map>
#include <queue>
#include <random>

#include "helpers.hpp"
#include "hsfe/circuit.hpp"
#include "hsfe/circuit_builder.hpp"
#include "hsfe/errors.hpp"

using namespace hsfe;
using hsfe::testing::msb_bits;
using hsfe::testing::random_bits;

TEST(Circuit, ParsesSmallestCircuit) {
  auto c = parse_circuit("wires 3 inA 1 inB 1 out 2\nXOR 0 1 2\n");
  EXPECT_EQ(c.gates.size(), 1u);
  EXPECT_EQ(c.alice_bits, 1u);
  EXPECT_EQ(c.bob_bits, 1u);
  EXPECT_EQ(eval_plain(c, BitVec{1}, BitVec{1}), BitVec{0});
  EXPECT_EQ(eval_plain(c, BitVec{1}, BitVec{0}), BitVec{1});
}

TEST(Circuit, CommentsAndBlankLines) {
  auto c = parse_circuit("# header next\n\nwires 4 inA 1 inB 0 out 3  # one output\nCONST 0 1\nNOT 1 2\nAND 0 2 3\n");
  EXPECT_EQ(eval_plain(c, BitVec{1}, BitVec{}), BitVec{1});
}

TEST(Circuit, NotOfConstZeroIsOne) {
  auto c = parse_circuit("wires 2 inA 0 inB 0 out 1\nCONST 0 0\nNOT 0 1\n");
  EXPECT_EQ(eval_plain(c, BitVec{}, BitVec{}), BitVec{1});
}

TEST(Circuit, RejectsWireBeyondCount) {
  try {
    parse_circuit("wires 3 inA 1 inB 1 out 2\nXOR 0 99 2\n");
    FAIL();
  } catch (const CircuitError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(Circuit, RejectsUseBeforeDefinition) {
  EXPECT_THROW(parse_circuit("wires 4 inA 1 inB 1 out 3\nAND 0 3 2\nXOR 0 1 3\n"), CircuitError);
}

TEST(Circuit, RejectsDuplicateOutput) {
  try {
    parse_circuit("wires 3 inA 1 inB 1 out 2\nXOR 0 1 2\nAND 0 1 2\n");
    FAIL();
  } catch (const CircuitError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(Circuit, RejectsSyntaxErrorsWithLine) {
  try {
    parse_circuit("wires 3 inA 1 inB 1 out 2\nNAND 0 1 2\n");
    FAIL();
  } catch (const CircuitError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(parse_circuit("wires x inA 1 inB 1 out 2\n"), CircuitError);
  EXPECT_THROW(parse_circuit("wires 3 inA 1 inB 1 out 2\nXOR 0 2\n"), CircuitError);
  EXPECT_THROW(parse_circuit(""), CircuitError);
  EXPECT_THROW(parse_circuit("wires 3 inA 1 inB 1 out 2\n"), CircuitError);  // output never defined
}

TEST(Circuit, EvalRejectsLengthMismatch) {
  auto c = parse_circuit("wires 3 inA 1 inB 1 out 2\nXOR 0 1 2\n");
  EXPECT_THROW(eval_plain(c, BitVec{1, 0}, BitVec{1}), CircuitError);
  EXPECT_THROW(eval_plain(c, BitVec{1}, BitVec{}), CircuitError);
}

TEST(Circuit, EvalAssertsOnUndefinedWire) {
  Circuit c;
  c.wire_count = 4;
  c.alice_bits = 1;
  c.bob_bits = 1;
  c.gates.push_back({GateKind::AND, 0, 3, 2});
  c.outputs = {2};
  EXPECT_THROW(eval_plain(c, BitVec{1}, BitVec{1}), CircuitError);
}

TEST(Circuit, SerializeParseFixedPoint) {
  std::mt19937_64 gen(7);
  for (int t = 0; t < 50; ++t) {
    auto c = hsfe::testing::random_circuit(gen, 3, 4, 60, 5);
    c.validate();
    std::string s = serialize_circuit(c);
    auto c2 = parse_circuit(s);
    EXPECT_EQ(serialize_circuit(c2), s);
    EXPECT_EQ(circuit_digest(c2), circuit_digest(c));
  }
}

TEST(Generators, MillionairesExhaustiveFourBits) {
  auto c = gen_millionaires(4);
  EXPECT_EQ(c.alice_bits, 4u);
  EXPECT_EQ(c.bob_bits, 4u);
  EXPECT_EQ(c.outputs.size(), 1u);
  for (unsigned a = 0; a < 16; ++a)
    for (unsigned b = 0; b < 16; ++b) EXPECT_EQ(eval_plain(c, msb_bits(a, 4), msb_bits(b, 4))[0], a > b ? 1 : 0) << a << " " << b;
  EXPECT_EQ(eval_plain(c, parse_bitstring("0110"), parse_bitstring("0011")), BitVec{1});
}

TEST(Generators, MillionairesOneBit) {
  auto c = gen_millionaires(1);
  EXPECT_EQ(eval_plain(c, BitVec{1}, BitVec{0}), BitVec{1});
  EXPECT_EQ(eval_plain(c, BitVec{1}, BitVec{1}), BitVec{0});
}

TEST(Generators, MillionairesRandomWide) {
  auto c = gen_millionaires(64);
  std::mt19937_64 gen(11);
  for (int t = 0; t < 1000; ++t) {
    std::uint64_t a = gen(), b = t % 10 == 0 ? a : gen();
    EXPECT_EQ(eval_plain(c, msb_bits(a, 64), msb_bits(b, 64))[0], a > b ? 1 : 0);
  }
}

TEST(Generators, SelectIndexesArray) {
  auto c = gen_select(4, 64);
  std::vector<std::uint64_t> db{10, 20, 30, 40};
  BitVec a;
  for (auto v : db) {
    auto bits = u64_to_bits_lsb(v, 64);
    a.insert(a.end(), bits.begin(), bits.end());
  }
  for (unsigned idx = 0; idx < 4; ++idx) EXPECT_EQ(bits_to_u64_lsb(eval_plain(c, a, u64_to_bits_lsb(idx, 2))), db[idx]);
}

TEST(Generators, SelectRandomMultiQuery) {
  std::mt19937_64 gen(3);
  for (std::uint32_t n : {1u, 2u, 5u, 7u, 8u, 13u}) {
    const std::uint32_t ib = bits_for(n - 1);
    auto c = gen_select(n, 8, 3);
    for (int t = 0; t < 200; ++t) {
      std::vector<std::uint64_t> db(n);
      BitVec a;
      for (auto& v : db) {
        v = gen() & 0xff;
        auto bits = u64_to_bits_lsb(v, 8);
        a.insert(a.end(), bits.begin(), bits.end());
      }
      BitVec b;
      std::vector<std::uint64_t> q(3);
      for (auto& x : q) {
        x = gen() % (std::uint64_t(1) << ib);
        auto bits = u64_to_bits_lsb(x, ib);
        b.insert(b.end(), bits.begin(), bits.end());
      }
      auto out = eval_plain(c, a, b);
      for (int i = 0; i < 3; ++i) {
        std::uint64_t expect = q[i] < n ? db[q[i]] : 0;
        EXPECT_EQ(bits_to_u64_lsb(std::span(out).subspan(i * 8, 8)), expect);
      }
    }
  }
}

TEST(Generators, DatabaseOpsMatchesArray) {
  std::mt19937_64 gen(5);
  const std::uint32_t n = 6, w = 16, q = 7;
  auto c = gen_database_ops(n, w, q);
  ASSERT_EQ(c.bob_bits, q * (1 + 3 + w));
  for (int t = 0; t < 200; ++t) {
    std::vector<std::uint64_t> db(n);
    BitVec a;
    for (auto& v : db) {
      v = gen() & 0xffff;
      auto bits = u64_to_bits_lsb(v, w);
      a.insert(a.end(), bits.begin(), bits.end());
    }
    BitVec b;
    std::vector<std::uint64_t> expect;
    for (std::uint32_t i = 0; i < q; ++i) {
      bool set = gen() & 1;
      std::uint64_t idx = gen() % 8;  // 6 and 7 are out of range
      std::uint64_t v = gen() & 0xffff;
      b.push_back(set);
      auto ib = u64_to_bits_lsb(idx, 3), vb = u64_to_bits_lsb(v, w);
      b.insert(b.end(), ib.begin(), ib.end());
      b.insert(b.end(), vb.begin(), vb.end());
      if (set) {
        expect.push_back(0);
        if (idx < n) db[idx] = v;
      } else {
        expect.push_back(idx < n ? db[idx] : 0);
      }
    }
    auto out = eval_plain(c, a, b);
    ASSERT_EQ(out.size(), expect.size() * w);
    for (std::size_t i = 0; i < expect.size(); ++i) EXPECT_EQ(bits_to_u64_lsb(std::span(out).subspan(i * w, w)), expect[i]);
  }
}

TEST(Builder, ArithmeticExhaustiveSixBits) {
  CircuitBuilder cb(6, 6);
  auto a = cb.alice_word(0, 6), b = cb.bob_word(0, 6);
  cb.output(cb.add(a, b, true));
  cb.output(cb.lt(a, b));
  cb.output(cb.eq(a, b));
  cb.output(cb.mux(cb.alice(0), a, b));
  auto c = cb.build();
  for (unsigned x = 0; x < 64; ++x)
    for (unsigned y = 0; y < 64; ++y) {
      auto out = eval_plain(c, u64_to_bits_lsb(x, 6), u64_to_bits_lsb(y, 6));
      EXPECT_EQ(bits_to_u64_lsb(std::span(out).subspan(0, 7)), x + y);
      EXPECT_EQ(out[7], x < y);
      EXPECT_EQ(out[8], x == y);
      EXPECT_EQ(bits_to_u64_lsb(std::span(out).subspan(9, 6)), (x & 1) ? x : y);
    }
}

TEST(Builder, DecoderIsOneHot) {
  for (std::size_t n : {1u, 3u, 4u, 5u, 9u}) {
    std::uint32_t ib = bits_for(n - 1);
    CircuitBuilder cb(ib, 0);
    auto sel = cb.decoder(cb.alice_word(0, ib), n);
    ASSERT_EQ(sel.size(), n);
    for (auto w : sel) cb.output(w);
    auto c = cb.build();
    for (std::uint64_t v = 0; v < (1u << ib); ++v) {
      auto out = eval_plain(c, u64_to_bits_lsb(v, ib), BitVec{});
      for (std::size_t i = 0; i < n; ++i) EXPECT_EQ(out[i], v == i);
    }
  }
}

TEST(Builder, WireBudgetEnforced) {
  EXPECT_THROW(gen_select(1u << 20, 64, 64), CircuitError);
}

namespace {

constexpr std::uint64_t kInf = 0xffffffffu;

// Textbook Dijkstra on an explicit graph: virtual source X, sink T.
std::uint64_t oracle_sensitive(const SensitiveGraphConfig& cfg, const std::vector<std::uint64_t>& din,
                               const std::vector<std::uint64_t>& dout, std::uint64_t direct,
                               const std::vector<std::uint64_t>& w, const std::vector<std::uint64_t>& bw) {
  const std::uint32_t S = cfg.nodes, X = S, T = S + 1;
  std::vector<std::vector<std::pair<std::uint32_t, std::uint64_t>>> adj(S + 2);
  for (std::size_t i = 0; i < cfg.edges.size(); ++i) {
    adj[cfg.edges[i].first].push_back({cfg.edges[i].second, w[i]});
    adj[cfg.edges[i].second].push_back({cfg.edges[i].first, w[i]});
  }
  for (std::size_t e = 0; e < cfg.boundary_node.size(); ++e) {
    if (din[e] != kInf) adj[X].push_back({cfg.boundary_node[e], din[e] + bw[e]});
    if (dout[e] != kInf) adj[cfg.boundary_node[e]].push_back({T, bw[e] + dout[e]});
  }
  if (direct != kInf) adj[X].push_back({T, direct});
  std::vector<std::uint64_t> dist(S + 2, ~0ull);
  std::priority_queue<std::pair<std::uint64_t, std::uint32_t>, std::vector<std::pair<std::uint64_t, std::uint32_t>>, std::greater<>> pq;
  dist[X] = 0;
  pq.push({0, X});
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (d != dist[u]) continue;
    for (auto [v, wt] : adj[u])
      if (d + wt < dist[v]) pq.push({dist[v] = d + wt, v});
  }
  return dist[T] == ~0ull ? kInf : dist[T];
}

SensitiveGraphConfig ring_graph(std::uint32_t S, std::uint32_t E, std::mt19937_64& gen) {
  SensitiveGraphConfig cfg;
  cfg.nodes = S;
  for (std::uint32_t i = 0; i + 1 < S; ++i) cfg.edges.push_back({i, i + 1});
  if (S > 2) cfg.edges.push_back({S - 1, 0});
  for (std::uint32_t i = 0; i < S / 2; ++i) {
    std::uint32_t u = gen() % S, v = gen() % S;
    if (u != v) cfg.edges.push_back({u, v});
  }
  for (std::uint32_t e = 0; e < E; ++e) cfg.boundary_node.push_back(gen() % S);
  return cfg;
}

}  // namespace

TEST(Generators, DijkstraSensitiveMatchesTextbook) {
  std::mt19937_64 gen(42);
  for (auto [S, E] : {std::pair{3u, 2u}, std::pair{6u, 4u}, std::pair{20u, 12u}}) {
    auto cfg = ring_graph(S, E, gen);
    auto L = sensitive_layout(cfg);
    auto c = gen_dijkstra_sensitive(cfg);
    const int trials = S == 20 ? 4 : 30;
    for (int t = 0; t < trials; ++t) {
      std::vector<std::uint64_t> din(E), dout(E), w(cfg.edges.size()), bw(E);
      for (auto& x : din) x = gen() % 3 == 0 ? kInf : gen() % 50000;
      for (auto& x : dout) x = gen() % 3 == 0 ? kInf : gen() % 50000;
      for (auto& x : w) x = 1 + gen() % 4096;
      for (auto& x : bw) x = 1 + gen() % 4096;
      std::uint64_t direct = gen() % 2 ? kInf : gen() % 120000;
      BitVec a, b;
      auto put = [](BitVec& v, std::uint64_t x) {
        auto bits = u64_to_bits_lsb(x, 32);
        v.insert(v.end(), bits.begin(), bits.end());
      };
      for (auto x : din) put(a, x);
      for (auto x : dout) put(a, x);
      put(a, direct);
      for (auto x : w) put(b, x);
      for (auto x : bw) put(b, x);
      auto out = eval_plain(c, a, b);
      std::size_t off = 0;
      auto take = [&](std::size_t n) {
        auto v = bits_to_u64_lsb(std::span(out).subspan(off, n));
        off += n;
        return v;
      };
      std::uint64_t exit = take(L.index_bits), entry = take(L.index_bits);
      std::vector<std::uint64_t> path(S);
      for (auto& p : path) p = take(L.node_bits);
      std::uint64_t cost = take(32);
      ASSERT_EQ(off, out.size());
      const std::uint64_t expect = oracle_sensitive(cfg, din, dout, direct, w, bw);
      EXPECT_EQ(cost, expect);
      const std::uint64_t ones_idx = (1u << L.index_bits) - 1, ones_node = (1u << L.node_bits) - 1;
      if (exit == ones_idx) {
        EXPECT_EQ(cost, direct);
        EXPECT_EQ(entry, ones_idx);
        for (auto p : path) EXPECT_EQ(p, ones_node);
        continue;
      }
      // Recompute the cost along the reported route.
      std::vector<std::uint64_t> nodes;
      for (auto p : path)
        if (p != ones_node) nodes.push_back(p);
      ASSERT_FALSE(nodes.empty());
      EXPECT_EQ(nodes.front(), cfg.boundary_node[exit]);
      EXPECT_EQ(nodes.back(), cfg.boundary_node[entry]);
      std::uint64_t sum = din[entry] + bw[entry] + bw[exit] + dout[exit];
      for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        std::uint64_t best = ~0ull;
        for (std::size_t j = 0; j < cfg.edges.size(); ++j) {
          auto [u, v] = cfg.edges[j];
          if ((u == nodes[i] && v == nodes[i + 1]) || (v == nodes[i] && u == nodes[i + 1])) best = std::min(best, w[j]);
        }
        ASSERT_NE(best, ~0ull) << "route uses a non-edge";
        sum += best;
      }
      EXPECT_EQ(sum, cost);
    }
  }
}
