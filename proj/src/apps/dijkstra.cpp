#include "hsfe/apps/dijkstra.hpp"

#include <algorithm>
#include <filesystem>
#include <map>
#include <numeric>
#include <queue>
#include <regex>
#include <set>
#include <sstream>

#include "hsfe/branchfree.hpp"
#include "hsfe/codec.hpp"
#include "hsfe/errors.hpp"

namespace hsfe {

std::size_t RoadGraph::count(EdgeKind k) const {
  return static_cast<std::size_t>(std::count_if(edges.begin(), edges.end(), [k](const GraphEdge& e) { return e.kind == k; }));
}

DijkstraConfig parse_dijkstra_config(const std::string& s) {
  static const std::regex re(R"(\s*(\d+)\s*\(\s*(\d+)\s*,\s*(\d+)\s*\)\s*)");
  std::smatch m;
  if (!std::regex_match(s, m, re)) throw ConfigError("graph configuration must look like \"N (E, S)\", got '" + s + "'");
  DijkstraConfig c;
  c.nonsensitive = static_cast<std::uint32_t>(std::stoul(m[1]));
  c.entrances = static_cast<std::uint32_t>(std::stoul(m[2]));
  c.sensitive = static_cast<std::uint32_t>(std::stoul(m[3]));
  return c;
}

std::string format_dijkstra_config(const DijkstraConfig& c) {
  return std::to_string(c.nonsensitive) + " (" + std::to_string(c.entrances) + ", " + std::to_string(c.sensitive) + ")";
}

namespace {

EdgeKind kind_of(std::uint32_t outside, std::uint32_t u, std::uint32_t v) {
  int s = (u >= outside) + (v >= outside);
  return s == 0 ? EdgeKind::Outside : s == 1 ? EdgeKind::Boundary : EdgeKind::Inside;
}

// Ring plus skip-two chords over the given nodes, in shuffled order.
void add_component(std::vector<std::uint32_t> nodes, RandomSource& rng, std::set<std::pair<std::uint32_t, std::uint32_t>>& seen,
                   std::vector<GraphEdge>& out, std::uint32_t outside) {
  for (std::size_t i = nodes.size(); i > 1; --i) std::swap(nodes[i - 1], nodes[rng.uniform(i)]);
  const std::size_t k = nodes.size();
  auto add = [&](std::uint32_t a, std::uint32_t b) {
    if (a == b) return;
    auto key = std::minmax(a, b);
    if (seen.insert(key).second) out.push_back({a, b, kind_of(outside, a, b)});
  };
  for (std::size_t i = 0; k >= 2 && i < k; ++i) add(nodes[i], nodes[(i + 1) % k]);
  for (std::size_t i = 0; k >= 5 && i < k; ++i) add(nodes[i], nodes[(i + 2) % k]);
}

std::vector<std::uint32_t> iota_nodes(std::uint32_t from, std::uint32_t to) {
  std::vector<std::uint32_t> v(to - from);
  std::iota(v.begin(), v.end(), from);
  return v;
}

}  // namespace

RoadGraph make_road_graph(const DijkstraConfig& cfg) {
  const std::uint32_t N = cfg.nonsensitive, E = cfg.entrances, S = cfg.sensitive;
  if (N < 2) throw ConfigError("a road graph needs at least two non-sensitive nodes");
  if (E > 0 && S == 0) throw ConfigError("boundary edges need a sensitive region");
  if (std::uint64_t(E) > std::uint64_t(N) * S) throw ConfigError("more boundary edges than node pairs");
  RoadGraph g;
  g.outside = N;
  g.inside = S;
  Drbg rng(cfg.graph_seed, "road-graph");
  std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
  const bool split = S >= 1 && E >= 2;
  if (split) {
    add_component(iota_nodes(0, N / 2), rng, seen, g.edges, N);
    add_component(iota_nodes(N / 2, N), rng, seen, g.edges, N);
  } else {
    add_component(iota_nodes(0, N), rng, seen, g.edges, N);
  }
  add_component(iota_nodes(N, N + S), rng, seen, g.edges, N);
  for (std::uint32_t e = 0; e < E; ++e) {
    std::uint32_t lo = 0, hi = N;
    if (split) {
      lo = e % 2 ? N / 2 : 0;
      hi = e % 2 ? N : N / 2;
    }
    for (int attempt = 0;; ++attempt) {
      auto outer = lo + static_cast<std::uint32_t>(rng.uniform(hi - lo));
      auto inner = N + static_cast<std::uint32_t>(rng.uniform(S));
      if (seen.insert({outer, inner}).second) {
        g.edges.push_back({outer, inner, EdgeKind::Boundary});
        break;
      }
      if (attempt > 10000) throw ConfigError("cannot place " + std::to_string(E) + " distinct boundary edges");
    }
  }
  check_road_graph(g);
  return g;
}

void check_road_graph(const RoadGraph& g) {
  std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    const auto& e = g.edges[i];
    std::string where = "edge " + std::to_string(i) + " (" + std::to_string(e.u) + ", " + std::to_string(e.v) + ")";
    if (e.u >= g.nodes() || e.v >= g.nodes()) throw ConfigError(where + ": node out of range");
    if (e.u == e.v) throw ConfigError(where + ": self loop");
    if (!seen.insert(std::minmax(e.u, e.v)).second) throw ConfigError(where + ": repeated edge");
    if (e.kind != kind_of(g.outside, e.u, e.v)) throw ConfigError(where + ": wrong edge kind");
  }
}

DijkstraInstance random_dijkstra_instance(const RoadGraph& g, const DijkstraConfig& cfg, RandomSource& rng) {
  if (g.outside < 2) throw ConfigError("need two non-sensitive nodes for the endpoints");
  DijkstraInstance inst;
  inst.graph = g;
  const std::uint64_t heavy = std::uint64_t(g.nodes()) * cfg.wmax;
  for (const auto& e : g.edges) inst.weights.push_back((e.kind == EdgeKind::Boundary ? heavy : 0) + 1 + rng.uniform(cfg.wmax));
  inst.start = static_cast<std::uint32_t>(rng.uniform(g.outside));
  inst.end = static_cast<std::uint32_t>(rng.uniform(g.outside - 1));
  if (inst.end >= inst.start) ++inst.end;
  check_dijkstra_inputs(g, inst.weights, inst.start, inst.end);
  return inst;
}

void check_dijkstra_inputs(const RoadGraph& g, const std::vector<std::uint64_t>& weights, std::uint32_t start, std::uint32_t end) {
  if (weights.size() != g.edges.size()) throw ConfigError("expected " + std::to_string(g.edges.size()) + " weights, got " + std::to_string(weights.size()));
  std::uint64_t total = 0;
  for (auto w : weights) {
    if (w == 0 || w >= kUnreachable) throw ConfigError("edge weights must lie in 1..2^32-2");
    total += w;
  }
  if (total >= kUnreachable) throw ConfigError("edge weights sum to 2^32-1 or more; routes could overflow 32 bits");
  if (start >= g.outside || end >= g.outside) throw ConfigError("route endpoints must be non-sensitive nodes");
}

Bytes encode_endpoints(std::uint32_t start, std::uint32_t end) {
  Writer w;
  w.u32(start).u32(end);
  return std::move(w).bytes();
}

std::pair<std::uint32_t, std::uint32_t> decode_endpoints(ByteView b) {
  Reader r(b);
  auto s = r.u32(), e = r.u32();
  r.expect_done();
  return {s, e};
}

Bytes encode_route(const RouteResult& r) {
  Writer w;
  w.u8(r.reachable ? 1 : 0).u64(r.cost).u32(static_cast<std::uint32_t>(r.nodes.size()));
  for (auto n : r.nodes) w.u32(n);
  return std::move(w).bytes();
}

RouteResult decode_route(ByteView b) {
  Reader r(b);
  RouteResult out;
  out.reachable = r.u8() != 0;
  out.cost = r.u64();
  std::uint32_t n = r.u32();
  if (r.remaining() != std::size_t(n) * 4) throw ProtocolError("route has the wrong length");
  out.nodes.resize(n);
  for (auto& x : out.nodes) x = r.u32();
  return out;
}

std::string check_route(const RoadGraph& g, const std::vector<std::uint64_t>& weights, std::uint32_t start, std::uint32_t end,
                        const RouteResult& r) {
  if (!r.reachable) return "no route";
  if (r.nodes.empty()) return "empty route";
  if (r.nodes.front() != start) return "route does not begin at the start";
  if (r.nodes.back() != end) return "route does not finish at the end";
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint64_t> w;
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    auto key = std::minmax(g.edges[i].u, g.edges[i].v);
    auto it = w.find(key);
    if (it == w.end() || weights[i] < it->second) w[key] = weights[i];
  }
  std::uint64_t sum = 0;
  int entries = 0;
  for (std::size_t i = 0; i + 1 < r.nodes.size(); ++i) {
    auto it = w.find(std::minmax(r.nodes[i], r.nodes[i + 1]));
    if (it == w.end()) return "hop " + std::to_string(r.nodes[i]) + " -> " + std::to_string(r.nodes[i + 1]) + " is not an edge";
    sum += it->second;
    entries += !g.sensitive(r.nodes[i]) && g.sensitive(r.nodes[i + 1]);
  }
  if (sum != r.cost) return "route weights sum to " + std::to_string(sum) + ", reported cost " + std::to_string(r.cost);
  if (entries > 1) return "route enters the sensitive region " + std::to_string(entries) + " times";
  return {};
}

// ------------------------------------------------------------ shortest paths

ShortestPaths shortest_paths_hardened(std::uint32_t V, const std::vector<GraphEdge>& edges, const std::vector<std::uint64_t>& w,
                                      std::uint32_t source) {
  // Adjacency matrix; the cells written depend on the public topology only.
  std::vector<std::uint64_t> mat(std::size_t(V) * V, kUnreachable);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    auto& a = mat[std::size_t(edges[i].u) * V + edges[i].v];
    auto& b = mat[std::size_t(edges[i].v) * V + edges[i].u];
    a = bf_min_update(a, w[i]);
    b = bf_min_update(b, w[i]);
  }
  ShortestPaths sp;
  sp.dist.assign(V, kUnreachable);
  sp.pred.assign(V, kNoNode);
  std::vector<std::uint64_t> done(V, 0), row(V), pred(V, kNoNode);
  // hardened:begin shortest paths
  for (std::uint32_t v = 0; v < V; ++v) sp.dist[v] = bf_select(bf_eq(v, source), 0, kUnreachable);
  for (std::uint32_t iter = 0; iter < V; ++iter) {
    std::uint64_t best = ~std::uint64_t(0), u = 0;
    for (std::uint32_t v = 0; v < V; ++v) {
      std::uint64_t cand = bf_select(done[v], ~std::uint64_t(0), sp.dist[v]);
      std::uint64_t better = bf_lt(cand, best);
      best = bf_select(better, cand, best);
      u = bf_select(better, v, u);
    }
    for (std::uint32_t v = 0; v < V; ++v) done[v] = done[v] | bf_eq(v, u);
    for (std::uint32_t v = 0; v < V; ++v) row[v] = kUnreachable;
    for (std::uint32_t x = 0; x < V; ++x) {
      std::uint64_t sel = bf_eq(x, u);
      const std::uint64_t* r = &mat[std::size_t(x) * V];
      for (std::uint32_t v = 0; v < V; ++v) row[v] = bf_select(sel, r[v], row[v]);
    }
    for (std::uint32_t v = 0; v < V; ++v) {
      std::uint64_t cand = best + row[v];
      std::uint64_t better = bf_lt(cand, sp.dist[v]) & (done[v] ^ 1);
      sp.dist[v] = bf_select(better, cand, sp.dist[v]);
      pred[v] = bf_select(better, u, pred[v]);
    }
  }
  // hardened:end
  for (std::uint32_t v = 0; v < V; ++v) sp.pred[v] = static_cast<std::uint32_t>(pred[v]);
  return sp;
}

ShortestPaths shortest_paths_naive(std::uint32_t V, const std::vector<GraphEdge>& edges, const std::vector<std::uint64_t>& w,
                                   std::uint32_t source) {
  std::vector<std::vector<std::pair<std::uint32_t, std::uint64_t>>> adj(V);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    adj[edges[i].u].push_back({edges[i].v, w[i]});
    adj[edges[i].v].push_back({edges[i].u, w[i]});
  }
  ShortestPaths sp;
  sp.dist.assign(V, kUnreachable);
  sp.pred.assign(V, kNoNode);
  using Item = std::pair<std::uint64_t, std::uint32_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  sp.dist[source] = 0;
  pq.push({0, source});
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (d != sp.dist[u]) continue;
    for (auto [v, wt] : adj[u])
      if (d + wt < sp.dist[v]) {
        sp.dist[v] = d + wt;
        sp.pred[v] = u;
        pq.push({sp.dist[v], v});
      }
  }
  return sp;
}

namespace {

// Route from the source of `pred` to `end`, walked without data-dependent
// memory accesses: each of the V steps scans the whole predecessor array.
RouteResult route_hardened(const ShortestPaths& sp, std::uint32_t start, std::uint32_t end) {
  const auto V = static_cast<std::uint32_t>(sp.pred.size());
  std::vector<std::uint64_t> back(V, kNoNode);
  std::uint64_t cost = 0;
  // hardened:begin route walk
  for (std::uint32_t v = 0; v < V; ++v) cost = bf_select(bf_eq(v, end), sp.dist[v], cost);
  std::uint64_t active = bf_eq(cost, kUnreachable) ^ 1, cur = end;
  for (std::uint32_t t = 0; t < V; ++t) {
    back[t] = bf_select(active, cur, kNoNode);
    active = active & (bf_eq(cur, start) ^ 1);
    std::uint64_t next = 0;
    for (std::uint32_t v = 0; v < V; ++v) next = bf_select(bf_eq(v, cur), sp.pred[v], next);
    cur = next;
  }
  // hardened:end
  RouteResult r;
  r.reachable = cost != kUnreachable;
  r.cost = r.reachable ? cost : 0;
  for (auto it = back.rbegin(); it != back.rend(); ++it)
    if (*it != kNoNode) r.nodes.push_back(static_cast<std::uint32_t>(*it));
  return r;
}

std::vector<std::uint32_t> walk(const std::vector<std::uint32_t>& pred, std::uint32_t from, std::uint32_t to) {
  std::vector<std::uint32_t> out{from};
  while (out.back() != to) {
    if (out.size() > pred.size() || out.back() >= pred.size() || pred[out.back()] == kNoNode)
      throw ProtocolError("predecessor tree does not lead from " + std::to_string(from) + " to " + std::to_string(to));
    out.push_back(pred[out.back()]);
  }
  return out;
}

RouteResult route_naive(const ShortestPaths& sp, std::uint32_t start, std::uint32_t end) {
  RouteResult r;
  if (sp.dist[end] == kUnreachable) return r;
  r.reachable = true;
  r.cost = sp.dist[end];
  r.nodes = walk(sp.pred, end, start);
  std::reverse(r.nodes.begin(), r.nodes.end());
  return r;
}

std::vector<std::uint64_t> weights_of(const RoadGraph& g, const std::vector<std::uint64_t>& w, EdgeKind k) {
  std::vector<std::uint64_t> out;
  for (std::size_t i = 0; i < g.edges.size(); ++i)
    if (g.edges[i].kind == k) out.push_back(w[i]);
  return out;
}

std::vector<GraphEdge> edges_of(const RoadGraph& g, EdgeKind k) {
  std::vector<GraphEdge> out;
  for (const auto& e : g.edges)
    if (e.kind == k) out.push_back(e);
  return out;
}

std::uint32_t outer_end(const RoadGraph& g, const GraphEdge& e) { return g.sensitive(e.u) ? e.v : e.u; }
std::uint32_t inner_end(const RoadGraph& g, const GraphEdge& e) { return g.sensitive(e.u) ? e.u : e.v; }

std::uint64_t mask(std::uint32_t bits) { return bits >= 64 ? ~std::uint64_t(0) : (std::uint64_t(1) << bits) - 1; }

// Round 1 output words: direct, din[E], dout[E], pred_s[N], pred_t[N].
struct Round1 {
  std::uint64_t direct = 0;
  std::vector<std::uint64_t> din, dout;
  std::vector<std::uint32_t> pred_s, pred_t;
};

Round1 parse_round1(ByteView y, std::uint32_t E, std::uint32_t N) {
  auto w = decode_words(y);
  if (w.size() != 1 + 2 * std::size_t(E) + 2 * std::size_t(N)) throw ProtocolError("enclave round output has the wrong size");
  Round1 r;
  r.direct = w[0];
  r.din.assign(w.begin() + 1, w.begin() + 1 + E);
  r.dout.assign(w.begin() + 1 + E, w.begin() + 1 + 2 * E);
  for (std::uint32_t i = 0; i < N; ++i) {
    r.pred_s.push_back(static_cast<std::uint32_t>(w[1 + 2 * E + i]));
    r.pred_t.push_back(static_cast<std::uint32_t>(w[1 + 2 * E + N + i]));
  }
  return r;
}

FullGraphConfig full_config(const RoadGraph& g) {
  FullGraphConfig c;
  c.nodes = g.nodes();
  c.weight_bits = kWeightBits;
  for (const auto& e : g.edges) c.edges.push_back({e.u, e.v});
  return c;
}

// Output bits of gen_dijkstra_full computed directly.
BitVec full_round_plain(const FullGraphConfig& cfg, std::uint64_t start, std::uint64_t end, const std::vector<std::uint64_t>& w) {
  const std::uint32_t V = cfg.nodes, W = cfg.weight_bits, nb = bits_for(V);
  const std::uint64_t onesW = mask(W), onesN = mask(nb);
  std::vector<std::uint64_t> dist(V), pred(V, onesN);
  for (std::uint32_t v = 0; v < V; ++v) dist[v] = v == start ? 0 : onesW;
  auto relax = [&](std::uint32_t v, std::uint32_t u, std::uint64_t wt) {
    std::uint64_t cand = dist[u] + (wt & onesW);
    if (cand < dist[v]) {
      dist[v] = cand;
      pred[v] = u;
    }
  };
  for (std::uint32_t round = 0; round + 1 < V; ++round)
    for (std::size_t i = 0; i < cfg.edges.size(); ++i) {
      auto [u, v] = cfg.edges[i];
      relax(v, u, w[i]);
      relax(u, v, w[i]);
    }
  std::uint64_t cost = end < V ? dist[end] : 0;
  bool active = cost != onesW;
  std::uint64_t cur = end;
  BitVec out;
  push_word_bits(out, cost, W);
  for (std::uint32_t t = 0; t < V; ++t) {
    push_word_bits(out, active ? cur : onesN, nb);
    active = active && cur != start;
    cur = cur < V ? pred[cur] : 0;
  }
  return out;
}

}  // namespace

SensitiveGraphConfig sensitive_config(const RoadGraph& g) {
  SensitiveGraphConfig c;
  c.nodes = g.inside;
  c.weight_bits = kWeightBits;
  for (const auto& e : g.edges) {
    if (e.kind == EdgeKind::Inside) c.edges.push_back({e.u - g.outside, e.v - g.outside});
    if (e.kind == EdgeKind::Boundary) c.boundary_node.push_back(inner_end(g, e) - g.outside);
  }
  return c;
}

BitVec sensitive_round_plain(const SensitiveGraphConfig& cfg, const std::vector<std::uint64_t>& din, const std::vector<std::uint64_t>& dout,
                             std::uint64_t direct, const std::vector<std::uint64_t>& w, const std::vector<std::uint64_t>& bw) {
  const auto L = sensitive_layout(cfg);
  const std::uint32_t E = L.boundary, S = L.nodes, W = L.weight_bits;
  const std::uint32_t low = std::max(L.node_bits, L.index_bits);
  const std::uint64_t onesW = mask(W), onesI = mask(L.index_bits), onesN = mask(L.node_bits), onesP = mask(low + 1);
  std::vector<std::uint64_t> dist(S, onesW), pred(S, onesP);
  auto relax = [&](std::uint32_t v, std::uint64_t du, std::uint64_t wt, std::uint64_t code) {
    std::uint64_t cand = (du & onesW) + (wt & onesW);
    if (cand < dist[v]) {
      dist[v] = cand;
      pred[v] = code;
    }
  };
  for (std::uint32_t e = 0; e < E; ++e) relax(cfg.boundary_node[e], din[e], bw[e], e | (std::uint64_t(1) << low));
  for (std::uint32_t round = 0; round + 1 < S; ++round)
    for (std::size_t i = 0; i < cfg.edges.size(); ++i) {
      auto [u, v] = cfg.edges[i];
      relax(v, dist[u], w[i], u);
      relax(u, dist[v], w[i], v);
    }
  std::uint64_t best = direct & onesW, exit = onesI;
  for (std::uint32_t e = 0; e < E; ++e) {
    std::uint64_t t = dist[cfg.boundary_node[e]] + (bw[e] & onesW) + (dout[e] & onesW);
    if (t < best) {
      best = t;
      exit = e;
    }
  }
  bool active = exit < E;
  std::uint64_t cur = active ? cfg.boundary_node[exit] : 0, entry = onesI;
  std::vector<std::uint64_t> path;
  for (std::uint32_t t = 0; t < S; ++t) {
    path.push_back(active ? cur : onesN);
    std::uint64_t p = cur < S ? pred[cur] : 0;
    bool at_boundary = (p >> low) & 1;
    if (active && at_boundary) entry = p & onesI;
    active = active && !at_boundary;
    cur = p & onesN;
  }
  BitVec out;
  push_word_bits(out, exit, L.index_bits);
  push_word_bits(out, entry, L.index_bits);
  for (auto p : path) push_word_bits(out, p, L.node_bits);
  push_word_bits(out, best, W);
  return out;
}

PartitionScheme build_dijkstra_scheme(const RoadGraph& g, const AppOptions& opt) {
  check_road_graph(g);
  const std::string tag = std::to_string(g.outside) + "-" + std::to_string(g.count(EdgeKind::Boundary)) + "-" + std::to_string(g.inside);
  std::string name = "dijkstra-" + std::string(mode_name(opt.mode)) + "-" + tag;
  auto graph = std::make_shared<const RoadGraph>(g);
  auto endpoints_of = [graph](ByteView a) {
    auto [s, t] = decode_endpoints(a);
    if (s >= graph->outside || t >= graph->outside) throw ConfigError("route endpoints must be non-sensitive nodes");
    return std::pair{s, t};
  };
  auto whole_b = [graph](ByteView b, RandomSource&) {
    if (decode_words(b).size() != graph->edges.size()) throw ConfigError("weight count differs from the edge count");
    return std::vector<Bytes>{Bytes(b.begin(), b.end())};
  };
  auto whole_a = [endpoints_of](ByteView a, RandomSource&) {
    endpoints_of(a);
    return std::vector<Bytes>{Bytes(a.begin(), a.end())};
  };

  PartitionScheme p;
  switch (opt.mode) {
    case Mode::Naive:
    case Mode::Sgx: {
      const bool hardened = opt.mode == Mode::Sgx;
      p = sgx_scheme(name,
                     [graph, hardened, endpoints_of](ByteView u, ByteView v, EnclaveState& st) {
                       auto [s, t] = endpoints_of(split_input(u).first);
                       auto w = decode_words(split_input(v).first);
                       if (w.size() != graph->edges.size()) throw ConfigError("weight count differs from the edge count");
                       const std::size_t V = graph->nodes();
                       RouteResult r;
                       if (hardened) {
                         st.reserve_transient(V * V * 8 + V * 40);
                         r = route_hardened(shortest_paths_hardened(graph->nodes(), graph->edges, w, s), s, t);
                       } else {
                         st.reserve_transient(V * 40 + graph->edges.size() * 32);
                         r = route_naive(shortest_paths_naive(graph->nodes(), graph->edges, w, s), s, t);
                       }
                       return RoundOutput{encode_route(r), {}};
                     },
                     ReplyMode::Alice);
      break;
    }
    case Mode::Gc: {
      auto fc = std::make_shared<const FullGraphConfig>(full_config(g));
      const std::uint32_t nb = bits_for(g.nodes());
      EvenRound r;
      r.circuit = std::make_shared<const Circuit>(gen_dijkstra_full(*fc));
      r.alice_bits = [endpoints_of, nb](ByteView u) {
        auto [s, t] = endpoints_of(split_input(u).first);
        BitVec b;
        push_word_bits(b, s, nb);
        push_word_bits(b, t, nb);
        return b;
      };
      r.bob_bits = [](ByteView v) {
        BitVec b;
        for (auto x : decode_words(split_input(v).first)) push_word_bits(b, x, kWeightBits);
        return b;
      };
      r.plain = [fc, endpoints_of](ByteView u, ByteView v) {
        auto [s, t] = endpoints_of(split_input(u).first);
        return full_round_plain(*fc, s, t, decode_words(split_input(v).first));
      };
      r.output = [nb, V = g.nodes()](const BitVec& y, ByteView) {
        std::size_t off = 0;
        RouteResult route;
        route.cost = read_word_bits(y, off, kWeightBits);
        route.reachable = route.cost != kUnreachable;
        for (std::uint32_t i = 0; i < V; ++i) {
          auto n = read_word_bits(y, off, nb);
          if (n != mask(nb)) route.nodes.push_back(static_cast<std::uint32_t>(n));
        }
        std::reverse(route.nodes.begin(), route.nodes.end());
        if (!route.reachable) route = RouteResult{};
        return encode_route(route);
      };
      r.to = Role::Alice;
      p = gc_scheme(name, std::move(r));
      break;
    }
    case Mode::Hybrid: {
      p.name = name;
      const auto E = static_cast<std::uint32_t>(g.count(EdgeKind::Boundary));
      const std::uint32_t N = g.outside;
      auto scfg = std::make_shared<const SensitiveGraphConfig>(sensitive_config(g));
      auto layout = sensitive_layout(*scfg);
      auto outside_edges = std::make_shared<const std::vector<GraphEdge>>(edges_of(g, EdgeKind::Outside));
      std::vector<std::uint32_t> outer;
      for (const auto& e : g.edges)
        if (e.kind == EdgeKind::Boundary) outer.push_back(outer_end(g, e));

      OddRound odd{"dijkstra-outside-" + tag,
                   [N, outside_edges, outer, endpoints_of](ByteView u, ByteView v, EnclaveState& st) {
                     auto [s, t] = endpoints_of(split_input(u).first);
                     auto w = decode_words(split_input(v).first);
                     if (w.size() != outside_edges->size()) throw ConfigError("weight count differs from the outside edge count");
                     st.reserve_transient(std::size_t(N) * N * 8 + std::size_t(N) * 80);
                     auto from_s = shortest_paths_hardened(N, *outside_edges, w, s);
                     auto to_t = shortest_paths_hardened(N, *outside_edges, w, t);
                     std::vector<std::uint64_t> out{from_s.dist[t]};
                     for (auto o : outer) out.push_back(from_s.dist[o]);
                     for (auto o : outer) out.push_back(to_t.dist[o]);
                     for (auto x : from_s.pred) out.push_back(x);
                     for (auto x : to_t.pred) out.push_back(x);
                     return RoundOutput{encode_words(out), {}};
                   },
                   ReplyMode::Alice};

      EvenRound even;
      even.id = "dijkstra-region-" + tag;
      even.circuit = std::make_shared<const Circuit>(gen_dijkstra_sensitive(*scfg));
      even.alice_bits = [E, N](ByteView u) {
        auto r = parse_round1(split_input(u).second, E, N);
        BitVec b;
        for (auto x : r.din) push_word_bits(b, x, kWeightBits);
        for (auto x : r.dout) push_word_bits(b, x, kWeightBits);
        push_word_bits(b, r.direct, kWeightBits);
        return b;
      };
      even.bob_bits = [](ByteView v) {
        BitVec b;
        for (auto x : decode_words(split_input(v).first)) push_word_bits(b, x, kWeightBits);
        return b;
      };
      const std::size_t m_in = scfg->edges.size();
      even.plain = [scfg, E, N, m_in](ByteView u, ByteView v) {
        auto r = parse_round1(split_input(u).second, E, N);
        auto w = decode_words(split_input(v).first);
        if (w.size() != m_in + E) throw ConfigError("region weight count differs from the configuration");
        std::vector<std::uint64_t> wi(w.begin(), w.begin() + m_in), bw(w.begin() + m_in, w.end());
        return sensitive_round_plain(*scfg, r.din, r.dout, r.direct, wi, bw);
      };
      even.output = [layout, scfg, outer, E, N, endpoints_of](const BitVec& y, ByteView u) {
        auto [own, prev] = split_input(u);
        auto [s, t] = endpoints_of(own);
        auto r1 = parse_round1(prev, E, N);
        std::size_t off = 0;
        std::uint64_t exit = read_word_bits(y, off, layout.index_bits), entry = read_word_bits(y, off, layout.index_bits);
        std::vector<std::uint64_t> inner;
        for (std::uint32_t i = 0; i < layout.nodes; ++i) {
          auto n = read_word_bits(y, off, layout.node_bits);
          if (n != mask(layout.node_bits)) inner.push_back(n);
        }
        RouteResult route;
        route.cost = read_word_bits(y, off, layout.weight_bits);
        if (route.cost == kUnreachable) return encode_route(RouteResult{});
        route.reachable = true;
        if (exit == mask(layout.index_bits)) {
          route.nodes = walk(r1.pred_s, t, s);
          std::reverse(route.nodes.begin(), route.nodes.end());
          return encode_route(route);
        }
        if (exit >= E || entry >= E || inner.empty()) throw ProtocolError("garbled round returned an impossible route");
        route.nodes = walk(r1.pred_s, outer[entry], s);
        std::reverse(route.nodes.begin(), route.nodes.end());
        for (auto it = inner.rbegin(); it != inner.rend(); ++it) route.nodes.push_back(static_cast<std::uint32_t>(*it) + N);
        for (auto n : walk(r1.pred_t, outer[exit], t)) route.nodes.push_back(n);
        return encode_route(route);
      };
      even.to = Role::Alice;

      p.rounds = {std::move(odd), std::move(even)};
      p.split_a = [endpoints_of](ByteView a, RandomSource&) {
        endpoints_of(a);
        return std::vector<Bytes>{Bytes(a.begin(), a.end()), Bytes(a.begin(), a.end())};
      };
      // Region and boundary weights never enter the enclave round.
      p.split_b = [graph](ByteView b, RandomSource&) {
        auto w = decode_words(b);
        if (w.size() != graph->edges.size()) throw ConfigError("weight count differs from the edge count");
        auto region = weights_of(*graph, w, EdgeKind::Inside);
        auto bw = weights_of(*graph, w, EdgeKind::Boundary);
        region.insert(region.end(), bw.begin(), bw.end());
        return std::vector<Bytes>{encode_words(weights_of(*graph, w, EdgeKind::Outside)), encode_words(region)};
      };
      return p;
    }
  }
  p.split_a = whole_a;
  p.split_b = whole_b;
  return p;
}

DijkstraInstance parse_edge_file(std::string_view text, std::uint32_t nonsensitive, std::uint32_t sensitive) {
  DijkstraInstance inst;
  inst.graph.outside = nonsensitive;
  inst.graph.inside = sensitive;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    auto fail = [&](const std::string& why) { return ConfigError("edge file line " + std::to_string(line_no) + ": " + why); };
    if (tok.size() < 3 || tok.size() > 4) throw fail("expected 'u v w [sensitive]'");
    std::uint64_t f[4] = {0, 0, 0, 0};
    for (std::size_t i = 0; i < tok.size(); ++i) {
      try {
        std::size_t used = 0;
        f[i] = std::stoull(tok[i], &used);
        if (used != tok[i].size()) throw std::invalid_argument(tok[i]);
      } catch (const std::exception&) {
        throw fail("'" + tok[i] + "' is not a number");
      }
    }
    if (f[0] >= inst.graph.nodes() || f[1] >= inst.graph.nodes()) throw fail("node out of range");
    GraphEdge e{static_cast<std::uint32_t>(f[0]), static_cast<std::uint32_t>(f[1]), EdgeKind::Outside};
    e.kind = kind_of(nonsensitive, e.u, e.v);
    if (tok.size() == 4) {
      if (f[3] > 1) throw fail("sensitive column must be 0 or 1");
      if ((f[3] == 1) != (e.kind != EdgeKind::Outside)) throw fail("sensitive column disagrees with the node ids");
    }
    inst.graph.edges.push_back(e);
    inst.weights.push_back(f[2]);
  }
  check_road_graph(inst.graph);
  return inst;
}

DijkstraInstance load_dijkstra_setup(const std::string& path) {
  auto kv = load_key_values(path);
  for (const auto& [k, v] : kv)
    if (k != "config" && k != "graph_seed" && k != "seed" && k != "wmax" && k != "nonsensitive_count" && k != "sensitive_count" &&
        k != "edge_file" && k != "start" && k != "end")
      throw ConfigError(path + ": unknown key '" + k + "'");
  DijkstraInstance inst;
  if (auto it = kv.find("edge_file"); it != kv.end()) {
    auto epath = std::filesystem::path(path).parent_path() / it->second;
    inst = parse_edge_file(read_text_file(epath.string()), static_cast<std::uint32_t>(kv_uint(kv, "nonsensitive_count", 0)),
                           static_cast<std::uint32_t>(kv_uint(kv, "sensitive_count", 0)));
    if (!kv.count("start") || !kv.count("end")) throw ConfigError(path + ": start and end are required with an edge file");
    inst.start = static_cast<std::uint32_t>(kv_uint(kv, "start", 0));
    inst.end = static_cast<std::uint32_t>(kv_uint(kv, "end", 0));
  } else {
    auto cfg_it = kv.find("config");
    if (cfg_it == kv.end()) throw ConfigError(path + ": needs either config or edge_file");
    DijkstraConfig c = parse_dijkstra_config(cfg_it->second);
    c.graph_seed = kv_uint(kv, "graph_seed", 1);
    c.wmax = static_cast<std::uint32_t>(kv_uint(kv, "wmax", 4096));
    Drbg rng(kv_uint(kv, "seed", 1), "dijkstra-instance");
    inst = random_dijkstra_instance(make_road_graph(c), c, rng);
    if (kv.count("start")) inst.start = static_cast<std::uint32_t>(kv_uint(kv, "start", 0));
    if (kv.count("end")) inst.end = static_cast<std::uint32_t>(kv_uint(kv, "end", 0));
  }
  check_dijkstra_inputs(inst.graph, inst.weights, inst.start, inst.end);
  return inst;
}

std::vector<std::string> dijkstra_routing_violations(const PartitionScheme& p, const Transcript& t, const DijkstraInstance& inst) {
  auto out = channel_violations(p, t);
  const auto outside = weights_of(inst.graph, inst.weights, EdgeKind::Outside);
  for (const auto& [round, m] : odd_round_plaintexts(t))
    if (decode_words(split_input(m).first) != outside)
      out.push_back("round " + std::to_string(round) + ": the enclave saw weights other than the non-sensitive ones");
  Writer w;
  for (auto x : weights_of(inst.graph, inst.weights, EdgeKind::Inside)) w.u64(x);
  for (auto x : weights_of(inst.graph, inst.weights, EdgeKind::Boundary)) w.u64(x);
  for (auto& v : needle_violations(t, w.bytes())) out.push_back(v);
  return out;
}

}  // namespace hsfe
