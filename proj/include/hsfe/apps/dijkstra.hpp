#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "hsfe/apps/common.hpp"
#include "hsfe/circuit_builder.hpp"

namespace hsfe {

// Outside edges join two non-sensitive nodes, inside edges two sensitive
// ones, boundary edges one of each.
enum class EdgeKind : std::uint8_t { Outside = 0, Boundary = 1, Inside = 2 };

struct GraphEdge {
  std::uint32_t u = 0, v = 0;
  EdgeKind kind = EdgeKind::Outside;
};

// Node ids 0..outside-1 are non-sensitive, outside..outside+inside-1 the
// sensitive region. The topology is public; the weights are Bob's.
struct RoadGraph {
  std::uint32_t outside = 0, inside = 0;
  std::vector<GraphEdge> edges;
  std::uint32_t nodes() const { return outside + inside; }
  bool sensitive(std::uint32_t node) const { return node >= outside; }
  std::size_t count(EdgeKind k) const;
};

// "N (E, S)": N non-sensitive nodes, E boundary edges, S sensitive nodes.
struct DijkstraConfig {
  std::uint32_t nonsensitive = 20, entrances = 12, sensitive = 20;
  std::uint64_t graph_seed = 1;
  std::uint32_t wmax = 4096;
};
DijkstraConfig parse_dijkstra_config(const std::string& s);
std::string format_dijkstra_config(const DijkstraConfig& c);

// Ring-plus-chord components of degree 4. With a region and at least two
// boundary edges the non-sensitive nodes form two components joined only
// through the region, boundary edges alternating between them.
RoadGraph make_road_graph(const DijkstraConfig& cfg);
// Throws ConfigError on self loops, repeated edges or bad ids.
void check_road_graph(const RoadGraph& g);

inline constexpr std::uint32_t kWeightBits = 32;
inline constexpr std::uint64_t kUnreachable = 0xffffffffu;
inline constexpr std::uint32_t kNoNode = 0xffffffffu;

struct DijkstraInstance {
  RoadGraph graph;
  std::vector<std::uint64_t> weights;  // one per edge, edge order
  std::uint32_t start = 0, end = 0;
};

// Boundary edges weigh (nodes * wmax) plus a uniform draw, every other edge a
// uniform draw from 1..wmax. A shortest route then crosses the boundary twice
// or not at all. Start and end are distinct non-sensitive nodes.
DijkstraInstance random_dijkstra_instance(const RoadGraph& g, const DijkstraConfig& cfg, RandomSource& rng);

// Weights in 1..2^32-2 whose total stays below 2^32-1; endpoints outside
// the region.
void check_dijkstra_inputs(const RoadGraph& g, const std::vector<std::uint64_t>& weights, std::uint32_t start, std::uint32_t end);

Bytes encode_endpoints(std::uint32_t start, std::uint32_t end);
std::pair<std::uint32_t, std::uint32_t> decode_endpoints(ByteView b);

struct RouteResult {
  bool reachable = false;
  std::uint64_t cost = 0;
  std::vector<std::uint32_t> nodes;  // start first
};
Bytes encode_route(const RouteResult& r);
RouteResult decode_route(ByteView b);

// Empty when the route starts and ends at the given nodes, follows edges,
// costs the sum of its weights and enters the region at most once.
std::string check_route(const RoadGraph& g, const std::vector<std::uint64_t>& weights, std::uint32_t start, std::uint32_t end,
                        const RouteResult& r);

// Mode::Hybrid: round 1 (enclave, output to Alice) computes shortest
// non-sensitive paths from the start and to the end; round 2 (garbled, output
// to Alice) adds the region and its boundary, whose weights Bob feeds in by
// OT, and Alice stitches the route. The garbled round runs whether or not the
// route uses the region. Naive and Sgx route the whole graph in one enclave
// round, Gc in one garbled round.
PartitionScheme build_dijkstra_scheme(const RoadGraph& g, const AppOptions& opt);

// Region of the graph in the layout of gen_dijkstra_sensitive.
SensitiveGraphConfig sensitive_config(const RoadGraph& g);
// Output bits of gen_dijkstra_sensitive computed directly.
BitVec sensitive_round_plain(const SensitiveGraphConfig& cfg, const std::vector<std::uint64_t>& din, const std::vector<std::uint64_t>& dout,
                             std::uint64_t direct, const std::vector<std::uint64_t>& w, const std::vector<std::uint64_t>& bw);

// Single-source shortest paths inside the enclave. The hardened version scans
// every node and matrix row in each step; the naive one uses a heap.
struct ShortestPaths {
  std::vector<std::uint64_t> dist;   // kUnreachable when unreachable
  std::vector<std::uint32_t> pred;   // kNoNode at the source and unreachable nodes
};
ShortestPaths shortest_paths_hardened(std::uint32_t nodes, const std::vector<GraphEdge>& edges, const std::vector<std::uint64_t>& w,
                                      std::uint32_t source);
ShortestPaths shortest_paths_naive(std::uint32_t nodes, const std::vector<GraphEdge>& edges, const std::vector<std::uint64_t>& w,
                                   std::uint32_t source);

// Config file keys: either "config" (e.g. "20 (12, 20)") with graph_seed and
// seed, or nonsensitive_count, sensitive_count, edge_file, start and end. An
// edge file holds lines "u v w [sensitive]"; the optional fourth column (0 or
// 1) must say whether the edge touches the region.
DijkstraInstance load_dijkstra_setup(const std::string& path);
DijkstraInstance parse_edge_file(std::string_view text, std::uint32_t nonsensitive, std::uint32_t sensitive);

// Routing discipline for a hybrid transcript: the enclave round saw exactly
// the non-sensitive weights, and the region and boundary weights appear in no
// frame.
std::vector<std::string> dijkstra_routing_violations(const PartitionScheme& p, const Transcript& t, const DijkstraInstance& inst);

}  // namespace hsfe
