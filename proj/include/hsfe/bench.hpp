#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "hsfe/apps/common.hpp"
#include "hsfe/apps/dijkstra.hpp"
#include "hsfe/protocol.hpp"
#include "hsfe/trace.hpp"
#include "hsfe/transport.hpp"

namespace hsfe {

enum class BenchApp { Millionaires, Database, Dijkstra };
BenchApp parse_bench_app(std::string_view s);
std::string_view bench_app_name(BenchApp a);

struct BenchSpec {
  BenchApp app = BenchApp::Millionaires;
  Mode mode = Mode::Sgx;
  StoreKind store = StoreKind::Tree;
  unsigned k = 128;
  std::uint64_t seed = 1;
  std::size_t iters = 0;  // 0: 100 for enclave-only modes, 10 when a circuit is garbled
  std::uint32_t bits = 1024;
  std::uint32_t entries = 500, queries = 2500;
  double sensitive_fraction = 0.05;
  DijkstraConfig graph;
};

std::size_t default_iterations(Mode m);
// "1024", "500x2500", "20 (12, 20)".
std::string size_label(const BenchSpec& s);
// Graph configurations of the evaluated programs, keyed by the
// non-sensitive node count. Throws ConfigError for other counts.
DijkstraConfig dijkstra_preset(std::uint32_t nonsensitive);
// Sizes above the desk-scale caps (Dijkstra 250, Database 1000x2500) need
// allow_large. Throws ConfigError.
void check_bench_size(const BenchSpec& s, bool allow_large);

// Inputs of one run and the oracle that checks its outputs.
struct BenchCase {
  Bytes a, b;
  std::uint64_t trial = 0;
};

class BenchWorkload {
 public:
  explicit BenchWorkload(const BenchSpec& spec);
  ~BenchWorkload();
  const BenchSpec& spec() const { return spec_; }
  const PartitionScheme& scheme() const { return scheme_; }
  // Inputs drawn from Drbg(seed + trial).
  BenchCase make_case(std::uint64_t trial) const;
  // Empty when y is what the plain function gives party r on the case.
  // Routes are checked for cost and legality, since ties allow several.
  std::string verify(const BenchCase& c, Role r, ByteView y) const;

 private:
  BenchSpec spec_;
  PartitionScheme scheme_;
  struct Fixed;
  std::unique_ptr<Fixed> fixed_;
};

// Key for the run: from the hex key file when given, otherwise derived from
// the seed so both processes of a TCP run agree on it.
SymKey bench_key(const BenchSpec& s, const std::string& key_file);

struct BenchResult {
  std::string app, mode, store, transport, size;
  unsigned k = 128;
  std::size_t iterations = 0;
  double mean_ms = 0, ci95_rel_pct = 0;
  std::size_t bytes_on_wire = 0, gc_table_rows = 0, ot_count = 0;
  std::string timing_scope;
  std::vector<double> samples_ms;  // not part of the CSV row
};

// Stable column order:
// app,mode,store,transport,size,k,iterations,mean_ms,ci95_rel_pct,
// bytes_on_wire,gc_table_rows,ot_count,timing_scope
std::string bench_csv_header();
std::string to_csv_row(const BenchResult& r);
BenchResult parse_csv_row(std::string_view line);

// Times run_inprocess over spec.iters runs with fresh inputs each time.
// Every output is checked first; a wrong answer throws ProtocolError.
BenchResult run_bench_inprocess(const BenchSpec& spec, const std::string& key_file = "", std::ostream* log = nullptr);

// The two parties of a TCP benchmark, one connection per iteration. Alice
// accepts on the listener and her result carries the timings; Bob connects
// to host:port and checks his own outputs.
BenchResult run_bench_alice(const BenchSpec& spec, TcpListener& listener, const std::string& key_file = "", std::ostream* log = nullptr);
void run_bench_bob(const BenchSpec& spec, const std::string& host, std::uint16_t port, const std::string& key_file = "",
                   std::ostream* log = nullptr);

// Memory trace of n sequential reads (index 0 up to n-1) on a store holding
// n entries; the loading writes are not recorded.
TraceRecorder sequential_trace(StoreKind kind, std::size_t n, std::uint64_t seed);

}  // namespace hsfe
