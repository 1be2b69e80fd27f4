#include "hsfe/bench.hpp"

#include <chrono>
#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "hsfe/apps/database.hpp"
#include "hsfe/apps/millionaires.hpp"
#include "hsfe/errors.hpp"
#include "hsfe/oram.hpp"
#include "hsfe/stats.hpp"

namespace hsfe {

BenchApp parse_bench_app(std::string_view s) {
  if (s == "millionaires") return BenchApp::Millionaires;
  if (s == "database") return BenchApp::Database;
  if (s == "dijkstra") return BenchApp::Dijkstra;
  throw ConfigError("unknown app '" + std::string(s) + "' (millionaires, database, dijkstra)");
}

std::string_view bench_app_name(BenchApp a) {
  switch (a) {
    case BenchApp::Millionaires: return "millionaires";
    case BenchApp::Database: return "database";
    case BenchApp::Dijkstra: return "dijkstra";
  }
  return "?";
}

std::size_t default_iterations(Mode m) { return m == Mode::Naive || m == Mode::Sgx ? 100 : 10; }

std::string size_label(const BenchSpec& s) {
  switch (s.app) {
    case BenchApp::Millionaires: return std::to_string(s.bits);
    case BenchApp::Database: return std::to_string(s.entries) + "x" + std::to_string(s.queries);
    case BenchApp::Dijkstra: return format_dijkstra_config(s.graph);
  }
  return "";
}

DijkstraConfig dijkstra_preset(std::uint32_t n) {
  static const std::pair<std::uint32_t, const char*> presets[] = {{20, "20 (12, 20)"},     {50, "50 (12, 20)"},     {100, "100 (22, 25)"},
                                                                  {200, "200 (32, 50)"},   {250, "250 (42, 100)"},  {1000, "1000 (52, 150)"},
                                                                  {10000, "10000 (62, 250)"}};
  for (const auto& [k, cfg] : presets)
    if (k == n) return parse_dijkstra_config(cfg);
  throw ConfigError("no graph configuration for " + std::to_string(n) + " nodes; pass the full \"N (E, S)\" form instead");
}

void check_bench_size(const BenchSpec& s, bool allow_large) {
  if (allow_large) return;
  if (s.app == BenchApp::Dijkstra && s.graph.nonsensitive > 250)
    throw ConfigError("graphs above 250 non-sensitive nodes need --allow-large");
  if (s.app == BenchApp::Database && (s.entries > 1000 || s.queries > 2500))
    throw ConfigError("databases above 1000x2500 need --allow-large");
}

struct BenchWorkload::Fixed {
  DatabaseConfig db;
  RoadGraph graph;
};

BenchWorkload::BenchWorkload(const BenchSpec& spec) : spec_(spec), fixed_(std::make_unique<Fixed>()) {
  AppOptions opt{spec.mode, spec.store};
  switch (spec.app) {
    case BenchApp::Millionaires:
      scheme_ = build_millionaires(spec.bits, spec.mode);
      break;
    case BenchApp::Database:
      fixed_->db = database_config(spec.entries, spec.queries, spec.sensitive_fraction);
      scheme_ = build_database_scheme(fixed_->db, opt);
      break;
    case BenchApp::Dijkstra:
      fixed_->graph = make_road_graph(spec.graph);
      scheme_ = build_dijkstra_scheme(fixed_->graph, opt);
      break;
  }
}

BenchWorkload::~BenchWorkload() = default;

BenchCase BenchWorkload::make_case(std::uint64_t trial) const {
  Drbg rng(spec_.seed + trial, "bench-case");
  BenchCase c;
  c.trial = trial;
  switch (spec_.app) {
    case BenchApp::Millionaires:
      c.a = random_millionaires_input(spec_.bits, rng);
      c.b = random_millionaires_input(spec_.bits, rng);
      break;
    case BenchApp::Database: {
      auto inst = random_database_instance(fixed_->db, rng);
      c.a = encode_table(inst.db);
      c.b = encode_queries(inst.queries);
      break;
    }
    case BenchApp::Dijkstra: {
      auto inst = random_dijkstra_instance(fixed_->graph, spec_.graph, rng);
      c.a = encode_endpoints(inst.start, inst.end);
      c.b = encode_words(inst.weights);
      break;
    }
  }
  return c;
}

std::string BenchWorkload::verify(const BenchCase& c, Role r, ByteView y) const {
  const std::string who = r == Role::Alice ? "alice" : "bob";
  const bool alice = r == Role::Alice;
  switch (spec_.app) {
    case BenchApp::Millionaires: {
      Bytes want = alice ? millionaires_plain(spec_.bits, c.a, c.b) : Bytes{};
      if (!std::equal(y.begin(), y.end(), want.begin(), want.end())) return who + ": comparison output differs from the integer oracle";
      return "";
    }
    case BenchApp::Database: {
      if (alice) return y.empty() ? "" : "alice: unexpected output";
      auto want = database_plain(decode_table(c.a), decode_queries(c.b));
      if (decode_answers(y) != want) return "bob: answers differ from direct array lookups";
      return "";
    }
    case BenchApp::Dijkstra: {
      if (!alice) return y.empty() ? "" : "bob: unexpected output";
      auto [s, t] = decode_endpoints(c.a);
      auto w = decode_words(c.b);
      auto sp = shortest_paths_naive(fixed_->graph.nodes(), fixed_->graph.edges, w, s);
      RouteResult route = decode_route(y);
      if (sp.dist[t] == kUnreachable) return route.reachable ? "alice: route to an unreachable node" : "";
      if (!route.reachable || route.cost != sp.dist[t])
        return "alice: route cost " + std::to_string(route.cost) + ", shortest is " + std::to_string(sp.dist[t]);
      if (auto why = check_route(fixed_->graph, w, s, t, route); !why.empty()) return "alice: " + why;
      return "";
    }
  }
  return "";
}

SymKey bench_key(const BenchSpec& s, const std::string& key_file) {
  if (!key_file.empty()) return load_key_file(key_file);
  Drbg rng(s.seed, "bench-key");
  return keygen(rng);
}

// ---- CSV ----

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_csv(std::string_view line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        out.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else if (c != '\r' && c != '\n') {
      out.back() += c;
    }
  }
  if (quoted) throw ConfigError("unterminated quote in CSV row");
  return out;
}

std::string fixed(double v, int digits) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

}  // namespace

std::string bench_csv_header() {
  return "app,mode,store,transport,size,k,iterations,mean_ms,ci95_rel_pct,bytes_on_wire,gc_table_rows,ot_count,timing_scope";
}

std::string to_csv_row(const BenchResult& r) {
  std::string out;
  for (const auto& f : {r.app, r.mode, r.store, r.transport, r.size}) out += csv_field(f) + ",";
  out += std::to_string(r.k) + "," + std::to_string(r.iterations) + "," + fixed(r.mean_ms, 3) + "," + fixed(r.ci95_rel_pct, 2) + "," +
         std::to_string(r.bytes_on_wire) + "," + std::to_string(r.gc_table_rows) + "," + std::to_string(r.ot_count) + "," +
         csv_field(r.timing_scope);
  return out;
}

BenchResult parse_csv_row(std::string_view line) {
  auto f = split_csv(line);
  if (f.size() != 13) throw ConfigError("CSV row has " + std::to_string(f.size()) + " fields, expected 13");
  BenchResult r;
  r.app = f[0];
  r.mode = f[1];
  r.store = f[2];
  r.transport = f[3];
  r.size = f[4];
  try {
    r.k = static_cast<unsigned>(std::stoul(f[5]));
    r.iterations = std::stoull(f[6]);
    r.mean_ms = std::stod(f[7]);
    r.ci95_rel_pct = std::stod(f[8]);
    r.bytes_on_wire = std::stoull(f[9]);
    r.gc_table_rows = std::stoull(f[10]);
    r.ot_count = std::stoull(f[11]);
  } catch (const std::logic_error&) {
    throw ConfigError("CSV row has a malformed number");
  }
  r.timing_scope = f[12];
  return r;
}

// ---- runs ----

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) { return std::chrono::duration<double, std::milli>(Clock::now() - t0).count(); }

BenchResult result_shell(const BenchSpec& spec, std::string transport, std::string scope) {
  BenchResult r;
  r.app = bench_app_name(spec.app);
  r.mode = mode_name(spec.mode);
  r.store = spec.app == BenchApp::Database ? std::string(store_kind_name(spec.mode == Mode::Naive ? StoreKind::Unblinded : spec.store)) : "-";
  r.transport = std::move(transport);
  r.size = size_label(spec);
  r.k = spec.k;
  r.timing_scope = std::move(scope);
  return r;
}

void finish(BenchResult& r, const RunStats& st) {
  Summary s = summarize(r.samples_ms);
  r.iterations = r.samples_ms.size();
  r.mean_ms = s.mean;
  r.ci95_rel_pct = s.mean > 0 ? 100.0 * s.ci95 / s.mean : 0;
  r.bytes_on_wire = st.bytes_on_wire;
  r.gc_table_rows = st.gc_table_rows;
  r.ot_count = st.ot_count;
}

void check(const BenchWorkload& w, const BenchCase& c, Role r, ByteView y) {
  if (auto why = w.verify(c, r, y); !why.empty())
    throw ProtocolError("output check failed on iteration " + std::to_string(c.trial) + ": " + why);
}

std::unique_ptr<Enclave> fresh_oracle(const BenchWorkload& w, const SymKey& key, std::uint64_t seed) {
  auto e = std::make_unique<Enclave>(kDefaultEnclaveBudget, seed);
  e->provision(key);
  register_round_fns(*e, w.scheme());
  return e;
}

RunOptions run_options(const BenchSpec& spec, std::uint64_t trial) {
  RunOptions opt;
  opt.k = spec.k;
  opt.seed = spec.seed + trial;
  return opt;
}

std::size_t iterations_of(const BenchSpec& spec) { return spec.iters ? spec.iters : default_iterations(spec.mode); }

}  // namespace

BenchResult run_bench_inprocess(const BenchSpec& spec, const std::string& key_file, std::ostream* log) {
  BenchWorkload w(spec);
  SymKey key = bench_key(spec, key_file);
  BenchResult r = result_shell(spec, "inproc", "run_inprocess; excludes setup, input generation and output checks");
  RunStats last;
  const std::size_t n = iterations_of(spec);
  for (std::size_t i = 0; i < n; ++i) {
    BenchCase c = w.make_case(i);
    auto oracle = fresh_oracle(w, key, spec.seed + i);
    auto t0 = Clock::now();
    RunResult res = run_inprocess(w.scheme(), c.a, c.b, key, *oracle, run_options(spec, i));
    double ms = ms_since(t0);
    check(w, c, Role::Alice, res.y0);
    check(w, c, Role::Bob, res.y1);
    r.samples_ms.push_back(ms);
    last = res.stats;
    if (log) *log << "iteration " << i + 1 << "/" << n << ": " << fixed(ms, 3) << " ms\n";
  }
  finish(r, last);
  return r;
}

BenchResult run_bench_alice(const BenchSpec& spec, TcpListener& listener, const std::string& key_file, std::ostream* log) {
  BenchWorkload w(spec);
  SymKey key = bench_key(spec, key_file);
  BenchResult r = result_shell(spec, "tcp", "run_party(alice) after accept; excludes setup, input generation and output checks");
  RunStats last;
  const std::size_t n = iterations_of(spec);
  for (std::size_t i = 0; i < n; ++i) {
    BenchCase c = w.make_case(i);
    auto oracle = fresh_oracle(w, key, spec.seed + i);
    auto ch = listener.accept();
    auto t0 = Clock::now();
    PartyResult res = run_party(Role::Alice, w.scheme(), c.a, nullptr, oracle.get(), *ch, run_options(spec, i));
    double ms = ms_since(t0);
    check(w, c, Role::Alice, res.output);
    r.samples_ms.push_back(ms);
    last = res.stats;
    if (log) *log << "alice iteration " << i + 1 << "/" << n << ": " << fixed(ms, 3) << " ms\n";
  }
  finish(r, last);
  return r;
}

void run_bench_bob(const BenchSpec& spec, const std::string& host, std::uint16_t port, const std::string& key_file, std::ostream* log) {
  BenchWorkload w(spec);
  SymKey key = bench_key(spec, key_file);
  const std::size_t n = iterations_of(spec);
  for (std::size_t i = 0; i < n; ++i) {
    BenchCase c = w.make_case(i);
    auto ch = TcpChannel::connect(host, port);
    PartyResult res = run_party(Role::Bob, w.scheme(), c.b, &key, nullptr, *ch, run_options(spec, i));
    check(w, c, Role::Bob, res.output);
    if (log) *log << "bob iteration " << i + 1 << "/" << n << " ok\n";
  }
}

TraceRecorder sequential_trace(StoreKind kind, std::size_t n, std::uint64_t seed) {
  auto store = make_store(kind, n, Drbg(seed, "trace-store"));
  for (std::size_t i = 0; i < n; ++i) store->put(i, i * 10 + 1);
  TraceRecorder t;
  store->set_trace(&t);
  for (std::size_t i = 0; i < n; ++i)
    if (store->get(i) != i * 10 + 1) throw Error("store returned a wrong value while tracing");
  store->set_trace(nullptr);
  return t;
}

}  // namespace hsfe
