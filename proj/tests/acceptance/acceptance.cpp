// Acceptance run: one PASS/FAIL line per criterion, exit status 0 only when
// every criterion passes. Oracles here are written independently of the
// library code they check.

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <limits>
#include <random>
#include <sstream>

#include "hsfe/apps/common.hpp"
#include "hsfe/apps/database.hpp"
#include "hsfe/apps/dijkstra.hpp"
#include "hsfe/bench.hpp"
#include "hsfe/branchfree.hpp"
#include "hsfe/circuit_builder.hpp"
#include "hsfe/enclave_test_access.hpp"
#include "hsfe/errors.hpp"
#include "hsfe/garbling.hpp"
#include "hsfe/oram.hpp"
#include "hsfe/ot.hpp"
#include "hsfe/stats.hpp"
#include "hsfe/transport.hpp"

using namespace hsfe;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Collects failures; keeps the first few messages.
struct Tally {
  std::size_t checks = 0, failures = 0;
  std::string first;
  void expect(bool ok, const std::string& what) {
    ++checks;
    if (ok) return;
    if (failures++ < 3) first += (first.empty() ? "" : "; ") + what;
  }
  Outcome outcome(const std::string& summary) const {
    if (failures == 0) return {true, summary + ", " + std::to_string(checks) + " checks"};
    return {false, std::to_string(failures) + "/" + std::to_string(checks) + " checks failed: " + first};
  }
};

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v, int digits = 2) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(digits);
  os << v;
  return os.str();
}

std::shared_ptr<const Circuit> share(Circuit c) { return std::make_shared<const Circuit>(std::move(c)); }

BitVec bits_of(std::uint64_t v, std::size_t n) {
  BitVec b(n);
  for (std::size_t i = 0; i < n; ++i) b[i] = (v >> i) & 1;
  return b;
}

// Plain evaluation written out again, gate by gate.
BitVec reference_eval(const Circuit& c, const BitVec& a, const BitVec& b) {
  std::vector<std::uint8_t> w(c.wire_count, 0);
  std::copy(a.begin(), a.end(), w.begin());
  std::copy(b.begin(), b.end(), w.begin() + a.size());
  for (const auto& g : c.gates) {
    std::uint8_t x = w[g.in0], y = w[g.in1];
    switch (g.kind) {
      case GateKind::XOR: w[g.out] = x ^ y; break;
      case GateKind::AND: w[g.out] = x & y; break;
      case GateKind::OR: w[g.out] = x | y; break;
      case GateKind::NOT: w[g.out] = x ^ 1; break;
      case GateKind::CONST: w[g.out] = g.in0 & 1; break;
    }
  }
  BitVec out;
  for (auto o : c.outputs) out.push_back(w[o]);
  return out;
}

// Structural laws of one garbling: rows per gate kind, one global offset.
std::string garbling_structure(const Circuit& c, const Garbling& g, const GarbleTrace& tr) {
  const std::size_t want = 3 * (c.count(GateKind::AND) + c.count(GateKind::OR));
  if (g.F.table_rows() != want) return "table rows " + std::to_string(g.F.table_rows()) + " != " + std::to_string(want);
  if (!tr.delta.permute_bit()) return "offset permute bit is 0";
  for (const auto& [x0, x1] : g.e.pairs)
    if ((x0 ^ x1) != tr.delta) return "input pair not separated by the global offset";
  return "";
}

std::optional<BitVec> garbled_eval(const Garbling& g, const BitVec& a, const BitVec& b) {
  auto X = encode_a(g.e, a);
  auto Xb = encode_b(g.e, b);
  X.insert(X.end(), Xb.begin(), Xb.end());
  return decode(g.d, evaluate(g.F, X));
}

std::mt19937_64& gen() {
  static std::mt19937_64 g(20240601);
  return g;
}

Circuit random_circuit(std::uint32_t alice, std::uint32_t bob, std::uint32_t gates) {
  Circuit c;
  c.alice_bits = alice;
  c.bob_bits = bob;
  std::uint32_t next = alice + bob;
  for (std::uint32_t i = 0; i < gates; ++i) {
    Gate g;
    std::uint32_t r = gen()() % 100;
    g.kind = r < 35 ? GateKind::XOR : r < 65 ? GateKind::AND : r < 85 ? GateKind::OR : r < 97 ? GateKind::NOT : GateKind::CONST;
    if (g.kind == GateKind::CONST) {
      g.in0 = gen()() & 1;
    } else {
      g.in0 = static_cast<std::uint32_t>(gen()() % next);
      g.in1 = g.kind == GateKind::NOT ? 0 : static_cast<std::uint32_t>(gen()() % next);
    }
    g.out = next++;
    c.gates.push_back(g);
  }
  c.wire_count = next;
  for (int i = 0; i < 8; ++i) c.outputs.push_back(next - 1 - static_cast<std::uint32_t>(gen()() % gates));
  return c;
}

// ---- 1 and 2 ----

std::vector<std::pair<std::string, Circuit>> small_generated_circuits() {
  std::vector<std::pair<std::string, Circuit>> v;
  for (std::uint32_t n = 1; n <= 5; ++n) v.push_back({"millionaires " + std::to_string(n), gen_millionaires(n)});
  v.push_back({"select 2x2", gen_select(2, 2, 1)});
  v.push_back({"select 4x1", gen_select(4, 1, 1)});
  v.push_back({"select 4x2", gen_select(4, 2, 1)});
  v.push_back({"select 3x2 q2", gen_select(3, 2, 2)});
  v.push_back({"database 2x2", gen_database_ops(2, 2, 1)});
  v.push_back({"database 2x1 q2", gen_database_ops(2, 1, 2)});
  v.push_back({"database 3x1 q1", gen_database_ops(3, 1, 1)});
  SensitiveGraphConfig s1{1, {}, {0}, 1};
  v.push_back({"region 1 node", gen_dijkstra_sensitive(s1)});
  SensitiveGraphConfig s2{2, {{0, 1}}, {0, 1}, 1};
  v.push_back({"region 2 nodes", gen_dijkstra_sensitive(s2)});
  FullGraphConfig f2{2, {{0, 1}}, 3};
  v.push_back({"graph 2 nodes", gen_dijkstra_full(f2)});
  FullGraphConfig f3{3, {{0, 1}, {1, 2}}, 2};
  v.push_back({"graph 3 nodes", gen_dijkstra_full(f3)});
  FullGraphConfig f4{4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}}, 1};
  v.push_back({"graph 4 nodes", gen_dijkstra_full(f4)});
  return v;
}

Outcome criteria_1_2(Tally& structure) {
  Tally t;
  std::size_t exhaustive_inputs = 0;
  Drbg rng(1, "garble");
  for (auto& [name, c] : small_generated_circuits()) {
    if (c.input_count() > 10) {
      t.expect(false, name + " has more than 10 inputs");
      continue;
    }
    auto sc = share(c);
    GarbleTrace tr;
    auto g = garble(sc, 128, rng, &tr);
    auto why = garbling_structure(c, g, tr);
    structure.expect(why.empty(), name + ": " + why);
    for (std::uint64_t x = 0; x < (1ull << c.input_count()); ++x) {
      BitVec a = bits_of(x, c.alice_bits), b = bits_of(x >> c.alice_bits, c.bob_bits);
      auto y = garbled_eval(g, a, b);
      BitVec want = eval_plain(c, a, b);
      t.expect(y && *y == want && want == reference_eval(c, a, b), name + " input " + std::to_string(x));
      ++exhaustive_inputs;
    }
  }
  for (int trial = 0; trial < 200; ++trial) {
    std::uint32_t gates = 50 + static_cast<std::uint32_t>(gen()() % 451);
    std::uint32_t na = 1 + gen()() % 24, nb = 1 + gen()() % 24;
    Circuit c = random_circuit(na, nb, gates);
    unsigned k = trial % 4 == 0 ? 80 : 128;
    GarbleTrace tr;
    auto g = garble(share(c), k, rng, &tr);
    auto why = garbling_structure(c, g, tr);
    structure.expect(why.empty(), "random circuit: " + why);
    BitVec a(na), b(nb);
    for (auto& x : a) x = gen()() & 1;
    for (auto& x : b) x = gen()() & 1;
    auto y = garbled_eval(g, a, b);
    t.expect(y && *y == eval_plain(c, a, b) && *y == reference_eval(c, a, b), "random trial " + std::to_string(trial));
  }
  return t.outcome(std::to_string(exhaustive_inputs) + " exhaustive inputs over " + std::to_string(small_generated_circuits().size()) +
                   " generated circuits, 200 random trials");
}

// ---- 3 ----

Outcome criterion_3() {
  Tally t;
  auto pairs_of = [](std::size_t n, std::size_t len) {
    OtPairs p(n);
    for (auto& [x0, x1] : p) {
      x0.resize(len);
      x1.resize(len);
      for (auto& c : x0) c = static_cast<std::uint8_t>(gen()());
      for (auto& c : x1) c = static_cast<std::uint8_t>(gen()());
    }
    return p;
  };
  std::size_t runs = 0;
  auto run = [&](const OtPairs& pairs, const BitVec& choice, std::uint64_t seed) {
    Drbg rs(seed, "sender"), rr(seed, "receiver");
    OtSender s(rs);
    OtReceiver r(choice, rr);
    Bytes m1 = s.first_message();
    Bytes m2 = r.respond(m1);
    // The sender's only products are its two messages; it learns nothing
    // back and outputs nothing.
    Bytes m3 = s.answer(m2, pairs);
    auto out = r.finish(m3);
    const std::size_t len = pairs.empty() ? 0 : pairs[0].first.size();
    t.expect(m1.size() + m2.size() + m3.size() == ot_message_bytes(pairs.size(), len), "message sizes");
    bool ok = out.size() == pairs.size();
    for (std::size_t j = 0; ok && j < out.size(); ++j) ok = out[j] == (choice[j] ? pairs[j].second : pairs[j].first);
    t.expect(ok, "batch of " + std::to_string(pairs.size()));
    ++runs;
  };
  for (std::size_t n = 1; n <= 8; ++n)
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) run(pairs_of(n, 17), bits_of(mask, n), n * 1000 + mask);
  for (std::size_t n : {16u, 100u, 1000u, 4096u}) {
    BitVec c(n);
    for (auto& x : c) x = gen()() & 1;
    run(pairs_of(n, 1 + gen()() % kOtMaxPayload), c, n);
  }
  return t.outcome(std::to_string(runs) + " transfers");
}

// ---- 4 and 5 ----

std::vector<std::uint64_t> array_oracle(std::vector<std::uint64_t> db, const std::vector<DbQuery>& qs) {
  std::vector<std::uint64_t> out(qs.size(), 0);
  for (bool sensitive_pass : {false, true})
    for (std::size_t i = 0; i < qs.size(); ++i) {
      if (qs[i].sensitive != sensitive_pass) continue;
      if (qs[i].kind == QueryKind::Set)
        db.at(qs[i].index) = qs[i].value;
      else
        out[i] = db.at(qs[i].index);
    }
  return out;
}

std::uint64_t textbook_dijkstra(const RoadGraph& g, const std::vector<std::uint64_t>& w, std::uint32_t s, std::uint32_t t) {
  const std::uint64_t inf = std::numeric_limits<std::uint64_t>::max();
  std::vector<std::uint64_t> d(g.nodes(), inf);
  std::vector<bool> done(g.nodes(), false);
  d[s] = 0;
  for (;;) {
    std::uint32_t u = g.nodes();
    for (std::uint32_t x = 0; x < g.nodes(); ++x)
      if (!done[x] && d[x] != inf && (u == g.nodes() || d[x] < d[u])) u = x;
    if (u == g.nodes()) break;
    done[u] = true;
    for (std::size_t i = 0; i < g.edges.size(); ++i) {
      const auto& e = g.edges[i];
      if (e.u == u) d[e.v] = std::min(d[e.v], d[u] + w[i]);
      if (e.v == u) d[e.u] = std::min(d[e.u], d[u] + w[i]);
    }
  }
  return d[t];
}

struct LiveRun {
  RunResult live;
  ExecResult ref;
};

LiveRun run_both(const PartitionScheme& p, const Bytes& a, const Bytes& b, std::uint64_t seed) {
  Drbg krng(seed, "acceptance-key");
  SymKey key = keygen(krng);
  Enclave e(kDefaultEnclaveBudget, seed);
  e.provision(key);
  register_round_fns(e, p);
  RunOptions opt;
  opt.seed = seed;
  LiveRun r{run_inprocess(p, a, b, key, e, opt), exec_reference(p, a, b, seed)};
  return r;
}

std::size_t even_round_rows(const PartitionScheme& p) {
  std::size_t rows = 0;
  for (const auto& r : p.rounds)
    if (const auto* e = std::get_if<EvenRound>(&r)) rows += 3 * (e->circuit->count(GateKind::AND) + e->circuit->count(GateKind::OR));
  return rows;
}

Outcome criteria_4_5(Outcome& routing, Tally& structure) {
  Tally t, route;
  const std::pair<std::uint32_t, std::uint32_t> db_sizes[] = {{4, 20}, {64, 100}, {500, 200}};
  for (auto [n, q] : db_sizes) {
    auto cfg = database_config(n, q);
    auto p = build_database_scheme(cfg, {Mode::Hybrid, StoreKind::Tree});
    const std::string tag = "database " + std::to_string(n) + "x" + std::to_string(q);
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
      Drbg rng(seed, "acceptance-db");
      auto inst = random_database_instance(cfg, rng);
      Bytes a = encode_table(inst.db), b = encode_queries(inst.queries);
      auto r = run_both(p, a, b, seed);
      auto want = array_oracle(inst.db, inst.queries);
      t.expect(decode_answers(r.live.y1) == want, tag + " seed " + std::to_string(seed) + ": live output");
      t.expect(r.ref.final_bob() == r.live.y1 && r.live.y0.empty() && r.ref.final_alice().empty(),
               tag + " seed " + std::to_string(seed) + ": reference output");
      structure.expect(r.live.stats.gc_table_rows == even_round_rows(p), tag + ": live table rows");
      for (const auto& v : database_routing_violations(p, r.live.transcript, inst.queries)) route.expect(false, tag + ": " + v);
      route.expect(true, tag);
    }
  }
  for (const char* s : {"20 (12, 20)", "50 (12, 20)", "100 (22, 25)"}) {
    auto cfg = parse_dijkstra_config(s);
    auto g = make_road_graph(cfg);
    auto p = build_dijkstra_scheme(g, {Mode::Hybrid, StoreKind::Tree});
    const std::string tag = std::string("dijkstra ") + s;
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
      Drbg rng(seed, "acceptance-graph");
      auto inst = random_dijkstra_instance(g, cfg, rng);
      auto r = run_both(p, encode_endpoints(inst.start, inst.end), encode_words(inst.weights), seed);
      RouteResult live = decode_route(r.live.y0);
      const std::uint64_t want = textbook_dijkstra(g, inst.weights, inst.start, inst.end);
      const std::string at = tag + " seed " + std::to_string(seed);
      t.expect(live.reachable && live.cost == want, at + ": cost " + std::to_string(live.cost) + " vs " + std::to_string(want));
      t.expect(r.ref.final_alice() == r.live.y0 && r.live.y1.empty(), at + ": reference output");
      t.expect(check_route(g, inst.weights, inst.start, inst.end, live).empty(), at + ": route legality");
      structure.expect(r.live.stats.gc_table_rows == even_round_rows(p), tag + ": live table rows");
      for (const auto& v : dijkstra_routing_violations(p, r.live.transcript, inst)) route.expect(false, at + ": " + v);
      route.expect(true, tag);
    }
  }
  routing = route.outcome("150 hybrid transcripts scanned");
  return t.outcome("3 database sizes and 3 graph configurations, 25 seeds each");
}

// ---- 6 ----

Outcome criterion_6() {
  Tally t;
  const std::size_t n = 500, q = 100;
  std::vector<std::uint64_t> seq(q), rep(q, 137);
  for (std::size_t i = 0; i < q; ++i) seq[i] = i;
  auto cmp = compare_schedules(n, seq, rep, 60, 8, 6);
  t.expect(cmp.counts_a == cmp.counts_b && cmp.counts_a.size() == q, "per-query touch counts differ");
  t.expect(cmp.p_value > 0.01, "chi-squared p = " + fmt(cmp.p_value, 4));
  auto diag = sequential_trace(StoreKind::Unblinded, n, 6);
  bool diagonal = diag.accesses().size() == n;
  for (std::size_t i = 0; diagonal && i < n; ++i) diagonal = diag.accesses()[i].slot == i && diag.accesses()[i].step == i + 1;
  t.expect(diagonal, "unblinded trace is not the diagonal");
  auto linear = sequential_trace(StoreKind::Linear, n, 6);
  for (auto c : linear.per_step_counts()) t.expect(c == n, "linear scan touches");
  auto tree = sequential_trace(StoreKind::Tree, n, 6);
  auto counts = tree.per_step_counts();
  for (auto c : counts) t.expect(c == counts.front(), "tree touches vary");
  return t.outcome("p = " + fmt(cmp.p_value, 3) + ", " + std::to_string(counts.front()) + " touches per tree read");
}

// ---- 7 ----

Outcome criterion_7() {
  Tally t;
  for (std::uint64_t a = 0; a < 256; ++a)
    for (std::uint64_t b = 0; b < 256; ++b) {
      t.expect(bf_eq(a, b) == (a == b ? 1u : 0u), "bf_eq");
      t.expect(bf_lt(a, b) == (a < b ? 1u : 0u), "bf_lt");
      t.expect(bf_min_update(a, b) == (b < a ? b : a), "bf_min_update");
      t.expect(bf_select(1, a, b) == a && bf_select(0, a, b) == b, "bf_select");
    }
  // Pick 1 when the values match and 2 otherwise.
  t.expect(bf_select(bf_eq(5, 5), 1, 2) == 1, "select example, equal");
  t.expect(bf_select(bf_eq(5, 6), 1, 2) == 2, "select example, different");
  return t.outcome("all 8-bit operand pairs");
}

// ---- 8 ----

BenchResult bench(BenchApp app, Mode mode, StoreKind store, std::size_t iters, std::function<void(BenchSpec&)> size) {
  BenchSpec s;
  s.app = app;
  s.mode = mode;
  s.store = store;
  s.iters = iters;
  s.seed = 8;
  size(s);
  return run_bench_inprocess(s);
}

// Fails only when a is slower than b and the 95% intervals are disjoint.
bool faster_or_overlapping(const BenchResult& a, const BenchResult& b) {
  Summary sa = summarize(a.samples_ms), sb = summarize(b.samples_ms);
  return sa.mean < sb.mean || sa.lo() <= sb.hi();
}

std::string ms(const BenchResult& r) { return fmt(r.mean_ms, 1) + " ms +-" + fmt(r.ci95_rel_pct, 1) + "%"; }

Outcome criterion_8() {
  auto dij100 = [](BenchSpec& s) { s.graph = dijkstra_preset(100); };
  auto db = [](BenchSpec& s) {
    s.entries = 500;
    s.queries = 2500;
  };
  auto hybrid = bench(BenchApp::Dijkstra, Mode::Hybrid, StoreKind::Tree, 10, dij100);
  auto gc = bench(BenchApp::Dijkstra, Mode::Gc, StoreKind::Tree, 10, dij100);
  auto sgx = bench(BenchApp::Dijkstra, Mode::Sgx, StoreKind::Tree, 100, dij100);
  auto linear = bench(BenchApp::Database, Mode::Sgx, StoreKind::Linear, 10, db);
  auto tree = bench(BenchApp::Database, Mode::Sgx, StoreKind::Tree, 10, db);
  bool a = faster_or_overlapping(hybrid, gc), b = faster_or_overlapping(sgx, hybrid), c = faster_or_overlapping(linear, tree);
  std::string d = "(a) hybrid " + ms(hybrid) + " vs gc " + ms(gc) + ", ratio " + fmt(gc.mean_ms / hybrid.mean_ms, 1) + "x" +
                  (gc.mean_ms >= 2 * hybrid.mean_ms ? "" : " (below the expected 2x)") + "; (b) sgx " + ms(sgx) + " vs hybrid; (c) linear " +
                  ms(linear) + " vs tree " + ms(tree);
  return {a && b && c, d};
}

// ---- 9 ----

Outcome criterion_9() {
  Tally t;
  auto cfg = database_config(8, 20, 0.1);
  auto p = build_database_scheme(cfg, {Mode::Hybrid, StoreKind::Tree});
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    Drbg rng(seed, "acceptance-blackbox");
    auto inst = random_database_instance(cfg, rng, 0.3);
    Bytes a = encode_table(inst.db), b = encode_queries(inst.queries);
    SymKey key = keygen(rng);
    Enclave e(kDefaultEnclaveBudget, seed);
    e.provision(key);
    register_round_fns(e, p);
    RunOptions opt;
    opt.seed = seed;
    auto clean = run_inprocess(p, a, b, key, e, opt);
    t.expect(decode_answers(clean.y1) == array_oracle(inst.db, inst.queries), "clean run output");

    // Alice's view: no key, no plaintext of Bob's input or of any sensitive query.
    Bytes va = view_of(clean.transcript, Role::Alice).serialize();
    t.expect(!contains(va, Bytes(key.bytes.begin(), key.bytes.end())), "key in Alice's view");
    t.expect(!contains(va, b), "Bob's input in Alice's view");
    for (const auto& q : inst.queries)
      if (q.sensitive) t.expect(!contains(va, encode_queries({q})) , "sensitive query in Alice's view");

    // Tampering gives bottom and leaves the enclave state alone.
    const Bytes before = EnclaveTestAccess::snapshot(e);
    const FrameKind target = seed % 2 ? FrameKind::Ctx1 : FrameKind::Ctx2;
    const std::size_t pos = rng.uniform(64);
    opt.tamper = [&](const Frame& f) -> std::optional<Bytes> {
      if (f.kind != target) return std::nullopt;
      Bytes c = *f.payload;
      c[pos % c.size()] ^= static_cast<std::uint8_t>(1 + rng.uniform(255));
      return c;
    };
    bool rejected = false;
    try {
      run_inprocess(p, a, b, key, e, opt);
    } catch (const AuthenticationError&) {
      rejected = true;
    }
    t.expect(rejected, std::string("tampered ") + frame_kind_name(target) + " accepted");
    if (target == FrameKind::Ctx1) t.expect(EnclaveTestAccess::snapshot(e) == before, "state changed by a rejected query");
  }
  return t.outcome("100 randomized runs, CTX1 and CTX2 tampering");
}

// ---- 10 ----

std::string tcp_equivalence(const std::string& tag, const PartitionScheme& p, const Bytes& a, const Bytes& b, std::uint64_t seed) {
  Drbg krng(seed, "acceptance-key");
  SymKey key = keygen(krng);
  RunOptions opt;
  opt.seed = seed;
  Enclave e1(kDefaultEnclaveBudget, seed);
  e1.provision(key);
  register_round_fns(e1, p);
  Transcript local = run_inprocess(p, a, b, key, e1, opt).transcript;

  char path[] = "/tmp/hsfe-bob-XXXXXX";
  int fd = mkstemp(path);
  if (fd < 0) return tag + ": no temp file";
  close(fd);
  TcpListener listener;
  std::fflush(nullptr);
  pid_t child = fork();
  if (child == 0) {
    int code = 0;
    try {
      auto ch = TcpChannel::connect("127.0.0.1", listener.port());
      auto bob = run_party(Role::Bob, p, b, &key, nullptr, *ch, opt);
      Bytes ser = bob.partial.serialize();
      std::ofstream(path, std::ios::binary).write(reinterpret_cast<const char*>(ser.data()), static_cast<std::streamsize>(ser.size()));
    } catch (const std::exception& ex) {
      std::cerr << "bob: " << ex.what() << "\n";
      code = 1;
    }
    std::_Exit(code);
  }
  std::string err;
  Transcript alice_part;
  try {
    Enclave e2(kDefaultEnclaveBudget, seed);
    e2.provision(key);
    register_round_fns(e2, p);
    auto ch = listener.accept();
    alice_part = run_party(Role::Alice, p, a, nullptr, &e2, *ch, opt).partial;
  } catch (const std::exception& ex) {
    err = tag + ": alice: " + ex.what();
  }
  int status = 0;
  waitpid(child, &status, 0);
  if (!err.empty()) return err;
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) return tag + ": bob process failed";
  std::ifstream in(path, std::ios::binary);
  Bytes ser((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::remove(path);
  Transcript merged = merge_transcripts(alice_part, Transcript::parse(ser));
  if (merged.serialize() != local.serialize()) return tag + ": transcripts differ";
  return "";
}

Outcome criterion_10() {
  Tally t;
  auto cfg = database_config(64, 100);
  auto pdb = build_database_scheme(cfg, {Mode::Hybrid, StoreKind::Tree});
  Drbg rng(10, "acceptance-tcp");
  auto inst = random_database_instance(cfg, rng);
  auto e1 = tcp_equivalence("database 64x100", pdb, encode_table(inst.db), encode_queries(inst.queries), 10);
  t.expect(e1.empty(), e1);
  auto gcfg = parse_dijkstra_config("20 (12, 20)");
  auto g = make_road_graph(gcfg);
  auto pdj = build_dijkstra_scheme(g, {Mode::Hybrid, StoreKind::Tree});
  auto dinst = random_dijkstra_instance(g, gcfg, rng);
  auto e2 = tcp_equivalence("dijkstra 20 (12, 20)", pdj, encode_endpoints(dinst.start, dinst.end), encode_words(dinst.weights), 11);
  t.expect(e2.empty(), e2);
  return t.outcome("database 64x100 and dijkstra 20 (12, 20) byte-identical");
}

void report(int id, const std::string& name, const Outcome& o, double secs) {
  std::cout << "criterion " << id << " " << (o.pass ? "PASS" : "FAIL") << "  " << name << ": " << o.detail << " [" << fmt(secs, 1) << " s]"
            << std::endl;
}

Outcome guarded(const std::function<Outcome()>& f) {
  try {
    return f();
  } catch (const std::exception& e) {
    return {false, std::string("exception: ") + e.what()};
  }
}

}  // namespace

int main(int argc, char** argv) {
  // Optional list of criteria to run, e.g. "acceptance 1 7".
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
  auto wanted = [&](int id) { return only.empty() || std::find(only.begin(), only.end(), id) != only.end(); };
  bool all = true;
  Tally structure;

  if (wanted(1) || wanted(2)) {
    auto t0 = Clock::now();
    auto o = guarded([&] { return criteria_1_2(structure); });
    if (wanted(1)) report(1, "garbling correctness", o, seconds_since(t0));
    all &= o.pass || !wanted(1);
  }
  if (wanted(3)) {
    auto t0 = Clock::now();
    auto o = guarded(criterion_3);
    report(3, "oblivious transfer", o, seconds_since(t0));
    all &= o.pass;
  }
  if (wanted(4) || wanted(5) || wanted(2)) {
    auto t0 = Clock::now();
    Outcome routing{false, "not run"};
    auto o = guarded([&] { return criteria_4_5(routing, structure); });
    double secs = seconds_since(t0);
    if (wanted(4)) report(4, "hybrid = reference = plain", o, secs);
    if (wanted(5)) report(5, "routing discipline", routing, secs);
    all &= (o.pass || !wanted(4)) && (routing.pass || !wanted(5));
  }
  if (wanted(2)) {
    auto o = structure.outcome("every garbling above and every live garbled round");
    report(2, "garbled circuit structure", o, 0);
    all &= o.pass;
  }
  const std::pair<int, std::pair<const char*, std::function<Outcome()>>> rest[] = {
      {6, {"ORAM trace", criterion_6}},
      {7, {"branch-free primitives", criterion_7}},
      {8, {"performance direction", criterion_8}},
      {9, {"AEAD and enclave black box", criterion_9}},
      {10, {"transport equivalence", criterion_10}},
  };
  for (const auto& [id, nf] : rest) {
    if (!wanted(id)) continue;
    auto t0 = Clock::now();
    auto o = guarded(nf.second);
    report(id, nf.first, o, seconds_since(t0));
    all &= o.pass;
  }
  std::cout << (all ? "ALL PASS" : "SOME CRITERIA FAILED") << std::endl;
  return all ? 0 : 1;
}
