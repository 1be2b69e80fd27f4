#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hsfe/apps/database.hpp"
#include "hsfe/apps/dijkstra.hpp"
#include "hsfe/apps/millionaires.hpp"
#include "hsfe/bench.hpp"
#include "hsfe/errors.hpp"
#include "hsfe/garbling.hpp"

namespace py = pybind11;
using namespace hsfe;

namespace {

py::bytes to_py(const Bytes& b) { return py::bytes(reinterpret_cast<const char*>(b.data()), b.size()); }

Bytes from_py(const py::bytes& b) {
  std::string_view s = b;
  return Bytes(s.begin(), s.end());
}

py::dict stats_dict(const RunStats& s) {
  py::dict d;
  d["bytes_on_wire"] = s.bytes_on_wire;
  d["gc_table_rows"] = s.gc_table_rows;
  d["ot_count"] = s.ot_count;
  return d;
}

// One live run with a fresh key and enclave, both derived from the seed.
RunResult run_scheme(const PartitionScheme& p, const Bytes& a, const Bytes& b, std::uint64_t seed, unsigned k) {
  Drbg krng(seed, "py-key");
  SymKey key = keygen(krng);
  Enclave e(kDefaultEnclaveBudget, seed);
  e.provision(key);
  register_round_fns(e, p);
  RunOptions opt;
  opt.seed = seed;
  opt.k = k;
  py::gil_scoped_release nogil;
  return run_inprocess(p, a, b, key, e, opt);
}

Bytes int_bytes(const py::int_& v, std::uint32_t bits) {
  const std::size_t n = millionaires_input_bytes(bits);
  py::object raw = v.attr("to_bytes")(n, "big");
  return from_py(raw.cast<py::bytes>());
}

std::vector<DbQuery> queries_from(const std::vector<std::tuple<std::string, std::uint64_t, std::uint64_t, bool>>& qs) {
  std::vector<DbQuery> out;
  for (const auto& [kind, index, value, sensitive] : qs) {
    DbQuery q;
    if (kind == "select")
      q.kind = QueryKind::Select;
    else if (kind == "set")
      q.kind = QueryKind::Set;
    else
      throw ConfigError("query kind must be 'select' or 'set', got '" + kind + "'");
    q.index = index;
    q.value = value;
    q.sensitive = sensitive;
    out.push_back(q);
  }
  return out;
}

py::dict bench_dict(const BenchResult& r) {
  py::dict d;
  d["app"] = r.app;
  d["mode"] = r.mode;
  d["store"] = r.store;
  d["transport"] = r.transport;
  d["size"] = r.size;
  d["k"] = r.k;
  d["iterations"] = r.iterations;
  d["mean_ms"] = r.mean_ms;
  d["ci95_rel_pct"] = r.ci95_rel_pct;
  d["bytes_on_wire"] = r.bytes_on_wire;
  d["gc_table_rows"] = r.gc_table_rows;
  d["ot_count"] = r.ot_count;
  d["timing_scope"] = r.timing_scope;
  d["samples_ms"] = r.samples_ms;
  d["csv"] = to_csv_row(r);
  return d;
}

}  // namespace

PYBIND11_MODULE(_hybridsfe, m) {
  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<CircuitError>(m, "CircuitError", base.ptr());
  auto proto = py::register_exception<ProtocolError>(m, "ProtocolError", base.ptr());
  py::register_exception<AuthenticationError>(m, "AuthenticationError", proto.ptr());

  py::class_<Circuit>(m, "Circuit")
      .def_static("parse", [](const std::string& text) { return parse_circuit(text); })
      .def("serialize", [](const Circuit& c) { return serialize_circuit(c); })
      .def_readonly("alice_bits", &Circuit::alice_bits)
      .def_readonly("bob_bits", &Circuit::bob_bits)
      .def_readonly("wire_count", &Circuit::wire_count)
      .def_property_readonly("output_count", [](const Circuit& c) { return c.outputs.size(); })
      .def_property_readonly("gate_count", [](const Circuit& c) { return c.gates.size(); })
      .def_property_readonly("nonlinear_count", &Circuit::nonlinear_count)
      .def("eval", [](const Circuit& c, const BitVec& a, const BitVec& b) { return eval_plain(c, a, b); }, py::arg("a"), py::arg("b"))
      .def(
          "garble_evaluate",
          [](const Circuit& c, const BitVec& a, const BitVec& b, unsigned k, std::uint64_t seed) {
            Drbg rng(seed, "py-garble");
            auto g = garble(std::make_shared<const Circuit>(c), k, rng);
            auto X = encode_a(g.e, a);
            auto Xb = encode_b(g.e, b);
            X.insert(X.end(), Xb.begin(), Xb.end());
            auto y = decode(g.d, evaluate(g.F, X));
            if (!y) throw GarblingError("decoding failed");
            return py::make_tuple(*y, g.F.table_rows());
          },
          py::arg("a"), py::arg("b"), py::arg("k") = 128, py::arg("seed") = 0,
          "Garble, encode both inputs, evaluate and decode. Returns (outputs, table_rows).");

  m.def("millionaires_circuit", [](std::uint32_t bits) { return *millionaires_circuit(bits); }, py::arg("bits"));

  m.def(
      "millionaires",
      [](const py::int_& a, const py::int_& b, std::uint32_t bits, const std::string& mode, std::uint64_t seed, unsigned k) {
        auto p = build_millionaires(bits, parse_mode(mode));
        auto r = run_scheme(p, int_bytes(a, bits), int_bytes(b, bits), seed, k);
        py::dict d;
        d["alice_richer"] = !r.y0.empty() && r.y0[0] == 1;
        d["stats"] = stats_dict(r.stats);
        return d;
      },
      py::arg("a"), py::arg("b"), py::arg("bits") = 64, py::arg("mode") = "gc", py::arg("seed") = 1, py::arg("k") = 128,
      "Alice learns whether a > b.");

  m.def(
      "database",
      [](const std::vector<std::uint64_t>& db, const std::vector<std::tuple<std::string, std::uint64_t, std::uint64_t, bool>>& qs,
         const std::string& mode, const std::string& store, std::uint64_t seed) {
        auto q = queries_from(qs);
        DatabaseConfig cfg{static_cast<std::uint32_t>(db.size()), static_cast<std::uint32_t>(q.size()), 0};
        for (const auto& x : q) cfg.sensitive += x.sensitive;
        check_database_inputs(cfg, db, q);
        auto p = build_database_scheme(cfg, {parse_mode(mode), parse_store_kind(store)});
        auto r = run_scheme(p, encode_table(db), encode_queries(q), seed, 128);
        py::dict d;
        d["answers"] = decode_answers(r.y1);
        d["stats"] = stats_dict(r.stats);
        return d;
      },
      py::arg("db"), py::arg("queries"), py::arg("mode") = "hybrid", py::arg("store") = "tree", py::arg("seed") = 1,
      "Queries are (kind, index, value, sensitive) with kind 'select' or 'set'. Bob gets one answer per query, 0 for sets.");

  m.def("database_plain", [](const std::vector<std::uint64_t>& db, const std::vector<std::tuple<std::string, std::uint64_t, std::uint64_t, bool>>& qs) {
    return database_plain(db, queries_from(qs));
  });

  m.def(
      "road_graph",
      [](const std::string& config) {
        auto g = make_road_graph(parse_dijkstra_config(config));
        py::list edges;
        for (const auto& e : g.edges) edges.append(py::make_tuple(e.u, e.v, static_cast<int>(e.kind)));
        py::dict d;
        d["outside"] = g.outside;
        d["inside"] = g.inside;
        d["edges"] = edges;
        return d;
      },
      py::arg("config"), "Public topology of an \"N (E, S)\" configuration. Edge kinds: 0 outside, 1 boundary, 2 inside.");

  m.def(
      "random_route_instance",
      [](const std::string& config, std::uint64_t seed) {
        auto cfg = parse_dijkstra_config(config);
        Drbg rng(seed, "py-graph");
        auto inst = random_dijkstra_instance(make_road_graph(cfg), cfg, rng);
        return py::make_tuple(inst.weights, inst.start, inst.end);
      },
      py::arg("config"), py::arg("seed") = 1, "Returns (weights, start, end).");

  m.def(
      "dijkstra",
      [](const std::string& config, const std::vector<std::uint64_t>& weights, std::uint32_t start, std::uint32_t end, const std::string& mode,
         std::uint64_t seed) {
        auto g = make_road_graph(parse_dijkstra_config(config));
        check_dijkstra_inputs(g, weights, start, end);
        auto p = build_dijkstra_scheme(g, {parse_mode(mode), StoreKind::Tree});
        auto r = run_scheme(p, encode_endpoints(start, end), encode_words(weights), seed, 128);
        RouteResult route = decode_route(r.y0);
        py::dict d;
        d["reachable"] = route.reachable;
        d["cost"] = route.cost;
        d["nodes"] = route.nodes;
        d["stats"] = stats_dict(r.stats);
        return d;
      },
      py::arg("config"), py::arg("weights"), py::arg("start"), py::arg("end"), py::arg("mode") = "hybrid", py::arg("seed") = 1,
      "Alice's shortest route over Bob's edge weights.");

  m.def(
      "bench",
      [](const std::string& app, const std::string& mode, const std::string& store, std::size_t iters, std::uint64_t seed, std::uint32_t bits,
         std::uint32_t entries, std::uint32_t queries, const std::string& graph) {
        BenchSpec s;
        s.app = parse_bench_app(app);
        s.mode = parse_mode(mode);
        s.store = parse_store_kind(store);
        s.iters = iters;
        s.seed = seed;
        s.bits = bits;
        s.entries = entries;
        s.queries = queries;
        if (!graph.empty()) s.graph = parse_dijkstra_config(graph);
        check_bench_size(s, false);
        BenchResult r;
        {
          py::gil_scoped_release nogil;
          r = run_bench_inprocess(s);
        }
        return bench_dict(r);
      },
      py::arg("app"), py::arg("mode") = "sgx", py::arg("store") = "tree", py::arg("iters") = 0, py::arg("seed") = 1, py::arg("bits") = 1024,
      py::arg("entries") = 500, py::arg("queries") = 2500, py::arg("graph") = "", "In-process timing run; the dict carries the CSV row too.");

  m.def("bench_csv_header", &bench_csv_header);
}
