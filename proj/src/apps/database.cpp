#include "hsfe/apps/database.hpp"

#include <cmath>
#include <filesystem>
#include <map>
#include <mutex>
#include <sstream>

#include "hsfe/branchfree.hpp"
#include "hsfe/circuit_builder.hpp"
#include "hsfe/codec.hpp"
#include "hsfe/errors.hpp"

namespace hsfe {

DatabaseConfig database_config(std::uint32_t entries, std::uint32_t queries, double sensitive_fraction) {
  if (!(sensitive_fraction >= 0 && sensitive_fraction <= 1)) throw ConfigError("sensitive fraction must lie in [0, 1]");
  DatabaseConfig c;
  c.entries = entries;
  c.queries = queries;
  c.sensitive = static_cast<std::uint32_t>(std::lround(queries * sensitive_fraction));
  return c;
}

Bytes encode_table(const std::vector<std::uint64_t>& db) { return encode_words(db); }
std::vector<std::uint64_t> decode_table(ByteView b) { return decode_words(b); }

Bytes encode_queries(const std::vector<DbQuery>& q) {
  Writer w;
  w.u32(static_cast<std::uint32_t>(q.size()));
  for (const auto& x : q) w.u8(static_cast<std::uint8_t>(x.kind)).u8(x.sensitive ? 1 : 0).u64(x.index).u64(x.value);
  return std::move(w).bytes();
}

std::vector<DbQuery> decode_queries(ByteView b) {
  Reader r(b);
  std::uint32_t n = r.u32();
  if (r.remaining() != std::size_t(n) * 18) throw ProtocolError("query list has the wrong length");
  std::vector<DbQuery> q(n);
  for (auto& x : q) {
    std::uint8_t kind = r.u8(), sens = r.u8();
    if (kind > 1 || sens > 1) throw ProtocolError("malformed query record");
    x.kind = static_cast<QueryKind>(kind);
    x.sensitive = sens != 0;
    x.index = r.u64();
    x.value = r.u64();
  }
  return q;
}

void check_database_inputs(const DatabaseConfig& cfg, const std::vector<std::uint64_t>& db, const std::vector<DbQuery>& q) {
  if (cfg.entries == 0) throw ConfigError("database needs at least one entry");
  if (cfg.sensitive > cfg.queries) throw ConfigError("more sensitive queries than queries");
  if (db.size() != cfg.entries) throw ConfigError("table has " + std::to_string(db.size()) + " entries, expected " + std::to_string(cfg.entries));
  if (q.size() != cfg.queries) throw ConfigError("got " + std::to_string(q.size()) + " queries, expected " + std::to_string(cfg.queries));
  std::uint32_t s = 0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i].index >= cfg.entries) throw ConfigError("query " + std::to_string(i) + ": index " + std::to_string(q[i].index) + " out of range");
    s += q[i].sensitive;
  }
  if (s != cfg.sensitive) throw ConfigError(std::to_string(s) + " queries are flagged sensitive, the configuration says " + std::to_string(cfg.sensitive));
}

std::vector<std::uint64_t> database_plain(std::vector<std::uint64_t> db, const std::vector<DbQuery>& q) {
  std::vector<std::uint64_t> ans(q.size(), 0);
  for (int phase = 0; phase < 2; ++phase)
    for (std::size_t i = 0; i < q.size(); ++i) {
      if (q[i].sensitive != (phase == 1)) continue;
      if (q[i].index >= db.size()) throw ConfigError("index out of range");
      if (q[i].kind == QueryKind::Set)
        db[q[i].index] = q[i].value;
      else
        ans[i] = db[q[i].index];
    }
  return ans;
}

std::vector<std::uint64_t> decode_answers(ByteView y) { return decode_words(y); }

namespace {

class DbState final : public StateObject {
 public:
  explicit DbState(std::unique_ptr<Store> s) : store(std::move(s)) {}
  std::size_t memory_bytes() const override { return store->memory_bytes(); }
  Bytes snapshot() const override { return encode_words(store->dump()); }
  std::unique_ptr<Store> store;
};

Store& load_table(EnclaveState& st, StoreKind kind, const std::vector<std::uint64_t>& table) {
  Bytes seed = st.rng().bytes(32);
  auto& s = st.install("db", std::make_unique<DbState>(make_store(kind, table.size(), Drbg(seed))));
  for (std::size_t i = 0; i < table.size(); ++i) s.store->put(i, table[i]);
  s.store->set_trace(st.trace());
  return *s.store;
}

void check_queries(const std::vector<DbQuery>& q, std::size_t n, std::size_t count) {
  if (q.size() != count) throw ConfigError("expected " + std::to_string(count) + " queries, got " + std::to_string(q.size()));
  for (const auto& x : q)
    if (x.index >= n) throw ConfigError("query index " + std::to_string(x.index) + " out of range");
}

// Runs the queries whose sensitivity flag equals `phase`, writing their
// answers into `ans`. Every query costs one read and one write of its index
// whether it runs or not, so neither the kind nor the flag shows up in the
// store's access pattern.
void run_phase_hardened(Store& s, const std::vector<DbQuery>& q, std::uint64_t phase, std::vector<std::uint64_t>& ans) {
  for (std::size_t i = 0; i < q.size(); ++i) {
    std::uint64_t old = s.get(q[i].index);
    // hardened:begin database query
    std::uint64_t active = bf_eq(static_cast<std::uint64_t>(q[i].sensitive), phase);
    std::uint64_t is_set = static_cast<std::uint64_t>(q[i].kind);
    std::uint64_t write = bf_select(active & is_set, q[i].value, old);
    ans[i] = bf_select(active, bf_select(is_set, 0, old), ans[i]);
    // hardened:end
    s.put(q[i].index, write);
  }
}

void run_phase_naive(Store& s, const std::vector<DbQuery>& q, bool phase, std::vector<std::uint64_t>& ans) {
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i].sensitive != phase) continue;
    if (q[i].kind == QueryKind::Set)
      s.put(q[i].index, q[i].value);
    else
      ans[i] = s.get(q[i].index);
  }
}

std::shared_ptr<const Circuit> ops_circuit(std::uint32_t n, std::uint32_t q) {
  static std::mutex mu;
  static std::map<std::pair<std::uint32_t, std::uint32_t>, std::shared_ptr<const Circuit>> cache;
  std::lock_guard lock(mu);
  auto& c = cache[{n, q}];
  if (!c) c = std::make_shared<const Circuit>(gen_database_ops(n, 64, q));
  return c;
}

BitVec table_bits(const std::vector<std::uint64_t>& t) {
  BitVec b;
  b.reserve(t.size() * 64);
  for (auto x : t) push_word_bits(b, x, 64);
  return b;
}

BitVec query_bits(const std::vector<const DbQuery*>& q, std::uint32_t n) {
  const std::uint32_t ib = bits_for(n - 1);
  BitVec b;
  for (const auto* x : q) {
    b.push_back(static_cast<std::uint8_t>(x->kind));
    push_word_bits(b, x->index, ib);
    push_word_bits(b, x->value, 64);
  }
  return b;
}

// What gen_database_ops computes, without the circuit.
BitVec ops_plain(std::vector<std::uint64_t> db, const std::vector<const DbQuery*>& q) {
  BitVec out;
  for (const auto* x : q) {
    bool in_range = x->index < db.size();
    std::uint64_t got = in_range ? db[x->index] : 0;
    push_word_bits(out, x->kind == QueryKind::Set ? 0 : got, 64);
    if (x->kind == QueryKind::Set && in_range) db[x->index] = x->value;
  }
  return out;
}

std::vector<const DbQuery*> pick(const std::vector<DbQuery>& q, bool sensitive) {
  std::vector<const DbQuery*> out;
  for (const auto& x : q)
    if (x.sensitive == sensitive) out.push_back(&x);
  return out;
}

std::vector<const DbQuery*> two_phase_order(const std::vector<DbQuery>& q) {
  auto out = pick(q, false);
  auto s = pick(q, true);
  out.insert(out.end(), s.begin(), s.end());
  return out;
}

std::vector<DbQuery> copy_of(const std::vector<const DbQuery*>& q) {
  std::vector<DbQuery> out;
  for (const auto* x : q) out.push_back(*x);
  return out;
}

// Answers of `subset` (circuit output bits or a word list) put back at their
// positions in the full query list.
std::vector<std::uint64_t> words_of(const BitVec& y) {
  std::vector<std::uint64_t> w;
  std::size_t off = 0;
  while (off < y.size()) w.push_back(read_word_bits(y, off, 64));
  return w;
}

PartitionScheme single_enclave(const DatabaseConfig& cfg, bool hardened, StoreKind kind, const std::string& name) {
  return sgx_scheme(
      name,
      [cfg, hardened, kind](ByteView u, ByteView v, EnclaveState& st) {
        auto table = decode_table(split_input(u).first);
        auto q = decode_queries(split_input(v).first);
        if (table.size() != cfg.entries) throw ConfigError("table size differs from the configuration");
        check_queries(q, cfg.entries, cfg.queries);
        Store& s = load_table(st, hardened ? kind : StoreKind::Unblinded, table);
        std::vector<std::uint64_t> ans(q.size(), 0);
        for (int phase = 0; phase < 2; ++phase) {
          if (hardened)
            run_phase_hardened(s, q, static_cast<std::uint64_t>(phase), ans);
          else
            run_phase_naive(s, q, phase == 1, ans);
        }
        return RoundOutput{{}, encode_words(ans)};
      },
      ReplyMode::Bob);
}

}  // namespace

PartitionScheme build_database_scheme(const DatabaseConfig& cfg, const AppOptions& opt) {
  if (cfg.entries == 0) throw ConfigError("database needs at least one entry");
  if (cfg.sensitive > cfg.queries) throw ConfigError("more sensitive queries than queries");
  std::string name = "database-" + std::string(mode_name(opt.mode)) + "-" + std::to_string(cfg.entries) + "x" + std::to_string(cfg.queries);
  auto whole_b = [cfg](ByteView b, RandomSource&) {
    auto q = decode_queries(b);
    check_queries(q, cfg.entries, cfg.queries);
    return std::vector<Bytes>{Bytes(b.begin(), b.end())};
  };
  auto whole_a = [cfg](ByteView a, RandomSource&) {
    if (decode_table(a).size() != cfg.entries) throw ConfigError("table size differs from the configuration");
    return std::vector<Bytes>{Bytes(a.begin(), a.end())};
  };

  PartitionScheme p;
  switch (opt.mode) {
    case Mode::Naive: p = single_enclave(cfg, false, StoreKind::Unblinded, name); break;
    case Mode::Sgx: p = single_enclave(cfg, true, opt.store, name); break;
    case Mode::Gc: {
      EvenRound r;
      r.circuit = ops_circuit(cfg.entries, cfg.queries);
      r.alice_bits = [](ByteView u) { return table_bits(decode_table(split_input(u).first)); };
      r.bob_bits = [cfg](ByteView v) { return query_bits(two_phase_order(decode_queries(split_input(v).first)), cfg.entries); };
      r.plain = [](ByteView u, ByteView v) {
        auto q = decode_queries(split_input(v).first);
        return ops_plain(decode_table(split_input(u).first), two_phase_order(q));
      };
      r.output = [](const BitVec& y, ByteView v) {
        auto q = decode_queries(split_input(v).first);
        auto order = two_phase_order(q);
        auto w = words_of(y);
        if (w.size() != q.size()) throw ProtocolError("circuit returned the wrong number of answers");
        std::vector<std::uint64_t> ans(q.size());
        for (std::size_t i = 0; i < order.size(); ++i) ans[static_cast<std::size_t>(order[i] - q.data())] = w[i];
        return encode_words(ans);
      };
      r.to = Role::Bob;
      p = gc_scheme(name, std::move(r));
      break;
    }
    case Mode::Hybrid: {
      p.name = name;
      const StoreKind kind = opt.store;
      OddRound load{"database-load-" + std::to_string(cfg.entries) + "x" + std::to_string(cfg.queries) + "-" + std::string(store_kind_name(kind)),
                    [cfg, kind](ByteView u, ByteView v, EnclaveState& st) {
                      auto table = decode_table(split_input(u).first);
                      auto q = decode_queries(split_input(v).first);
                      if (table.size() != cfg.entries) throw ConfigError("table size differs from the configuration");
                      check_queries(q, cfg.entries, cfg.queries - cfg.sensitive);
                      Store& s = load_table(st, kind, table);
                      std::vector<std::uint64_t> ans(q.size(), 0);
                      run_phase_hardened(s, q, 0, ans);
                      return RoundOutput{encode_table(s.dump()), encode_words(ans)};
                    },
                    ReplyMode::Both};
      EvenRound gc;
      gc.id = "database-sensitive";
      gc.circuit = ops_circuit(cfg.entries, cfg.sensitive);
      gc.alice_bits = [](ByteView u) { return table_bits(decode_table(split_input(u).second)); };
      gc.bob_bits = [cfg](ByteView v) {
        auto q = decode_queries(split_input(v).first);
        return query_bits(pick(q, true), cfg.entries);
      };
      gc.plain = [](ByteView u, ByteView v) {
        auto q = decode_queries(split_input(v).first);
        return ops_plain(decode_table(split_input(u).second), pick(q, true));
      };
      gc.output = [](const BitVec& y, ByteView v) {
        auto [own, prev] = split_input(v);
        auto q = decode_queries(own);
        auto early = decode_words(prev);
        auto late = words_of(y);
        std::vector<std::uint64_t> ans(q.size());
        std::size_t i0 = 0, i1 = 0;
        for (std::size_t i = 0; i < q.size(); ++i) {
          auto& src = q[i].sensitive ? late : early;
          auto& at = q[i].sensitive ? i1 : i0;
          if (at >= src.size()) throw ProtocolError("fewer answers than queries");
          ans[i] = src[at++];
        }
        if (i0 != early.size() || i1 != late.size()) throw ProtocolError("more answers than queries");
        return encode_words(ans);
      };
      gc.to = Role::Bob;
      p.rounds = {std::move(load), std::move(gc)};
      p.split_a = [cfg](ByteView a, RandomSource&) {
        if (decode_table(a).size() != cfg.entries) throw ConfigError("table size differs from the configuration");
        return std::vector<Bytes>{Bytes(a.begin(), a.end()), Bytes{}};
      };
      // Sensitive queries never enter the enclave round.
      p.split_b = [cfg](ByteView b, RandomSource&) {
        auto q = decode_queries(b);
        check_queries(q, cfg.entries, cfg.queries);
        if (pick(q, true).size() != cfg.sensitive) throw ConfigError("sensitive query count differs from the configuration");
        return std::vector<Bytes>{encode_queries(copy_of(pick(q, false))), Bytes(b.begin(), b.end())};
      };
      return p;
    }
  }
  p.split_a = whole_a;
  p.split_b = whole_b;
  return p;
}

DatabaseInstance random_database_instance(const DatabaseConfig& cfg, RandomSource& rng, double set_fraction) {
  if (cfg.entries == 0 || cfg.sensitive > cfg.queries) throw ConfigError("invalid database configuration");
  DatabaseInstance inst;
  inst.db.resize(cfg.entries);
  for (auto& x : inst.db) x = rng.next_u64();
  inst.queries.resize(cfg.queries);
  const auto threshold = static_cast<std::uint64_t>(set_fraction * 1e6);
  for (auto& q : inst.queries) {
    q.kind = rng.uniform(1000000) < threshold ? QueryKind::Set : QueryKind::Select;
    q.index = rng.uniform(cfg.entries);
    q.value = q.kind == QueryKind::Set ? rng.next_u64() : 0;
  }
  // Uniform choice of which queries are sensitive (partial Fisher-Yates).
  std::vector<std::uint32_t> pos(cfg.queries);
  for (std::uint32_t i = 0; i < cfg.queries; ++i) pos[i] = i;
  for (std::uint32_t i = 0; i < cfg.sensitive; ++i) {
    auto j = i + static_cast<std::uint32_t>(rng.uniform(cfg.queries - i));
    std::swap(pos[i], pos[j]);
    inst.queries[pos[i]].sensitive = true;
  }
  return inst;
}

std::vector<DbQuery> parse_query_file(std::string_view text) {
  std::vector<DbQuery> out;
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
    auto fail = [&](const std::string& why) { return ConfigError("query file line " + std::to_string(line_no) + ": " + why); };
    auto num = [&](const std::string& s) {
      try {
        std::size_t used = 0;
        auto v = std::stoull(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return static_cast<std::uint64_t>(v);
      } catch (const std::exception&) {
        throw fail("'" + s + "' is not a number");
      }
    };
    DbQuery q;
    std::size_t need;
    if (tok[0] == "select") {
      need = 2;
    } else if (tok[0] == "set") {
      q.kind = QueryKind::Set;
      need = 3;
    } else {
      throw fail("expected select or set");
    }
    if (tok.size() < need || tok.size() > need + 1) throw fail("wrong number of fields");
    q.index = num(tok[1]);
    if (q.kind == QueryKind::Set) q.value = num(tok[2]);
    if (tok.size() == need + 1) {
      if (tok[need] != "sensitive") throw fail("unexpected '" + tok[need] + "'");
      q.sensitive = true;
    }
    out.push_back(q);
  }
  return out;
}

DatabaseSetup load_database_setup(const std::string& path) {
  auto kv = load_key_values(path);
  for (const auto& [k, v] : kv)
    if (k != "entry_count" && k != "query_count" && k != "sensitive_fraction" && k != "sensitive_count" && k != "seed" &&
        k != "query_file" && k != "set_fraction")
      throw ConfigError(path + ": unknown key '" + k + "'");
  DatabaseSetup s;
  const auto entries = static_cast<std::uint32_t>(kv_uint(kv, "entry_count", 0));
  if (entries == 0) throw ConfigError(path + ": entry_count is required");
  Drbg rng(kv_uint(kv, "seed", 1), "database-config");
  if (auto it = kv.find("query_file"); it != kv.end()) {
    auto qpath = std::filesystem::path(path).parent_path() / it->second;
    s.instance.queries = parse_query_file(read_text_file(qpath.string()));
    s.cfg.entries = entries;
    s.cfg.queries = static_cast<std::uint32_t>(s.instance.queries.size());
    for (const auto& q : s.instance.queries) s.cfg.sensitive += q.sensitive;
    if (kv.count("query_count") && kv_uint(kv, "query_count", 0) != s.cfg.queries)
      throw ConfigError(path + ": query_count disagrees with " + it->second);
    if (kv.count("sensitive_count") && kv_uint(kv, "sensitive_count", 0) != s.cfg.sensitive)
      throw ConfigError(path + ": sensitive_count disagrees with " + it->second);
    s.instance.db.resize(entries);
    for (auto& x : s.instance.db) x = rng.next_u64();
  } else {
    const auto queries = static_cast<std::uint32_t>(kv_uint(kv, "query_count", 0));
    s.cfg = database_config(entries, queries, kv_double(kv, "sensitive_fraction", 0.05));
    if (kv.count("sensitive_count")) s.cfg.sensitive = static_cast<std::uint32_t>(kv_uint(kv, "sensitive_count", 0));
    s.instance = random_database_instance(s.cfg, rng, kv_double(kv, "set_fraction", 0.2));
  }
  check_database_inputs(s.cfg, s.instance.db, s.instance.queries);
  return s;
}

std::vector<std::string> database_routing_violations(const PartitionScheme& p, const Transcript& t,
                                                     const std::vector<DbQuery>& queries) {
  auto out = channel_violations(p, t);
  std::vector<DbQuery> plain_part = copy_of(pick(queries, false));
  for (const auto& [round, m] : odd_round_plaintexts(t)) {
    auto seen = decode_queries(split_input(m).first);
    bool same = seen.size() == plain_part.size();
    for (std::size_t i = 0; same && i < seen.size(); ++i)
      same = seen[i].kind == plain_part[i].kind && seen[i].index == plain_part[i].index && seen[i].value == plain_part[i].value && !seen[i].sensitive;
    if (!same) out.push_back("round " + std::to_string(round) + ": the enclave saw queries other than the non-sensitive ones");
  }
  for (const auto* q : pick(queries, true)) {
    Writer w;
    w.u8(static_cast<std::uint8_t>(q->kind)).u8(1).u64(q->index).u64(q->value);
    for (auto& v : needle_violations(t, w.bytes())) out.push_back(v);
  }
  return out;
}

}  // namespace hsfe
