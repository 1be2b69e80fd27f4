#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <regex>

#include "hsfe/errors.hpp"
#include "hsfe/oram.hpp"
#include "hsfe/stats.hpp"

using namespace hsfe;

namespace {

void exercise(Store& s, std::size_t ops, std::uint64_t seed, bool check_each = false) {
  std::mt19937_64 gen(seed);
  std::map<std::uint64_t, std::uint64_t> ref;
  for (std::size_t i = 0; i < ops; ++i) {
    std::uint64_t k = gen() % s.size();
    if (gen() & 1) {
      std::uint64_t v = gen();
      s.put(k, v);
      ref[k] = v;
    } else {
      ASSERT_EQ(s.get(k), ref.count(k) ? ref[k] : 0) << "op " << i;
    }
    if (check_each)
      if (auto* f = dynamic_cast<OramForest*>(&s)) ASSERT_EQ(f->check_invariants(), "") << "op " << i;
  }
}

std::vector<std::uint64_t> sequential(std::size_t q, std::size_t n) {
  std::vector<std::uint64_t> s(q);
  for (std::size_t i = 0; i < q; ++i) s[i] = i % n;
  return s;
}

TraceRecorder trace_of(StoreKind kind, std::size_t n, const std::vector<std::uint64_t>& keys, std::uint64_t seed) {
  auto s = make_store(kind, n, Drbg(seed, "store"));
  TraceRecorder t;
  s->set_trace(&t);
  for (auto k : keys) s->get(k);
  return t;
}

}  // namespace

TEST(Oram, MatchesMapAcrossSizes) {
  for (std::size_t n : {1u, 2u, 3u, 17u, 100u}) {
    OramForest f(n, Drbg(n, "forest"));
    EXPECT_EQ(f.check_invariants(), "");
    exercise(f, 300, n, true);
    EXPECT_EQ(f.overflow_count(), 0u);
  }
}

TEST(Oram, LongRunKeepsInvariantsAndDepth) {
  OramForest f(500, Drbg(9, "forest"));
  exercise(f, 2000, 9);
  EXPECT_EQ(f.check_invariants(), "");
  EXPECT_EQ(f.overflow_count(), 0u);
  EXPECT_LE(f.max_depth_seen(), f.params().height);
  EXPECT_EQ(f.tree_size(0) + f.tree_size(1), 500u);
}

TEST(Oram, OtherStoresMatchMap) {
  LinearStore l(50);
  exercise(l, 400, 1);
  UnblindedStore u(50);
  exercise(u, 400, 2);
  EXPECT_THROW(l.get(50), ConfigError);
  EXPECT_THROW(u.put(99, 1), ConfigError);
  EXPECT_THROW(OramForest(0, Drbg(1)), ConfigError);
}

TEST(Oram, ConstantTouchesPerOperation) {
  const std::size_t n = 200;
  OramForest probe(n, Drbg(1));
  const auto& p = probe.params();
  const std::size_t expected = 2 * (p.dummies + 1) * p.height + p.pool;
  std::vector<std::uint64_t> repeated(60, 7);
  for (const auto& keys : {sequential(60, n), repeated}) {
    auto t = trace_of(StoreKind::Tree, n, keys, 4);
    for (auto c : t.per_step_counts()) EXPECT_EQ(c, expected);
  }
}

TEST(Oram, SlotHistogramIndependentOfSchedule) {
  const std::size_t n = 500, q = 100;
  auto cmp = compare_schedules(n, sequential(q, n), std::vector<std::uint64_t>(q, 42), 60, 8, 11);
  EXPECT_EQ(cmp.counts_a, cmp.counts_b);
  EXPECT_EQ(cmp.counts_a.size(), q);
  EXPECT_GT(cmp.p_value, 0.01);
}

// The sampled test must not reject two runs of one schedule either, and must
// reject a store whose trace follows the keys.
TEST(Oram, ScheduleTestIsCalibrated) {
  std::vector<std::uint64_t> low(100), high(100);
  for (std::size_t i = 0; i < 100; ++i) low[i] = i % 50, high[i] = 450 + i % 50;
  auto same = compare_schedules(500, low, low, 60, 8, 3);
  EXPECT_GT(same.p_value, 0.01);
  auto a = trace_of(StoreKind::Unblinded, 500, low, 1), b = trace_of(StoreKind::Unblinded, 500, high, 1);
  EXPECT_LT(chi2_homogeneity_p(a.histogram(500, 8), b.histogram(500, 8)), 1e-6);
}

TEST(Oram, UnblindedTraceIsTheKeySequence) {
  auto t = trace_of(StoreKind::Unblinded, 50, sequential(50, 50), 1);
  ASSERT_EQ(t.accesses().size(), 50u);
  for (std::size_t i = 0; i < 50; ++i) EXPECT_EQ(t.accesses()[i].slot, i);
}

TEST(Oram, LinearTouchesEverySlot) {
  auto t = trace_of(StoreKind::Linear, 30, {3, 3, 9}, 1);
  for (auto c : t.per_step_counts()) EXPECT_EQ(c, 30u);
}

TEST(Oram, StoreNames) {
  for (auto k : {StoreKind::Tree, StoreKind::Linear, StoreKind::Unblinded}) EXPECT_EQ(parse_store_kind(store_kind_name(k)), k);
  EXPECT_THROW(parse_store_kind("btree"), ConfigError);
}

// Regions marked hardened may not branch on data. Lines that branch on a
// public value carry a "public:" comment.
TEST(Oram, HardenedRegionsHaveNoDataBranches) {
  const std::regex forbidden(R"((\bif\s*\()|(\bwhile\s*\()|(\bswitch\s*\()|(\?)|(&&)|(\|\|))");
  std::size_t regions = 0;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(std::filesystem::path(HSFE_SOURCE_DIR) / "src")) {
    if (entry.path().extension() != ".cpp") continue;
    std::ifstream in(entry.path());
    std::string line;
    bool inside = false;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.find("// hardened:begin") != std::string::npos) {
        EXPECT_FALSE(inside) << entry.path() << ":" << lineno << " nested region";
        inside = true;
        ++regions;
        continue;
      }
      if (line.find("// hardened:end") != std::string::npos) {
        inside = false;
        continue;
      }
      if (!inside || line.find("// public:") != std::string::npos) continue;
      std::string code = line.substr(0, line.find("//"));
      EXPECT_FALSE(std::regex_search(code, forbidden)) << entry.path() << ":" << lineno << ": " << line;
    }
    EXPECT_FALSE(inside) << entry.path() << " unterminated region";
  }
  EXPECT_GE(regions, 3u);
}

TEST(Oram, DumpReturnsLogicalContents) {
  for (auto kind : {StoreKind::Tree, StoreKind::Linear, StoreKind::Unblinded}) {
    auto s = make_store(kind, 40, Drbg(5));
    std::vector<std::uint64_t> ref(40, 0);
    std::mt19937_64 gen(5);
    for (int i = 0; i < 100; ++i) {
      auto k = gen() % 40, v = gen();
      s->put(k, v);
      ref[k] = v;
    }
    EXPECT_EQ(s->dump(), ref) << store_kind_name(kind);
  }
}
