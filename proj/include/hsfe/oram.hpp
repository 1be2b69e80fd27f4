#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "hsfe/random.hpp"
#include "hsfe/trace.hpp"

namespace hsfe {

enum class StoreKind { Tree, Linear, Unblinded };
StoreKind parse_store_kind(std::string_view s);
std::string_view store_kind_name(StoreKind k);

// Array of n 64-bit words, keys 0..n-1, every entry starting at 0.
class Store {
 public:
  virtual ~Store() = default;
  virtual std::uint64_t get(std::uint64_t key) = 0;
  virtual void put(std::uint64_t key, std::uint64_t value) = 0;
  virtual std::size_t size() const = 0;
  virtual std::size_t memory_bytes() const = 0;
  // Every value in key order, through a scan whose access pattern does not
  // depend on the contents. Not traced.
  virtual std::vector<std::uint64_t> dump() const = 0;
  void set_trace(TraceRecorder* t) { trace_ = t; }

 protected:
  void check_key(std::uint64_t key) const;
  TraceRecorder* trace_ = nullptr;
};

// Direct indexing; the access trace is the key sequence itself.
class UnblindedStore final : public Store {
 public:
  explicit UnblindedStore(std::size_t n) : v_(n, 0) {}
  std::uint64_t get(std::uint64_t key) override;
  void put(std::uint64_t key, std::uint64_t value) override;
  std::size_t size() const override { return v_.size(); }
  std::size_t memory_bytes() const override { return v_.size() * 8; }
  std::vector<std::uint64_t> dump() const override { return v_; }

 private:
  std::vector<std::uint64_t> v_;
};

// Branch-free full scan: every operation reads and rewrites every slot.
class LinearStore final : public Store {
 public:
  explicit LinearStore(std::size_t n) : v_(n, 0) {}
  std::uint64_t get(std::uint64_t key) override;
  void put(std::uint64_t key, std::uint64_t value) override;
  std::size_t size() const override { return v_.size(); }
  std::size_t memory_bytes() const override { return v_.size() * 8; }
  std::vector<std::uint64_t> dump() const override { return v_; }

 private:
  std::uint64_t access(std::uint64_t key, std::uint64_t is_put, std::uint64_t value);
  std::vector<std::uint64_t> v_;
};

struct OramParams {
  std::size_t n = 0;
  std::size_t dummies = 0;   // dummy descents per tree per operation
  std::size_t height = 0;    // reads per descent
  std::size_t pool = 0;      // pool entries per operation
  std::size_t capacity = 0;  // physical slots
};

// Depth budget used when the caller does not pick one.
OramParams default_oram_params(std::size_t n);

// Two binary search trees over the keys. Each operation descends both trees
// for the real key and for `dummies` random keys, always exactly `height`
// reads per descent, removes every touched node into a fixed-size pool, mixes
// the pool with a compare-exchange network, re-attaches the nodes (each one
// may hop to the other tree), and writes the pool to freshly drawn slots.
class OramForest final : public Store {
 public:
  OramForest(std::size_t n, Drbg rng);
  OramForest(const OramParams& params, Drbg rng);
  ~OramForest() override;

  std::uint64_t get(std::uint64_t key) override;
  void put(std::uint64_t key, std::uint64_t value) override;
  std::size_t size() const override { return params_.n; }
  std::size_t memory_bytes() const override;
  std::vector<std::uint64_t> dump() const override;

  const OramParams& params() const { return params_; }
  // Descents that ran past `height` (they complete, the trace grows).
  std::size_t overflow_count() const { return overflows_; }
  std::size_t max_depth_seen() const { return max_depth_; }
  std::size_t tree_size(int t) const;
  std::size_t tree_height(int t) const;
  // Disjoint trees, union equal to all keys, BST order, size fields exact,
  // one live node per slot. Returns an empty string when all hold.
  std::string check_invariants() const;

 private:
  struct Node {
    std::uint64_t key, value;
    std::uint32_t left, right, lsize, rsize;
  };
  struct PoolEntry;
  std::uint64_t access(std::uint64_t key, std::uint64_t is_put, std::uint64_t value);
  void descend(int tree, std::uint64_t key, std::vector<std::uint32_t>& visited);
  void rebuild(std::vector<PoolEntry>& pool);
  std::uint32_t build_balanced(std::vector<std::uint64_t>& keys, std::size_t lo, std::size_t hi, std::vector<std::uint32_t>& slots);
  std::uint32_t take_free_slot();

  OramParams params_;
  Drbg rng_;
  std::vector<Node> mem_;
  std::vector<std::uint8_t> live_;
  std::vector<std::uint32_t> free_;
  std::uint32_t root_[2];
  std::size_t overflows_ = 0, max_depth_ = 0;
};

std::unique_ptr<Store> make_store(StoreKind kind, std::size_t n, Drbg rng);

}  // namespace hsfe

namespace hsfe {

// Trace comparison of two query schedules on fresh tree stores. Touches inside
// one run are strongly correlated (every descent starts at the root, freed
// slots are reused), so a histogram of one run's touches is overdispersed and
// a chi-squared test on it rejects even two seeds of the same schedule. Each
// of `runs` independent stores per schedule therefore contributes one touch:
// a uniformly chosen touch of a uniformly chosen query.
struct ScheduleComparison {
  std::vector<std::size_t> counts_a, counts_b;  // per-query touch counts of one full run each
  std::vector<std::size_t> hist_a, hist_b;      // sampled slot histograms
  double p_value = 0;
};
ScheduleComparison compare_schedules(std::size_t n, const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b,
                                     std::size_t runs, std::size_t bins, std::uint64_t seed);

}  // namespace hsfe
