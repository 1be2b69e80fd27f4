#include "hsfe/oram.hpp"

#include <algorithm>
#include <functional>
#include <unordered_set>

#include "hsfe/branchfree.hpp"
#include "hsfe/errors.hpp"

namespace hsfe {

namespace {
constexpr std::uint32_t kNil = 0xffffffffu;

std::size_t ceil_log2(std::size_t n) {
  std::size_t b = 0;
  while ((std::size_t(1) << b) < n) ++b;
  return b;
}
}  // namespace

StoreKind parse_store_kind(std::string_view s) {
  if (s == "tree") return StoreKind::Tree;
  if (s == "linear") return StoreKind::Linear;
  if (s == "unblinded") return StoreKind::Unblinded;
  throw ConfigError("unknown store '" + std::string(s) + "' (tree, linear, unblinded)");
}

std::string_view store_kind_name(StoreKind k) {
  switch (k) {
    case StoreKind::Tree: return "tree";
    case StoreKind::Linear: return "linear";
    case StoreKind::Unblinded: return "unblinded";
  }
  return "?";
}

void Store::check_key(std::uint64_t key) const {
  if (key >= size()) throw ConfigError("key " + std::to_string(key) + " out of range for a store of " + std::to_string(size()));
}

std::uint64_t UnblindedStore::get(std::uint64_t key) {
  check_key(key);
  if (trace_) {
    trace_->begin_step();
    trace_->record(key, AccessOp::Read);
  }
  return v_[key];
}

void UnblindedStore::put(std::uint64_t key, std::uint64_t value) {
  check_key(key);
  if (trace_) {
    trace_->begin_step();
    trace_->record(key, AccessOp::Write);
  }
  v_[key] = value;
}

std::uint64_t LinearStore::access(std::uint64_t key, std::uint64_t is_put, std::uint64_t value) {
  check_key(key);
  if (trace_) trace_->begin_step();
  std::uint64_t out = 0;
  // hardened:begin linear-scan
  for (std::size_t i = 0; i < v_.size(); ++i) {
    std::uint64_t hit = bf_eq(i, key);
    std::uint64_t cur = v_[i];
    out |= cur & make_mask(hit);
    v_[i] = bf_select(hit & is_put, value, cur);
  }
  // hardened:end
  if (trace_)
    for (std::size_t i = 0; i < v_.size(); ++i) trace_->record(i, AccessOp::Write);
  return out;
}

std::uint64_t LinearStore::get(std::uint64_t key) { return access(key, 0, 0); }
void LinearStore::put(std::uint64_t key, std::uint64_t value) { access(key, 1, value); }

OramParams default_oram_params(std::size_t n) {
  OramParams p;
  p.n = n;
  const std::size_t lg = ceil_log2(std::max<std::size_t>(n, 2));
  p.dummies = lg;
  // Simulated over 8000 operations at n = 500 and 1000 the tallest tree
  // reached log2(n) + 6; two more levels keep overflows out of practice.
  p.height = lg + 8;
  p.pool = 2 * (p.dummies + 1) * p.height;
  p.capacity = n + p.pool;
  return p;
}

struct OramForest::PoolEntry {
  Node node;
  std::uint64_t real;
  std::uint32_t tree;
  std::uint32_t old_slot;
  std::uint32_t new_slot;
};

OramForest::OramForest(std::size_t n, Drbg rng) : OramForest(default_oram_params(n), std::move(rng)) {}

OramForest::OramForest(const OramParams& params, Drbg rng) : params_(params), rng_(std::move(rng)) {
  if (params_.n == 0) throw ConfigError("store needs at least one entry");
  if (params_.n >= kNil / 2) throw ConfigError("store too large");
  if (params_.height == 0 || params_.capacity < params_.n + params_.pool) throw ConfigError("inconsistent store parameters");
  mem_.assign(params_.capacity, Node{0, 0, kNil, kNil, 0, 0});
  live_.assign(params_.capacity, 0);
  // Random placement of nodes in memory.
  std::vector<std::uint32_t> perm(params_.capacity);
  for (std::uint32_t i = 0; i < perm.size(); ++i) perm[i] = i;
  for (std::size_t i = perm.size(); i > 1; --i) std::swap(perm[i - 1], perm[rng_.uniform(i)]);
  std::vector<std::uint32_t> slots(perm.begin(), perm.begin() + params_.n);
  free_.assign(perm.begin() + params_.n, perm.end());

  std::vector<std::uint64_t> keys[2];
  for (std::uint64_t k = 0; k < params_.n; ++k) keys[rng_.next_bit()].push_back(k);
  std::size_t used = 0;
  for (int t = 0; t < 2; ++t) {
    std::vector<std::uint32_t> mine(slots.begin() + used, slots.begin() + used + keys[t].size());
    used += keys[t].size();
    root_[t] = build_balanced(keys[t], 0, keys[t].size(), mine);
  }
}

OramForest::~OramForest() = default;

std::uint32_t OramForest::build_balanced(std::vector<std::uint64_t>& keys, std::size_t lo, std::size_t hi,
                                         std::vector<std::uint32_t>& slots) {
  if (lo >= hi) return kNil;
  std::size_t mid = lo + (hi - lo) / 2;
  std::uint32_t s = slots[mid];
  Node& nd = mem_[s];
  nd.key = keys[mid];
  nd.value = 0;
  std::uint32_t l = build_balanced(keys, lo, mid, slots);
  std::uint32_t r = build_balanced(keys, mid + 1, hi, slots);
  mem_[s].left = l;
  mem_[s].right = r;
  mem_[s].lsize = static_cast<std::uint32_t>(mid - lo);
  mem_[s].rsize = static_cast<std::uint32_t>(hi - mid - 1);
  live_[s] = 1;
  return s;
}

std::size_t OramForest::memory_bytes() const {
  return mem_.size() * sizeof(Node) + live_.size() + free_.capacity() * sizeof(std::uint32_t) + params_.pool * sizeof(PoolEntry);
}

void OramForest::descend(int tree, std::uint64_t key, std::vector<std::uint32_t>& visited) {
  std::uint64_t cur = root_[tree];
  const std::uint64_t cap = params_.capacity;
  std::size_t depth = 0;
  // hardened:begin descent
  for (std::size_t s = 0; s < params_.height; ++s) {
    std::uint64_t pad = rng_.uniform(cap);
    std::uint64_t real = bf_eq(cur, kNil) ^ 1;
    std::uint64_t slot = bf_select(real, cur, pad);
    if (trace_) trace_->record(slot, AccessOp::Read);  // public: tracing switch
    const Node& nd = mem_[slot];
    visited.push_back(static_cast<std::uint32_t>(bf_select(real, slot, kNil)));
    std::uint64_t next = bf_select(bf_lt(key, nd.key), nd.left, nd.right);
    cur = bf_select(real, next, kNil);
    depth += real;
  }
  // hardened:end
  // public: a descent longer than the budget finishes for correctness; the
  // overflow is counted because it changes the trace shape.
  if (cur != kNil) ++overflows_;
  while (cur != kNil) {
    if (trace_) trace_->record(cur, AccessOp::Read);
    visited.push_back(static_cast<std::uint32_t>(cur));
    const Node& nd = mem_[cur];
    cur = key < nd.key ? nd.left : nd.right;
    ++depth;
  }
  max_depth_ = std::max(max_depth_, depth);
}

std::uint32_t OramForest::take_free_slot() {
  std::size_t i = rng_.uniform(free_.size());
  std::uint32_t s = free_[i];
  free_[i] = free_.back();
  free_.pop_back();
  return s;
}

std::uint64_t OramForest::access(std::uint64_t key, std::uint64_t is_put, std::uint64_t value) {
  check_key(key);
  if (trace_) trace_->begin_step();
  std::vector<std::uint32_t> visited[2];
  for (int t = 0; t < 2; ++t) {
    visited[t].reserve((params_.dummies + 1) * params_.height);
    descend(t, key, visited[t]);
    for (std::size_t d = 0; d < params_.dummies; ++d) descend(t, rng_.uniform(params_.n), visited[t]);
  }

  std::vector<PoolEntry> pool;
  pool.reserve(params_.pool);
  for (int t = 0; t < 2; ++t) {
    auto& v = visited[t];
    v.erase(std::remove(v.begin(), v.end(), kNil), v.end());
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    for (auto s : v) pool.push_back(PoolEntry{mem_[s], 1, static_cast<std::uint32_t>(t), s, kNil});
  }
  while (pool.size() < params_.pool) pool.push_back(PoolEntry{Node{0, 0, kNil, kNil, 0, 0}, 0, 0, kNil, kNil});

  std::uint64_t out = 0;
  // hardened:begin pool-access
  for (auto& e : pool) {
    std::uint64_t hit = bf_eq(e.node.key, key) & e.real;
    out |= e.node.value & make_mask(hit);
    e.node.value = bf_select(hit & is_put, value, e.node.value);
  }
  // Fisher-Yates driven mix: position i trades places with a random j < i
  // through a full compare-exchange sweep, so the sweep never depends on j.
  for (std::size_t i = pool.size(); i-- > 1;) {
    std::uint64_t j = rng_.uniform(i + 1);
    PoolEntry& a = pool[i];
    for (std::size_t k = 0; k <= i; ++k) {
      std::uint64_t t = bf_eq(k, j);
      PoolEntry& b = pool[k];
      bf_cswap(t, a.node.key, b.node.key);
      bf_cswap(t, a.node.value, b.node.value);
      std::uint64_t al = a.node.left, bl = b.node.left, ar = a.node.right, br = b.node.right;
      std::uint64_t als = a.node.lsize, bls = b.node.lsize, ars = a.node.rsize, brs = b.node.rsize;
      std::uint64_t at = a.tree, bt = b.tree, ao = a.old_slot, bo = b.old_slot;
      bf_cswap(t, al, bl);
      bf_cswap(t, ar, br);
      bf_cswap(t, als, bls);
      bf_cswap(t, ars, brs);
      bf_cswap(t, at, bt);
      bf_cswap(t, ao, bo);
      bf_cswap(t, a.real, b.real);
      a.node.left = static_cast<std::uint32_t>(al), b.node.left = static_cast<std::uint32_t>(bl);
      a.node.right = static_cast<std::uint32_t>(ar), b.node.right = static_cast<std::uint32_t>(br);
      a.node.lsize = static_cast<std::uint32_t>(als), b.node.lsize = static_cast<std::uint32_t>(bls);
      a.node.rsize = static_cast<std::uint32_t>(ars), b.node.rsize = static_cast<std::uint32_t>(brs);
      a.tree = static_cast<std::uint32_t>(at), b.tree = static_cast<std::uint32_t>(bt);
      a.old_slot = static_cast<std::uint32_t>(ao), b.old_slot = static_cast<std::uint32_t>(bo);
    }
  }
  // hardened:end
  rebuild(pool);
  return out;
}

std::uint64_t OramForest::get(std::uint64_t key) { return access(key, 0, 0); }
void OramForest::put(std::uint64_t key, std::uint64_t value) { access(key, 1, value); }

void OramForest::rebuild(std::vector<PoolEntry>& pool) {
  // Item of a tree's in-order sequence: a pool node or an untouched subtree.
  struct Item {
    std::uint64_t pos;  // 2*key for nodes, 2*key -/+ 1 for subtrees hanging left/right of key
    bool pivot;
    std::uint32_t ref;  // pool index or subtree root slot
    std::uint32_t weight;
  };
  std::vector<Item> seq[2];
  std::unordered_set<std::uint32_t> top;
  for (const auto& e : pool)
    if (e.real) top.insert(e.old_slot);
  for (std::uint32_t i = 0; i < pool.size(); ++i) {
    const auto& e = pool[i];
    if (!e.real) continue;
    auto& s = seq[e.tree];
    s.push_back({2 * e.node.key, true, i, 1});
    if (e.node.left != kNil && !top.count(e.node.left)) s.push_back({2 * e.node.key - 1, false, e.node.left, e.node.lsize});
    if (e.node.right != kNil && !top.count(e.node.right)) s.push_back({2 * e.node.key + 1, false, e.node.right, e.node.rsize});
  }
  for (auto& s : seq) std::sort(s.begin(), s.end(), [](const Item& a, const Item& b) { return a.pos < b.pos; });

  // A node may leave its tree unless it is the chosen anchor separating two
  // untouched subtrees, and it may only land where the other tree has no
  // untouched subtree covering its key.
  std::vector<std::uint8_t> stays(pool.size(), 1);
  for (int t = 0; t < 2; ++t) {
    const auto& s = seq[t];
    std::vector<std::uint8_t> anchor(s.size(), 0);
    std::size_t i = 0;
    while (i < s.size() && s[i].pivot) ++i;
    while (i < s.size()) {
      std::size_t j = i + 1;
      while (j < s.size() && s[j].pivot) ++j;
      if (j < s.size() && j > i + 1) anchor[i + 1 + rng_.uniform(j - i - 1)] = 1;
      i = j;
    }
    const auto& other = seq[1 - t];
    for (std::size_t x = 0; x < s.size(); ++x) {
      if (!s[x].pivot) continue;
      bool coin = rng_.next_bit();
      if (anchor[x] || !coin) continue;
      auto it = std::lower_bound(other.begin(), other.end(), s[x].pos, [](const Item& a, std::uint64_t p) { return a.pos < p; });
      bool blocked = (it != other.end() && !it->pivot) || (it != other.begin() && !std::prev(it)->pivot);
      if (!blocked) stays[s[x].ref] = 0;
    }
  }

  std::vector<Item> next[2];
  for (int t = 0; t < 2; ++t)
    for (const auto& it : seq[t]) {
      if (!it.pivot) {
        next[t].push_back(it);
      } else {
        int dest = stays[it.ref] ? t : 1 - t;
        pool[it.ref].tree = static_cast<std::uint32_t>(dest);
        next[dest].push_back(it);
      }
    }
  for (auto& s : next) std::sort(s.begin(), s.end(), [](const Item& a, const Item& b) { return a.pos < b.pos; });

  // Fresh slots for the whole pool, dummies included, in pool order.
  for (const auto& e : pool)
    if (e.real) {
      live_[e.old_slot] = 0;
      free_.push_back(e.old_slot);
    }
  for (auto& e : pool) e.new_slot = take_free_slot();

  for (int t = 0; t < 2; ++t) {
    auto& s = next[t];
    std::vector<std::uint64_t> prefix(s.size() + 1, 0);
    for (std::size_t i = 0; i < s.size(); ++i) prefix[i + 1] = prefix[i] + s[i].weight;
    std::function<std::uint32_t(std::size_t, std::size_t)> build = [&](std::size_t lo, std::size_t hi) -> std::uint32_t {
      if (lo >= hi) return kNil;
      if (hi - lo == 1 && !s[lo].pivot) return s[lo].ref;
      // Pivot closest to the weighted middle.
      std::size_t best = hi;
      std::uint64_t best_gap = ~std::uint64_t(0);
      for (std::size_t m = lo; m < hi; ++m) {
        if (!s[m].pivot) continue;
        std::uint64_t left = prefix[m] - prefix[lo], right = prefix[hi] - prefix[m + 1];
        std::uint64_t gap = left > right ? left - right : right - left;
        if (gap < best_gap) best_gap = gap, best = m;
      }
      if (best == hi) throw Error("store rebuild found adjacent subtrees");
      PoolEntry& e = pool[s[best].ref];
      e.node.left = build(lo, best);
      e.node.right = build(best + 1, hi);
      e.node.lsize = static_cast<std::uint32_t>(prefix[best] - prefix[lo]);
      e.node.rsize = static_cast<std::uint32_t>(prefix[hi] - prefix[best + 1]);
      return e.new_slot;
    };
    root_[t] = build(0, s.size());
  }

  for (const auto& e : pool) {
    if (trace_) trace_->record(e.new_slot, AccessOp::Write);
    mem_[e.new_slot] = e.real ? e.node : Node{0, 0, kNil, kNil, 0, 0};
    live_[e.new_slot] = static_cast<std::uint8_t>(e.real);
  }
  for (const auto& e : pool)
    if (!e.real) free_.push_back(e.new_slot);
}

std::vector<std::uint64_t> OramForest::dump() const {
  std::vector<std::uint64_t> out(params_.n, 0);
  // hardened:begin dump
  for (std::size_t s = 0; s < mem_.size(); ++s) {
    const Node& nd = mem_[s];
    std::uint64_t live = live_[s];
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = bf_select(live & bf_eq(nd.key, k), nd.value, out[k]);
  }
  // hardened:end
  return out;
}

std::size_t OramForest::tree_size(int t) const {
  std::size_t n = 0;
  std::vector<std::uint32_t> stack;
  if (root_[t] != kNil) stack.push_back(root_[t]);
  while (!stack.empty()) {
    auto s = stack.back();
    stack.pop_back();
    ++n;
    if (mem_[s].left != kNil) stack.push_back(mem_[s].left);
    if (mem_[s].right != kNil) stack.push_back(mem_[s].right);
  }
  return n;
}

std::size_t OramForest::tree_height(int t) const {
  std::size_t h = 0;
  std::vector<std::pair<std::uint32_t, std::size_t>> stack;
  if (root_[t] != kNil) stack.push_back({root_[t], 1});
  while (!stack.empty()) {
    auto [s, d] = stack.back();
    stack.pop_back();
    h = std::max(h, d);
    if (mem_[s].left != kNil) stack.push_back({mem_[s].left, d + 1});
    if (mem_[s].right != kNil) stack.push_back({mem_[s].right, d + 1});
  }
  return h;
}

std::string OramForest::check_invariants() const {
  std::vector<std::uint8_t> seen_key(params_.n, 0), seen_slot(params_.capacity, 0);
  for (int t = 0; t < 2; ++t) {
    // (slot, lower bound, upper bound) with bounds exclusive
    struct Frame {
      std::uint32_t slot;
      std::int64_t lo, hi;
    };
    std::vector<Frame> stack;
    if (root_[t] != kNil) stack.push_back({root_[t], -1, static_cast<std::int64_t>(params_.n)});
    std::function<std::size_t(std::uint32_t)> count = [&](std::uint32_t s) -> std::size_t {
      return s == kNil ? 0 : 1 + count(mem_[s].left) + count(mem_[s].right);
    };
    while (!stack.empty()) {
      auto f = stack.back();
      stack.pop_back();
      if (f.slot >= params_.capacity) return "pointer beyond capacity";
      if (seen_slot[f.slot]) return "slot reachable twice";
      seen_slot[f.slot] = 1;
      if (!live_[f.slot]) return "reachable slot marked free";
      const Node& nd = mem_[f.slot];
      if (nd.key >= params_.n) return "key out of range";
      if (std::int64_t(nd.key) <= f.lo || std::int64_t(nd.key) >= f.hi) return "search order violated";
      if (seen_key[nd.key]) return "key present twice";
      seen_key[nd.key] = 1;
      if (nd.lsize != count(nd.left) || nd.rsize != count(nd.right)) return "size field wrong";
      if (nd.left != kNil) stack.push_back({nd.left, f.lo, std::int64_t(nd.key)});
      if (nd.right != kNil) stack.push_back({nd.right, std::int64_t(nd.key), f.hi});
    }
  }
  for (std::size_t k = 0; k < params_.n; ++k)
    if (!seen_key[k]) return "key " + std::to_string(k) + " missing";
  std::size_t live = 0;
  for (auto l : live_) live += l;
  if (live != params_.n) return "live slot count differs from n";
  if (free_.size() + params_.n != params_.capacity) return "free list size wrong";
  return "";
}

std::unique_ptr<Store> make_store(StoreKind kind, std::size_t n, Drbg rng) {
  switch (kind) {
    case StoreKind::Tree: return std::make_unique<OramForest>(n, std::move(rng));
    case StoreKind::Linear: return std::make_unique<LinearStore>(n);
    case StoreKind::Unblinded: return std::make_unique<UnblindedStore>(n);
  }
  throw ConfigError("unknown store kind");
}

}  // namespace hsfe
