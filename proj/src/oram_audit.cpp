#include "hsfe/errors.hpp"
#include "hsfe/oram.hpp"
#include "hsfe/stats.hpp"

namespace hsfe {

ScheduleComparison compare_schedules(std::size_t n, const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b,
                                     std::size_t runs, std::size_t bins, std::uint64_t seed) {
  if (a.empty() || b.empty() || runs == 0 || bins < 2) throw ConfigError("schedule comparison needs queries, runs and two bins");
  const std::size_t cap = default_oram_params(n).capacity;
  Drbg master(seed, "schedule-compare");
  ScheduleComparison out;
  auto full_run = [&](const std::vector<std::uint64_t>& keys, std::string_view label) {
    OramForest s(n, master.fork(label));
    TraceRecorder t;
    s.set_trace(&t);
    for (auto k : keys) s.get(k);
    return t.per_step_counts();
  };
  out.counts_a = full_run(a, "full-a");
  out.counts_b = full_run(b, "full-b");

  auto sample = [&](const std::vector<std::uint64_t>& keys, std::string_view label) {
    std::vector<std::size_t> hist(bins, 0);
    Drbg pick = master.fork(std::string(label) + "-pick");
    for (std::size_t r = 0; r < runs; ++r) {
      OramForest s(n, master.fork(std::string(label) + "-" + std::to_string(r)));
      std::size_t upto = pick.uniform(keys.size());
      for (std::size_t i = 0; i < upto; ++i) s.get(keys[i]);
      TraceRecorder t;
      s.set_trace(&t);
      s.get(keys[upto]);
      const auto& acc = t.accesses();
      std::uint64_t slot = acc[pick.uniform(acc.size())].slot;
      ++hist[slot * bins / cap];
    }
    return hist;
  };
  out.hist_a = sample(a, "a");
  out.hist_b = sample(b, "b");
  out.p_value = chi2_homogeneity_p(out.hist_a, out.hist_b);
  return out;
}

}  // namespace hsfe
