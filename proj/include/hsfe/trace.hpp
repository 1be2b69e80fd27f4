#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hsfe {

enum class AccessOp : std::uint8_t { Read, Write };

struct Access {
  std::uint64_t step;
  std::uint64_t slot;
  AccessOp op;
};

// Append-only log of memory touches, one step per logical operation.
class TraceRecorder {
 public:
  void begin_step() { ++step_; }
  void record(std::uint64_t slot, AccessOp op) { log_.push_back({step_, slot, op}); }
  const std::vector<Access>& accesses() const { return log_; }
  std::uint64_t steps() const { return step_; }
  void clear() {
    log_.clear();
    step_ = 0;
  }

  // CSV with header "step,slot,op"; steps are numbered from 0.
  std::string to_csv() const;
  // Number of recorded touches per step.
  std::vector<std::size_t> per_step_counts() const;
  // Touch counts of slots below `limit`, grouped into `bins` equal ranges.
  std::vector<std::size_t> histogram(std::uint64_t limit, std::size_t bins) const;

 private:
  std::uint64_t step_ = 0;
  std::vector<Access> log_;
};

}  // namespace hsfe
