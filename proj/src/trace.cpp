#include "hsfe/trace.hpp"

#include <sstream>

namespace hsfe {

std::string TraceRecorder::to_csv() const {
  std::ostringstream os;
  os << "step,slot,op\n";
  for (const auto& a : log_) os << (a.step - 1) << ',' << a.slot << ',' << (a.op == AccessOp::Read ? "read" : "write") << '\n';
  return os.str();
}

std::vector<std::size_t> TraceRecorder::per_step_counts() const {
  std::vector<std::size_t> counts(step_, 0);
  for (const auto& a : log_)
    if (a.step >= 1) ++counts[a.step - 1];
  return counts;
}

std::vector<std::size_t> TraceRecorder::histogram(std::uint64_t limit, std::size_t bins) const {
  std::vector<std::size_t> h(bins, 0);
  for (const auto& a : log_)
    if (a.slot < limit) ++h[a.slot * bins / limit];
  return h;
}

}  // namespace hsfe
