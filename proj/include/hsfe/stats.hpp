#pragma once

#include <cstddef>
#include <vector>

namespace hsfe {

struct Summary {
  std::size_t n = 0;
  double mean = 0;
  double stddev = 0;
  double ci95 = 0;  // half-width of the Student-t 95% interval on the mean
  double lo() const { return mean - ci95; }
  double hi() const { return mean + ci95; }
};

Summary summarize(const std::vector<double>& xs);

// Chi-squared test of homogeneity for two count vectors over the same bins.
// Bins empty in both vectors are dropped. Returns the p-value.
double chi2_homogeneity_p(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b);

}  // namespace hsfe
