#include "hsfe/stats.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <numeric>

#include "hsfe/errors.hpp"

namespace hsfe {

Summary summarize(const std::vector<double>& xs) {
  Summary s;
  s.n = xs.size();
  if (xs.empty()) return s;
  s.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / double(xs.size());
  if (xs.size() < 2) return s;
  double ss = 0;
  for (double x : xs) ss += (x - s.mean) * (x - s.mean);
  s.stddev = std::sqrt(ss / double(xs.size() - 1));
  boost::math::students_t t(double(xs.size() - 1));
  s.ci95 = boost::math::quantile(boost::math::complement(t, 0.025)) * s.stddev / std::sqrt(double(xs.size()));
  return s;
}

double chi2_homogeneity_p(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  if (a.size() != b.size()) throw Error("chi-squared: bin counts differ");
  double ta = 0, tb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) ta += double(a[i]), tb += double(b[i]);
  if (ta == 0 || tb == 0) throw Error("chi-squared: empty sample");
  double stat = 0;
  std::size_t bins = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double col = double(a[i] + b[i]);
    if (col == 0) continue;
    ++bins;
    double ea = col * ta / (ta + tb), eb = col * tb / (ta + tb);
    stat += (double(a[i]) - ea) * (double(a[i]) - ea) / ea + (double(b[i]) - eb) * (double(b[i]) - eb) / eb;
  }
  if (bins < 2) return 1.0;
  boost::math::chi_squared dist(double(bins - 1));
  return boost::math::cdf(boost::math::complement(dist, stat));
}

}  // namespace hsfe
