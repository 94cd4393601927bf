#include <boost/math/distributions/students_t.hpp>
#include <cmath>

#include "crew/disruption.hpp"

namespace crew {
namespace {

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / v.size();
}

double sample_variance(const std::vector<double>& v, double mean) {
  double s = 0.0;
  for (double x : v) s += (x - mean) * (x - mean);
  return s / (v.size() - 1);
}

double two_tailed(double t, double df) {
  boost::math::students_t dist(df);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
}

}  // namespace

double paired_t_test(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("paired samples differ in length");
  if (a.size() < 2) throw std::invalid_argument("paired test needs at least 2 pairs");
  std::vector<double> d(a.size());
  for (size_t k = 0; k < a.size(); ++k) d[k] = a[k] - b[k];
  const double m = mean_of(d);
  const double var = sample_variance(d, m);
  if (var == 0.0) throw DegenerateSample("paired differences have zero variance");
  const double n = static_cast<double>(d.size());
  return two_tailed(m / std::sqrt(var / n), n - 1.0);
}

double welch_t_test(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() < 2 || b.size() < 2) throw std::invalid_argument("Welch test needs 2+ samples per group");
  const double ma = mean_of(a), mb = mean_of(b);
  const double va = sample_variance(a, ma) / a.size();
  const double vb = sample_variance(b, mb) / b.size();
  if (va == 0.0 && vb == 0.0) {
    if (ma == mb) throw DegenerateSample("both samples constant and equal");
    return 0.0;
  }
  const double t = (ma - mb) / std::sqrt(va + vb);
  const double df = (va + vb) * (va + vb) /
                    (va * va / (a.size() - 1.0) + vb * vb / (b.size() - 1.0));
  return two_tailed(t, df);
}

}  // namespace crew
