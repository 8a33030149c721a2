#include "idfield/stats.hpp"

#include <algorithm>
#include <cmath>

#include "idfield/errors.hpp"

namespace idfield {

SampleSummary summarize(const std::vector<double>& xs) {
  SampleSummary s;
  s.n = std::int64_t(xs.size());
  if (s.n == 0) return s;
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / double(s.n);
  if (s.n > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.variance = ss / double(s.n - 1);
    s.std_error = std::sqrt(s.variance / double(s.n));
  }
  return s;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw InvalidSpec("KS needs nonempty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = double(a.size()), nb = double(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(double(i) / na - double(j) / nb));
  }
  return d;
}

double ks_critical(double alpha, std::int64_t n, std::int64_t m) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidSpec("alpha in (0,1)");
  const double c = std::sqrt(-std::log(alpha / 2.0) / 2.0);
  return c * std::sqrt(double(n + m) / (double(n) * double(m)));
}

}  // namespace idfield
