#ifndef IDFIELD_STATS_HPP
#define IDFIELD_STATS_HPP

#include <cstdint>
#include <vector>

namespace idfield {

struct SampleSummary {
  std::int64_t n = 0;
  double mean = 0.0;
  double variance = 0.0;   // unbiased
  double std_error = 0.0;  // of the mean
};

SampleSummary summarize(const std::vector<double>& xs);

// Two-sample Kolmogorov-Smirnov statistic sup_x |F_a(x) - F_b(x)|, with
// ties handled by advancing equal values together.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

// Large-sample critical value c(alpha) sqrt((n+m)/(n m)) with
// c(alpha) = sqrt(-ln(alpha/2)/2).
double ks_critical(double alpha, std::int64_t n, std::int64_t m);

}  // namespace idfield

#endif
