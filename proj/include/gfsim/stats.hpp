#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace gfsim {

/// Running mean and sum of squared deviations; merge is Chan's pairwise update.
struct EstimateWithCI {
  std::uint64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;
  std::uint64_t seed = 0;

  void add(double x);
  void merge(const EstimateWithCI& o);
  double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
  double std_error() const { return n > 0 ? std::sqrt(variance() / static_cast<double>(n)) : 0.0; }
  double lo95() const { return mean - 1.959963984540054 * std_error(); }
  double hi95() const { return mean + 1.959963984540054 * std_error(); }
};

EstimateWithCI estimate_of(const std::vector<double>& xs, std::uint64_t seed = 0);

/// Merge a list of estimates pairwise in index order (tree reduction).
EstimateWithCI merge_all(const std::vector<EstimateWithCI>& parts);

struct BinomialEstimate {
  std::uint64_t n = 0;
  std::uint64_t k = 0;
  double p() const { return n ? static_cast<double>(k) / static_cast<double>(n) : 0.0; }
  double std_error() const { return n ? std::sqrt(p() * (1.0 - p()) / static_cast<double>(n)) : 0.0; }
  /// Wilson score interval at the given two-sided level (z = 1.96 for 95%).
  std::pair<double, double> wilson(double z = 1.959963984540054) const;
};

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
  double critical = 0.0;  // at the requested level
  bool rejected = false;
};

/// Kolmogorov limiting survival function Q(λ) = 2 Σ (-1)^{k-1} exp(-2 k² λ²).
double kolmogorov_q(double lambda);

/// Two-sample Kolmogorov-Smirnov test with Stephens' small-sample correction.
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b, double level = 0.05);

bool intervals_overlap(double lo1, double hi1, double lo2, double hi2);

}  // namespace gfsim
