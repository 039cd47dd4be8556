#include "gfsim/stats.hpp"

#include <algorithm>

namespace gfsim {

void EstimateWithCI::add(double x) {
  ++n;
  double d = x - mean;
  mean += d / static_cast<double>(n);
  m2 += d * (x - mean);
}

void EstimateWithCI::merge(const EstimateWithCI& o) {
  if (o.n == 0) return;
  if (n == 0) {
    std::uint64_t s = seed;
    *this = o;
    if (s) seed = s;
    return;
  }
  double na = static_cast<double>(n), nb = static_cast<double>(o.n), nt = na + nb;
  double d = o.mean - mean;
  mean = (na * mean + nb * o.mean) / nt;
  m2 += o.m2 + d * d * na * nb / nt;
  n += o.n;
}

EstimateWithCI estimate_of(const std::vector<double>& xs, std::uint64_t seed) {
  EstimateWithCI e;
  e.seed = seed;
  for (double x : xs) e.add(x);
  return e;
}

EstimateWithCI merge_all(const std::vector<EstimateWithCI>& parts) {
  if (parts.empty()) return {};
  std::vector<EstimateWithCI> level = parts;
  while (level.size() > 1) {
    std::vector<EstimateWithCI> next;
    for (std::size_t i = 0; i < level.size(); i += 2) {
      EstimateWithCI e = level[i];
      if (i + 1 < level.size()) e.merge(level[i + 1]);
      next.push_back(e);
    }
    level.swap(next);
  }
  return level.front();
}

std::pair<double, double> BinomialEstimate::wilson(double z) const {
  if (n == 0) return {0.0, 1.0};
  double nn = static_cast<double>(n), ph = p(), z2 = z * z;
  double centre = (ph + z2 / (2 * nn)) / (1 + z2 / nn);
  double half = z * std::sqrt(ph * (1 - ph) / nn + z2 / (4 * nn * nn)) / (1 + z2 / nn);
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

double kolmogorov_q(double lambda) {
  if (lambda < 0.2) return 1.0;
  double sum = 0.0, sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    double term = sign * std::exp(-2.0 * k * k * lambda * lambda);
    sum += term;
    if (std::abs(term) < 1e-16) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b, double level) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  KsResult r;
  r.statistic = d;
  double ne = na * nb / (na + nb);
  double sq = std::sqrt(ne);
  r.p_value = kolmogorov_q((sq + 0.12 + 0.11 / sq) * d);
  // invert Q for the critical value (asymptotic form with the same correction)
  double lo = 0.0, hi = 5.0;
  for (int k = 0; k < 200; ++k) {
    double mid = 0.5 * (lo + hi);
    (kolmogorov_q(mid) > level ? lo : hi) = mid;
  }
  r.critical = 0.5 * (lo + hi) / (sq + 0.12 + 0.11 / sq);
  r.rejected = r.p_value < level;
  return r;
}

bool intervals_overlap(double lo1, double hi1, double lo2, double hi2) { return lo1 <= hi2 && lo2 <= hi1; }

}  // namespace gfsim
