#include "doctest.h"

#include <cmath>
#include <vector>

#include "gfsim/rng.hpp"
#include "gfsim/stats.hpp"

using namespace gfsim;

TEST_CASE("estimate against two-pass formulas") {
  std::vector<double> xs{1.5, -2.0, 3.25, 0.0, 7.0, 1.0};
  auto e = estimate_of(xs);
  double m = 0.0;
  for (double x : xs) m += x;
  m /= xs.size();
  double v = 0.0;
  for (double x : xs) v += (x - m) * (x - m);
  v /= xs.size() - 1;
  CHECK(e.mean == doctest::Approx(m).epsilon(1e-15));
  CHECK(e.variance() == doctest::Approx(v).epsilon(1e-14));
  CHECK(e.std_error() == doctest::Approx(std::sqrt(v / 6.0)));
}

TEST_CASE("merge is associative") {
  Rng rng(4);
  std::vector<EstimateWithCI> parts(7);
  std::vector<double> all;
  for (std::size_t i = 0; i < parts.size(); ++i)
    for (std::size_t k = 0; k < 10 + 13 * i; ++k) {
      double x = rng.normal() * 3.0 + 1.0;
      parts[i].add(x);
      all.push_back(x);
    }
  EstimateWithCI left;
  for (const auto& p : parts) left.merge(p);
  EstimateWithCI right;
  for (std::size_t i = parts.size(); i-- > 0;) {
    EstimateWithCI t = parts[i];
    t.merge(right);
    right = t;
  }
  auto tree = merge_all(parts);
  auto flat = estimate_of(all);
  CHECK(left.n == flat.n);
  CHECK(std::abs(left.mean - right.mean) <= 1e-15 * std::abs(flat.mean) + 1e-15);
  CHECK(std::abs(tree.mean - flat.mean) <= 1e-14);
  CHECK(std::abs(left.m2 - right.m2) <= 1e-12 * flat.m2);
  CHECK(std::abs(tree.m2 - flat.m2) <= 1e-12 * flat.m2);
}

TEST_CASE("kolmogorov distribution") {
  CHECK(kolmogorov_q(1.3580986393225507) == doctest::Approx(0.05).epsilon(1e-6));
  CHECK(kolmogorov_q(0.0) == 1.0);
  CHECK(kolmogorov_q(10.0) < 1e-30);
}

TEST_CASE("two-sample KS") {
  Rng rng(8);
  std::vector<double> a, b, c;
  for (int i = 0; i < 2000; ++i) {
    a.push_back(rng.normal());
    b.push_back(rng.normal());
    c.push_back(rng.normal() + 0.3);
  }
  CHECK(!ks_two_sample(a, b).rejected);
  auto r = ks_two_sample(a, c);
  CHECK(r.rejected);
  CHECK(r.p_value < 1e-6);
  CHECK(ks_two_sample(a, a).statistic == 0.0);
}

TEST_CASE("KS false rejection rate") {
  int rej = 0;
  for (std::uint64_t s = 0; s < 200; ++s) {
    Rng rng(derive_key(21, s));
    std::vector<double> a(300), b(300);
    for (auto& x : a) x = rng.uniform();
    for (auto& x : b) x = rng.uniform();
    rej += ks_two_sample(a, b).rejected;
  }
  CHECK(rej <= 20);
}

TEST_CASE("Wilson interval") {
  BinomialEstimate b{100, 20};
  auto [lo, hi] = b.wilson();
  CHECK(lo == doctest::Approx(0.1333).epsilon(1e-3));
  CHECK(hi == doctest::Approx(0.2888).epsilon(1e-3));
  BinomialEstimate z{50, 0};
  CHECK(z.wilson().first == doctest::Approx(0.0));
  CHECK(z.wilson().second > 0.0);
  CHECK(intervals_overlap(0, 1, 1, 2));
  CHECK(!intervals_overlap(0, 1, 1.5, 2));
}
