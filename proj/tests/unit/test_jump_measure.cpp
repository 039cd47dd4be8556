#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "gfsim/cumulant.hpp"
#include "gfsim/jump_measure.hpp"
#include "gfsim/spine.hpp"

using namespace gfsim;

namespace {

// cumulative mass of density on [lo, x] by composite Simpson in log u
template <class F>
double simpson_log(F f, double lo, double x, int n = 4000) {
  double a = std::log(lo), b = std::log(x), h = (b - a) / n, s = 0.0;
  for (int i = 0; i <= n; ++i) {
    double v = a + i * h, w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    s += w * f(std::exp(v)) * std::exp(v);
  }
  return s * h / 3.0;
}

}  // namespace

TEST_CASE("split mapping is an involution") {
  for (double y : {-5.0, -1.0, -std::log(2.0), -0.3, -1e-3}) {
    double z = SplitMapping::apply(y);
    CHECK(std::abs(SplitMapping::apply(z) - y) <= 1e-10 * std::max(1.0, std::abs(y)));
    CHECK(SplitMapping::abs_derivative(y) * SplitMapping::abs_derivative(z) == doctest::Approx(1.0).epsilon(1e-10));
  }
  CHECK(SplitMapping::apply(-std::log(2.0)) == doctest::Approx(-std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("canonical measure constants") {
  CHECK(stable_c_minus(1.5) == doctest::Approx(0.75 / std::sqrt(M_PI)).epsilon(1e-14));
  CHECK(stable_c_plus(1.5) == 0.0);
  JumpMeasureSpec m = canonical_lambda(1.5);
  CHECK_FALSE(m.has(Side::positive));
  CHECK(m.density(-0.8) == 0.0);
  CHECK(canonical_lambda(1.25).has(Side::positive));
}

TEST_CASE("spine exponents are the tilted cumulant") {
  for (double th : {1.1, 1.25, 1.5})
    for (SpineSign s : {SpineSign::minus, SpineSign::plus}) CHECK(spine_tilt_deviation(th, s) <= 1e-10);
  LevyTriplet t = spine_triplet(1.5, SpineSign::minus);
  for (double q : {0.25, 0.5, 1.0}) CHECK(std::abs(psi_eval(t, q) - kappa_theta_closed(1.5, 2.0 + q)) <= 1e-10);
  CHECK(psi_mean(t) == doctest::Approx(-std::sqrt(M_PI)).epsilon(1e-10));
  CHECK(psi_mean(spine_triplet(1.5, SpineSign::plus)) == doctest::Approx(std::sqrt(M_PI) / 2).epsilon(1e-10));
}

TEST_CASE("spine measure tilts the canonical measure") {
  // Π⁻(dy) = e^{ω₋ y} Λ(dy) + e^{ω₋ y} Λ̃(dy) with Λ̃ the push-forward under the split mapping
  double th = 1.25, om = th + 0.5;
  JumpMeasureSpec lam = canonical_lambda(th), pim = spine_measure(th, SpineSign::minus);
  for (double y : {-2.0, -1.0, -0.5, -0.1}) {
    double want = std::exp(om * y) * (lam.density(y) + SplitMapping::pushforward_density(lam, y));
    CHECK(pim.density(y) == doctest::Approx(want).epsilon(1e-12));
  }
  for (double y : {0.1, 1.0, 3.0}) CHECK(pim.density(y) == doctest::Approx(std::exp(om * y) * lam.density(y)).epsilon(1e-12));
}

TEST_CASE("panel sampler reproduces its density") {
  JumpMeasureSpec m = spine_measure(1.5, SpineSign::minus);
  const double delta = 0.01;
  auto table = jump_table(m, Side::negative, delta);
  auto dens = [&](double u) { return m.density(Side::negative, u); };
  double total = table->total();
  CHECK(total == doctest::Approx(simpson_log(dens, delta, table->hi())).epsilon(1e-6));
  Rng rng(42);
  std::vector<double> xs(100000);
  for (auto& x : xs) x = table->sample(rng);
  std::sort(xs.begin(), xs.end());
  double d = 0.0;
  for (double q : {0.02, 0.05, 0.1, 0.3, 1.0, 3.0}) {
    double emp = static_cast<double>(std::upper_bound(xs.begin(), xs.end(), q) - xs.begin()) / xs.size();
    d = std::max(d, std::abs(emp - simpson_log(dens, delta, q) / total));
  }
  CHECK(d < 0.01);
  double ks = 0.0;
  for (std::size_t i = 0; i < xs.size(); i += 97) {
    double f = table->mass_below(xs[i]) / total;
    ks = std::max({ks, std::abs(f - double(i) / xs.size()), std::abs(f - double(i + 1) / xs.size())});
  }
  CHECK(ks < 0.01);
}

TEST_CASE("sampler is deterministic for a fixed key") {
  auto table = jump_table(canonical_lambda(1.25), Side::positive, 0.05);
  Rng a(7), b(7);
  for (int i = 0; i < 100; ++i) CHECK(table->sample(a) == table->sample(b));
}

TEST_CASE("tail of the canonical measure is regularly varying with index -theta") {
  std::vector<double> grid = {1e-4, 3e-4, 1e-3, 1e-2, 1e-1};
  for (double th : {1.1, 1.5}) {
    RegularVariationFit fit = tail_equivalence_check(th, grid);
    CHECK(std::abs(fit.local_index + th) < 0.05);
    CHECK(fit.slowly_varying_samples.front().second ==
          doctest::Approx(stable_c_minus(th) / th).epsilon(2e-3));
    CHECK(std::abs(fit.pi_minus_ratio.front() - 1.0) < 0.01);
  }
}

TEST_CASE("uniform measure tails") {
  JumpMeasureSpec m = uniform_measure(0.5, 1.5, 3.0);
  CHECK(m.pos_tail(1.0) == doctest::Approx(1.5).epsilon(1e-9));
  CHECK(m.pos_tail(0.1) == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(m.neg_tail(0.1) == 0.0);
  CHECK(m.content_hash() != uniform_measure(0.5, 1.5, 2.0).content_hash());
}
