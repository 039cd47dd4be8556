#include "doctest.h"

#include <cmath>

#include "gfsim/cumulant.hpp"
#include "gfsim/lamperti.hpp"
#include "gfsim/spine.hpp"

using namespace gfsim;

namespace {

PathSkeleton linear_skeleton(double slope, double horizon) {
  LevyTriplet t(slope, 0.0, zero_measure());
  Rng rng(0);
  return sample_path(t, horizon, {}, rng);
}

}  // namespace

TEST_CASE("clock integral and its inverse") {
  for (double a : {0.5, 0.25})
    for (double slope : {-3.0, -1e-9, 0.0, 2.0})
      for (double len : {0.1, 1.0, 4.0}) {
        double c = clock_integral(a, 0.7, slope, len);
        double direct = slope == 0.0 ? std::exp(a * 0.7) * len
                                     : std::exp(a * 0.7) * std::expm1(a * slope * len) / (a * slope);
        CHECK(c == doctest::Approx(direct).epsilon(1e-9));
        CHECK(clock_inverse(a, 0.7, slope, c) == doctest::Approx(len).epsilon(1e-9));
      }
  CHECK(std::isinf(clock_inverse(0.5, 0.0, -1.0, 2.5)));
}

TEST_CASE("drift-only pssMp has closed forms") {
  // ξ(s) = -s, α = -1/2: X(t) = (1 - t/2)^2 and I = 2
  PathSkeleton sk = linear_skeleton(-1.0, 60.0);
  PssmpPath p = lamperti_forward(sk, 1.0, -0.5);
  for (double t : {0.1, 0.5, 1.0, 1.9}) CHECK(p.value(t) == doctest::Approx(std::pow(1.0 - t / 2.0, 2)).epsilon(1e-9));
  for (double c : {0.5, 1.0, 4.0}) {
    AbsorptionResult r = absorption_time(linear_skeleton(-c, 80.0 / c), -0.5, 2.0 / c);
    CHECK(r.value == doctest::Approx(2.0 / c).epsilon(1e-12));
  }
}

TEST_CASE("self-similarity on a shared skeleton") {
  SmallJumpPolicy pol;
  pol.delta = 0.05;
  Rng rng(3);
  PathSkeleton sk = sample_path(StableFamily(1.25).triplet(), 3.0, pol, rng);
  const double alpha = -0.25;
  PssmpPath one = lamperti_forward(sk, 1.0, alpha);
  for (double x : {0.3, 2.0}) {
    PssmpPath px = lamperti_forward(sk, x, alpha);
    CHECK(px.end_time() == doctest::Approx(one.end_time() * std::pow(x, -alpha)).epsilon(1e-12));
    for (double f : {0.1, 0.4, 0.8}) {
      double t = f * px.end_time();
      CHECK(px.value(t) == doctest::Approx(x * one.value(t * std::pow(x, alpha))).epsilon(1e-10));
    }
  }
}

TEST_CASE("negative jumps of the transformed path") {
  PathSkeleton sk;
  sk.horizon = 2.0;
  sk.knot_times = {0.0, 1.0, 2.0};
  sk.knot_before = {0.0, 0.0, 0.0};
  sk.knot_after = {0.0, -std::log(2.0), -std::log(2.0)};
  PssmpPath p = lamperti_forward(sk, 4.0, -0.5);
  auto jumps = p.negative_jumps();
  REQUIRE(jumps.size() == 1);
  CHECK(jumps[0].first == doctest::Approx(2.0));
  CHECK(jumps[0].second == doctest::Approx(2.0));
}

TEST_CASE("absorption table and exponential functional") {
  LevyTriplet t = spine_triplet(1.5, SpineSign::minus);
  SmallJumpPolicy pol;
  pol.delta = 0.05;
  auto table = AbsorptionTable::build(t, -0.5, pol, 2000, 11);
  CHECK(table.size() == 2000);
  CHECK(table.unresolved() == 0);
  CHECK(table.cdf(0.0) == 0.0);
  CHECK(table.cdf(1e9) == 1.0);
  auto a = exp_functional_moment(t, -0.5, 1.0, 500, 4, pol, {}, 1);
  auto b = exp_functional_moment(t, -0.5, 1.0, 500, 4, pol, {}, 3);
  CHECK(a.estimate.mean == b.estimate.mean);
  CHECK(a.estimate.m2 == b.estimate.m2);
}
