#include "doctest.h"

#include <cmath>

#include "gfsim/cumulant.hpp"
#include "gfsim/error.hpp"
#include "gfsim/levy.hpp"
#include "gfsim/spine.hpp"
#include "gfsim/stats.hpp"

using namespace gfsim;

TEST_CASE("mean-preserving drift") {
  LevyTriplet t = StableFamily(1.25).triplet();
  for (double d : {0.01, 0.05}) {
    SmallJumpPolicy p;
    p.delta = d;
    LevyDriver drv(t, p);
    CHECK(drv.simulated_mean() == doctest::Approx(psi_mean(t)).epsilon(1e-9));
    CHECK(drv.sigma() == 0.0);
  }
}

TEST_CASE("matched exponent") {
  StableFamily f(1.5);
  SmallJumpPolicy p;
  p.delta = 0.05;
  p.gaussian = true;
  p.match_exponent = f.omega_minus();
  LevyDriver drv(f.triplet(), p);
  CHECK(drv.simulated_psi(2.0) == doctest::Approx(psi_eval(f.triplet(), 2.0)).epsilon(1e-10));
  CHECK(drv.sigma() > 0.0);
  CHECK(drv.simulated_psi(2.0) + drv.resolved_child_mass(2.0) +
            child_moment(f.triplet().jumps, 2.0, 0.0, 0.05) ==
        doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("rate budget") {
  SmallJumpPolicy p;
  p.delta = 1e-6;
  p.rate_budget = 1e3;
  CHECK_THROWS_AS(LevyDriver(StableFamily(1.5).triplet(), p), RateOverflowError);
}

TEST_CASE("drift-only path is linear") {
  LevyTriplet t(-2.0, 0.0, zero_measure());
  Rng rng(1);
  PathSkeleton p = sample_path(t, 3.0, {}, rng);
  CHECK(p.end_value() == doctest::Approx(-6.0));
  CHECK(p.value(1.25) == doctest::Approx(-2.5));
  CHECK(p.times.empty());
}

TEST_CASE("path sampling is deterministic") {
  LevyTriplet t = StableFamily(1.25).triplet();
  SmallJumpPolicy pol;
  pol.delta = 0.05;
  Rng a(99), b(99);
  PathSkeleton x = sample_path(t, 2.0, pol, a), y = sample_path(t, 2.0, pol, b);
  CHECK(x.knot_times == y.knot_times);
  CHECK(x.knot_after == y.knot_after);
}

TEST_CASE("minus spine increments have mean -sqrt(pi)") {
  LevyTriplet t = spine_triplet(1.5, SpineSign::minus);
  SmallJumpPolicy pol;
  pol.delta = 0.05;
  LevyDriver drv(t, pol);
  EstimateWithCI e;
  for (std::uint64_t i = 0; i < 20000; ++i) {
    Rng rng(derive_key(5, i));
    e.add(sample_path(drv, 1.0, rng).end_value());
  }
  CHECK(std::abs(e.mean + std::sqrt(M_PI)) <= 3.0 * e.std_error());
}

TEST_CASE("empirical Laplace exponent of the plus spine") {
  LevyTriplet t = spine_triplet(1.5, SpineSign::plus);
  SmallJumpPolicy pol;
  pol.delta = 0.02;
  pol.gaussian = true;
  LevyDriver drv(t, pol);
  for (double q : {0.25, 0.5}) {
    EstimateWithCI e;
    for (std::uint64_t i = 0; i < 20000; ++i) {
      Rng rng(derive_key(17, i));
      e.add(std::exp(-q * sample_path(drv, 1.0, rng).end_value()));
    }
    double want = std::exp(kappa_theta_closed(1.5, 3.0 - q));
    CHECK(std::abs(e.mean - want) <= 3.0 * e.std_error() + 2e-3 * want);
  }
}
