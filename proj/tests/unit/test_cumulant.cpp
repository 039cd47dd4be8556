#include "doctest.h"

#include <cmath>

#include "gfsim/cumulant.hpp"
#include "gfsim/error.hpp"

using namespace gfsim;

namespace {

// independent closed form, written from the product of gamma functions
double kappa_oracle(double theta, double q) {
  return std::cos(M_PI * (q - theta)) * std::tgamma(q - theta) * std::tgamma(1.0 + 2.0 * theta - q) / M_PI;
}

double q0_oracle(double theta) {
  double a = theta - 1.0, om = theta + 0.5, rho = theta, qs = theta - 0.5;
  return om * (1.0 / a + 1.0 / qs + std::max(0.0, (a / rho) * (1.0 / qs - 1.0 / a)));
}

}  // namespace

TEST_CASE("closed-form cumulant agrees with the gamma-product oracle") {
  for (double th : {1.1, 1.25, 1.4, 1.5})
    for (double q : {th + 0.2, th + 0.9, th + 1.3, 2.0 * th + 0.8})
      CHECK(kappa_theta_closed(th, q) == doctest::Approx(kappa_oracle(th, q)).epsilon(1e-12));
  CHECK(kappa_theta_closed(1.5, 2.5) == doctest::Approx(-0.282095).epsilon(1e-6));
  CHECK_THROWS_AS(kappa_theta_closed(1.5, 1.5), DomainError);
  CHECK_THROWS_AS(kappa_theta_closed(1.25, 3.5), DomainError);
}

TEST_CASE("Cramér roots of the stable family") {
  for (double th : {1.1, 1.25, 1.4, 1.5}) {
    CramerRoots r = find_roots([th](double q) { return kappa_theta_closed(th, q); }, {th + 1e-9, 2 * th + 1 - 1e-9});
    REQUIRE(r.omega_minus);
    REQUIRE(r.omega_plus);
    CHECK(std::abs(*r.omega_minus - (th + 0.5)) <= 1e-9);
    CHECK(std::abs(*r.omega_plus - (th + 1.5)) <= 1e-9);
  }
  CHECK(std::abs(kappa_theta_derivative(1.5, 2.0) + std::sqrt(M_PI)) <= 1e-6);
  CHECK(kappa_theta_derivative(1.5, 3.0) == doctest::Approx(std::sqrt(M_PI) / 2).epsilon(1e-10));
}

TEST_CASE("derivative matches a central difference") {
  for (double th : {1.1, 1.3, 1.5})
    for (double q : {th + 0.4, th + 1.0, th + 1.6}) {
      double h = 1e-5;
      double fd = (kappa_oracle(th, q + h) - kappa_oracle(th, q - h)) / (2 * h);
      CHECK(kappa_theta_derivative(th, q) == doctest::Approx(fd).epsilon(1e-7));
    }
}

TEST_CASE("find_roots on a synthetic convex function") {
  CramerRoots r = find_roots([](double q) { return q * q - 4.0; }, {-1.0, 3.0});
  CHECK_FALSE(r.omega_minus);
  REQUIRE(r.omega_plus);
  CHECK(*r.omega_plus == doctest::Approx(2.0).epsilon(1e-12));
  CHECK_THROWS_AS(find_roots([](double q) { return q * q + 1.0; }, {-1.0, 3.0}), NoSignChangeError);
}

TEST_CASE("quadrature cumulant of the calibrated triplet closes on the closed form") {
  for (double th : {1.1, 1.25, 1.5}) {
    StableFamily f(th);
    LevyTriplet t = f.triplet();
    CHECK(std::abs(kappa_eval(t, f.omega_minus())) <= 1e-9);
    for (int i = 1; i <= 10; ++i) {
      double q = th + (th + 1.0) * i / 11.0;
      CHECK(std::abs(kappa_eval(t, q) - kappa_oracle(th, q)) <= 1e-6);
    }
  }
}

TEST_CASE("calibrated drift at theta = 3/2") {
  StableFamily f(1.5);
  CHECK(f.triplet().drift_b == doctest::Approx(-1.1283791670955).epsilon(1e-11));
  CHECK(calibrate_drift(f.triplet().jumps, 0.0, 2.0) == doctest::Approx(f.triplet().drift_b).epsilon(1e-12));
}

TEST_CASE("exponent bookkeeping") {
  LogBoundExponents b = log_bound_exponents(StableFamily(1.5));
  CHECK(b.q_star == 1.0);
  CHECK(b.q0 == 6.0);
  CHECK(log_bound_exponents(StableFamily(1.25)).q0 == doctest::Approx(28.0 / 3.0).epsilon(1e-14));
  for (double th : {1.1, 1.25, 1.4, 1.5})
    CHECK(log_bound_exponents(StableFamily(th)).q0 == doctest::Approx(q0_oracle(th)).epsilon(1e-14));
  GFParams p = StableFamily(1.5).params();
  LogBoundExponents g = log_bound_exponents(p);
  CHECK(g.q_star == 1.0);
  CHECK(g.q0 == 6.0);
}

TEST_CASE("upper-envelope hypothesis") {
  CHECK(upper_envelope_hypothesis(StableFamily(1.5).params()));
  CHECK_FALSE(upper_envelope_hypothesis(StableFamily(1.25).params()));
  CHECK(kappa_domain_sup(StableFamily(1.25).triplet(), 0.0) == doctest::Approx(3.5));
}

TEST_CASE("triplet validation") {
  CHECK_THROWS_AS(LevyTriplet(0.0, -1.0, zero_measure()), DomainError);
  CHECK_NOTHROW(validate(StableFamily(1.25).params()));
  GFParams bad = StableFamily(1.25).params();
  bad.omega_minus += 0.1;
  CHECK_THROWS_AS(validate(bad), DomainError);
}

TEST_CASE("psi of a uniform compound-Poisson measure") {
  JumpMeasureSpec m = uniform_measure(-1.0, -0.5, 2.0);
  LevyTriplet t(0.3, 0.2, m);
  for (double q : {0.5, 1.0, 2.0}) {
    // ∫_{-1}^{-1/2} (e^{qy} - 1 + q(1 - e^y)) 4 dy
    double jumps = 4.0 * ((std::exp(-0.5 * q) - std::exp(-q)) / q - 0.5 + q * (0.5 - (std::exp(-0.5) - std::exp(-1.0))));
    CHECK(psi_eval(t, q) == doctest::Approx(0.3 * q + 0.1 * q * q + jumps).epsilon(1e-9));
  }
}
