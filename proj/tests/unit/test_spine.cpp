#include "doctest.h"

#include <cmath>

#include "gfsim/error.hpp"
#include "gfsim/spine.hpp"

using namespace gfsim;

namespace {

SpineConfig base(SpineSign s) {
  SpineConfig c;
  c.sign = s;
  c.jumps.delta = 0.05;
  return c;
}

}  // namespace

TEST_CASE("spine config validation") {
  auto c = base(SpineSign::minus);
  c.x = 0.0;
  CHECK_THROWS_AS(c.validate(), DomainError);
  c = base(SpineSign::plus);
  c.theta = 1.6;
  CHECK_THROWS_AS(c.validate(), DomainError);
  c.theta = 1.0;
  CHECK_THROWS_AS(c.validate(), DomainError);
  c.theta = 1.25;
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("minus paths are absorbed") {
  auto c = base(SpineSign::minus);
  for (std::uint64_t s = 0; s < 50; ++s) {
    Rng rng(derive_key(2, s));
    PssmpPath p = simulate_spine(c, rng);
    REQUIRE(p.absorbed);
    REQUIRE(p.absorption_time);
    CHECK(*p.absorption_time >= p.end_time());
    CHECK(p.value(*p.absorption_time) == 0.0);
    CHECK(p.value(p.end_time()) < 1e-3);
  }
}

TEST_CASE("plus from zero and determinism") {
  auto c = base(SpineSign::plus);
  c.x = 0.0;
  c.horizon = 2.0;
  Rng a(11), b(11);
  PssmpPath p = simulate_spine(c, a), q = simulate_spine(c, b);
  CHECK(p.start_approximated);
  CHECK(p.x == c.x0_floor);
  CHECK(p.end_time() == doctest::Approx(2.0));
  CHECK(p.value(1.0) == q.value(1.0));
  CHECK(!p.absorbed);
}

TEST_CASE("absorption probabilities are monotone in t") {
  SmallJumpPolicy pol;
  pol.delta = 0.05;
  auto est = prob_I_leq({0.1, 0.5, 2.0, 50.0}, 1.5, 2000, 3, pol);
  REQUIRE(est.size() == 4);
  for (std::size_t i = 1; i < est.size(); ++i) CHECK(est[i].mean >= est[i - 1].mean);
  CHECK(est[3].mean > 0.99);
}

TEST_CASE("P0+ sampler is deterministic and nonnegative") {
  P0PlusPlan plan;
  plan.theta = 1.5;
  plan.x0_floor = 1e-6;
  plan.spine_jumps.delta = 0.05;
  plan.tree.jumps.delta = 0.05;
  plan.tree.jumps.gaussian = true;
  plan.delays = spine_absorption_table(1.5, 500, 1, plan.spine_jumps);
  P0PlusSampler s(plan);
  for (std::uint64_t k = 0; k < 10; ++k) {
    double a = s.sample(0.5, k);
    CHECK(a >= 0.0);
    CHECK(a == s.sample(0.5, k));
  }
}
