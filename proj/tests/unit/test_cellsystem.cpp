#include "doctest.h"

#include <cmath>
#include <sstream>

#include "gfsim/cellsystem.hpp"

using namespace gfsim;

namespace {

TruncationPolicy small_policy() {
  TruncationPolicy p;
  p.x_min = 0.1;
  p.max_generation = 4;
  p.jumps.delta = 0.05;
  p.jumps.gaussian = true;
  return p;
}

}  // namespace

TEST_CASE("labels") {
  CellLabel r;
  CHECK(r.str() == "r");
  CellLabel c = r.child(1).child(3).child(2);
  CHECK(c.str() == "1.3.2");
  CHECK(CellLabel::parse("1.3.2") == c);
  CHECK(CellLabel::parse("r") == r);
  CHECK(c.parent().str() == "1.3");
  CHECK(c.generation() == 3);
}

TEST_CASE("tree growth is deterministic") {
  StableFamily f(1.5);
  auto pol = small_policy();
  CellTree a = grow_tree(f.params(), 1.0, pol, 42);
  CellTree b = grow_tree(f.params(), 1.0, pol, 42);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].birth_time == b.records[i].birth_time);
    CHECK(a.records[i].birth_size == b.records[i].birth_size);
    CHECK(a.label(i) == b.label(i));
  }
}

TEST_CASE("tree structure invariants") {
  StableFamily f(1.25);
  auto pol = small_policy();
  for (std::uint64_t s = 0; s < 20; ++s) {
    CellTree t = grow_tree(f.params(), 1.0, pol, s);
    REQUIRE(!t.records.empty());
    CHECK(t.records[0].parent == -1);
    CHECK(t.records[0].birth_size == 1.0);
    for (std::size_t i = 1; i < t.records.size(); ++i) {
      const auto& r = t.records[i];
      REQUIRE(r.parent >= 0);
      const auto& p = t.records[static_cast<std::size_t>(r.parent)];
      CHECK(r.generation == p.generation + 1);
      CHECK(r.birth_time >= p.birth_time);
      CHECK(r.generation <= pol.max_generation);
      CHECK(t.label(i).generation() == r.generation);
    }
  }
}

TEST_CASE("root below x_min is killed at once") {
  StableFamily f(1.5);
  auto pol = small_policy();
  CellTree t = grow_tree(f.params(), 0.01, pol, 1);
  REQUIRE(t.records.size() == 1);
  CHECK(t.records[0].truncation == Truncation::killed_below);
  CHECK(area_martingale(t, 0) == doctest::Approx(std::pow(0.01, f.omega_minus())));
  CHECK(area_martingale(t, 3) == doctest::Approx(std::pow(0.01, f.omega_minus())));
}

TEST_CASE("serialization round-trip") {
  StableFamily f(1.5);
  CellTree t = grow_tree(f.params(), 1.0, small_policy(), 7);
  std::stringstream ss;
  write_tree(ss, t);
  auto recs = read_tree_records(ss);
  REQUIRE(recs.size() == t.records.size());
  for (std::size_t i = 0; i < recs.size(); ++i) {
    CHECK(recs[i].generation == t.records[i].generation);
    CHECK(recs[i].ordinal == t.records[i].ordinal);
    CHECK(recs[i].birth_time == doctest::Approx(t.records[i].birth_time).epsilon(1e-12));
    CHECK(recs[i].birth_size == doctest::Approx(t.records[i].birth_size).epsilon(1e-12));
    CHECK(recs[i].grown == t.records[i].grown);
  }
}

TEST_CASE("area profile is nondecreasing and bounded by the total") {
  StableFamily f(1.5);
  auto pol = small_policy();
  pol.max_generation = 64;
  CellTree t = grow_tree(f.params(), 1.0, pol, 9);
  AreaProfile p = area_profile(t);
  double prev = 0.0;
  for (double s = 0.0; s <= 5.0; s += 0.05) {
    double v = p.at(s);
    CHECK(v >= prev - 1e-15);
    CHECK(v <= p.total + 1e-12);
    prev = v;
  }
}

TEST_CASE("cell budget") {
  StableFamily f(1.5);
  auto pol = small_policy();
  pol.x_min = 1e-4;
  pol.max_generation = 64;
  pol.max_cells = 5;
  bool thrown = false;
  for (std::uint64_t s = 0; s < 10 && !thrown; ++s) {
    try {
      grow_tree(f.params(), 1.0, pol, s);
    } catch (const BudgetExceeded& e) {
      thrown = true;
      CHECK(e.partial().records.size() >= 5);
    }
  }
  CHECK(thrown);
}

TEST_CASE("expected area with at-height placement matches the profile") {
  StableFamily f(1.5);
  auto pol = small_policy();
  pol.horizon = 0.5;
  CellTree t = grow_tree(f.params(), 1.0, pol, 13);
  AbsorptionTable zero(std::vector<double>{0.0});
  AreaProfile p = area_profile(t);
  for (double s : {0.1, 0.3, 0.45}) CHECK(expected_area(t, s, zero) == doctest::Approx(p.at(s)).epsilon(1e-9));
}
