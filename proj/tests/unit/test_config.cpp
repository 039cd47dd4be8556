#include "doctest.h"

#include <sstream>

#include "gfsim/config.hpp"
#include "gfsim/error.hpp"

using namespace gfsim;

namespace {

Config parse(const std::string& s) {
  std::istringstream is(s);
  return Config::parse(is);
}

}  // namespace

TEST_CASE("defaults and parsing") {
  Config d;
  CHECK(d.real("levy.delta") == 0.05);
  CHECK(d.integer("run.seed") == 20240601u);
  Config c = parse("# comment\n[levy]\ndelta = 0.02\ngaussian = false\n\n[run]\nseed=7\n");
  CHECK(c.real("levy.delta") == 0.02);
  CHECK(!c.flag("levy.gaussian"));
  CHECK(c.integer("run.seed") == 7u);
  CHECK(c.hash() != d.hash());
  CHECK(parse("").hash() == d.hash());
}

TEST_CASE("errors name the key and line") {
  try {
    parse("[levy]\ndelta = 0.1\ngrid_step = abc\n");
    FAIL("no error");
  } catch (const ConfigError& e) {
    CHECK(e.key() == "levy.grid_step");
    CHECK(e.line() == 3);
  }
  try {
    parse("[levy]\nnot_a_key = 1\n");
    FAIL("no error");
  } catch (const ConfigError& e) {
    CHECK(e.key() == "levy.not_a_key");
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(parse("delta = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse("[levy\n"), ConfigError);
  CHECK_THROWS_AS(parse("[levy]\ndelta\n"), ConfigError);
  CHECK_THROWS_AS(parse("[run]\nworkers = -1\n"), ConfigError);
  CHECK_THROWS_AS(parse("[levy]\ngaussian = maybe\n"), ConfigError);
}

TEST_CASE("set and canonical form") {
  Config a, b;
  a.set("spine.x0_floor", "1e-5");
  b.set("spine.x0_floor", "0.00001");
  CHECK(a.real("spine.x0_floor") == b.real("spine.x0_floor"));
  CHECK_THROWS_AS(a.set("spine.nope", "1"), ConfigError);
  CHECK(a.canonical().find("x0_floor") != std::string::npos);
}
