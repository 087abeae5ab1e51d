#include <cmath>
#include <functional>
#include <string>

#include "doctest.h"
#include "superlap/config.hpp"
#include "superlap/error.hpp"

using namespace superlap;

namespace {
std::string message_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}
const char* kBase = "[domain]\ndim = 1\nn = 32\n[measure]\npreset = C1\n[problem]\np = 2\n";
}  // namespace

TEST_SUITE("config") {
  TEST_CASE("parses sections, comments and lists") {
    const auto f = ConfigFile::parse("# top\n[domain]\ndim = 2 ; trailing\nbox = 0 1 0 2\n[problem]\np = 1.5\n");
    CHECK(f.integer("domain.dim", 0) == 2);
    CHECK(f.list("domain.box", {}) == std::vector<double>{0, 1, 0, 2});
    CHECK(f.num("problem.p", 0) == 1.5);
    CHECK(f.num("problem.lambda", 7.0) == 7.0);
  }

  TEST_CASE("errors carry the line number") {
    const auto unknown = message_of([] { ConfigFile::parse("[domain]\ndim = 1\nbogus = 3\n", "x.ini"); });
    CHECK(unknown.find("x.ini:3") != std::string::npos);
    const auto dup = message_of([] { ConfigFile::parse("[domain]\ndim = 1\ndim = 2\n", "y.ini"); });
    CHECK(dup.find("y.ini:3") != std::string::npos);
    const auto section = message_of([] { ConfigFile::parse("[nowhere]\n", "z.ini"); });
    CHECK(section.find("z.ini:1") != std::string::npos);
    const auto bad_num = message_of([] {
      interpret(ConfigFile::parse("[domain]\ndim = 1\nn = many\n", "w.ini"));
    });
    CHECK(bad_num.find("w.ini:3") != std::string::npos);
    CHECK(bad_num.find("domain.n") != std::string::npos);
  }

  TEST_CASE("overrides replace scalars only") {
    auto f = ConfigFile::parse(kBase);
    f.set("problem.p=3");
    CHECK(f.num("problem.p", 0) == 3.0);
    f.set("problem.lambda=auto: 0.5*lambda1");
    CHECK_THROWS_AS(f.set("domain.box=0 1"), Error);
    CHECK_THROWS_AS(f.set("domain.nope=1"), Error);
    CHECK_THROWS_AS(f.set("no_equals"), Error);
  }

  TEST_CASE("lambda forms") {
    CHECK(parse_lambda("2.5").value == 2.5);
    CHECK_FALSE(parse_lambda("2.5").factor_of_lambda1.has_value());
    const auto a = parse_lambda("auto: 0.9*lambda1");
    REQUIRE(a.factor_of_lambda1.has_value());
    CHECK(*a.factor_of_lambda1 == doctest::Approx(0.9));
    CHECK_THROWS_AS(parse_lambda("auto: 0.9*lambda2"), Error);
    CHECK_THROWS_AS(parse_lambda("fast"), Error);
  }

  TEST_CASE("C5 preset gives gamma = alpha") {
    auto f = ConfigFile::parse(kBase);
    f.set("measure.preset=C5");
    f.set("measure.s=0.25");
    f.set("measure.alpha=0.3");
    const auto m = interpret(f).measure();
    CHECK(m.gamma == doctest::Approx(0.3));
    CHECK(m.s_sharp == 1.0);
  }

  TEST_CASE("series presets") {
    auto f = ConfigFile::parse(kBase);
    f.set("measure.preset=serie1");
    f.set("measure.K=6");
    const auto m1 = interpret(f).measure();
    CHECK(m1.atoms.size() == 6);
    CHECK(m1.tail_mass == doctest::Approx(std::ldexp(1.0, -6)).epsilon(1e-12));
    f.set("measure.preset=serie2");
    const auto m2 = interpret(f).measure();
    CHECK(m2.minus_count() == 3);
    CHECK(m2.gamma > 0.0);
  }

  TEST_CASE("function preset has a jump at s_sharp") {
    auto f = ConfigFile::parse(kBase);
    f.set("measure.preset=function");
    f.set("measure.s_sharp=0.4");
    f.set("measure.gamma=0.2");
    const auto m = interpret(f).measure();
    CHECK(m.s_sharp == doctest::Approx(0.4));
    CHECK(m.gamma == doctest::Approx(0.2).epsilon(1e-12));
  }

  TEST_CASE("domain masks") {
    auto f = ConfigFile::parse("[domain]\ndim = 2\nbox = -1 1 -1 1\nn = 20\nmask = disk 0 0 1\n");
    const auto rc = interpret(f);
    CHECK(rc.domain().n() < 400);
    auto g = ConfigFile::parse("[domain]\ndim = 2\nmask = hexagon 1\n", "m.ini");
    CHECK(message_of([&] { interpret(g); }).find("m.ini:3") != std::string::npos);
  }

  TEST_CASE("unknown preset is a config error with its line") {
    const auto rc = interpret(ConfigFile::parse("[measure]\npreset = C9\n", "p.ini"));
    const auto msg = message_of([&] { rc.measure(); });
    CHECK(msg.find("p.ini:2") != std::string::npos);
  }
}
