#include <cmath>

#include "doctest.h"
#include "superlap/grid.hpp"

using namespace superlap;

TEST_SUITE("grid") {
  TEST_CASE("interval and square cell counts and volumes") {
    const auto d1 = Domain::interval(0.0, 1.0, 10);
    CHECK(d1.n() == 10);
    CHECK(d1.h() == doctest::Approx(0.1));
    CHECK(volume(d1) == doctest::Approx(1.0));
    const auto d2 = Domain::square(-1.0, 1.0, 8);
    CHECK(d2.n() == 64);
    CHECK(d2.volume() == doctest::Approx(4.0));
  }

  TEST_CASE("disk mask keeps the cells whose centers are inside") {
    MaskSpec m;
    m.kind = MaskKind::Disk;
    m.params = {0.0, 0.0, 1.0, 0.0};
    const Domain d(2, {-1.0, 1.0, -1.0, 1.0}, 2.0 / 40, m);
    CHECK(d.n() < 40 * 40);
    CHECK(d.volume() == doctest::Approx(M_PI).epsilon(0.02));
    for (int i = 0; i < d.n(); ++i) {
      const auto c = d.center(i);
      CHECK(c[0] * c[0] + c[1] * c[1] < 1.0);
    }
    CHECK(d.mask_hash() != Domain::square(-1.0, 1.0, 40).mask_hash());
  }

  TEST_CASE("Lp norm of a constant") {
    const auto d = Domain::square(0.0, 2.0, 6);
    const GridFunction u = GridFunction::Constant(d.n(), 3.0);
    CHECK(lp_norm(u, d, 2.0) == doctest::Approx(6.0));
    CHECK(lp_norm_pow(u, d, 1.5) == doctest::Approx(4.0 * std::pow(3.0, 1.5)));
  }

  TEST_CASE("forward-difference gradient of a hat") {
    const int n = 16;
    const auto d = Domain::interval(0.0, 1.0, n);
    GridFunction u(n);
    for (int i = 0; i < n; ++i) {
      const double x = d.center(i)[0];
      u[i] = std::min(x, 1.0 - x);
    }
    // n-2 unit slopes, one flat pair at the peak, half slopes at both ghosts.
    for (double p : {1.5, 2.0, 3.0}) {
      const double expected = d.h() * ((n - 2) + 2.0 * std::pow(0.5, p));
      CHECK(grad_seminorm_pow(u, d, p) == doctest::Approx(expected).epsilon(1e-13));
    }
  }

  TEST_CASE("gradient dual is the derivative of the seminorm") {
    const auto d = Domain::square(0.0, 1.0, 5);
    const GridFunction u = test_function(TestKind::RandomSmooth, d, 3);
    const double p = 1.7;
    const GridFunction a = grad_seminorm_dual(u, d, p);
    const double eps = 1e-6;
    for (int i : {0, 7, 12, 24}) {
      GridFunction up = u, um = u;
      up[i] += eps;
      um[i] -= eps;
      const double fd = (grad_seminorm_pow(up, d, p) - grad_seminorm_pow(um, d, p)) / (2 * eps * p);
      CHECK(a[i] == doctest::Approx(fd).epsilon(1e-6));
    }
  }

  TEST_CASE("test functions are deterministic per seed") {
    const auto d = Domain::square(0.0, 1.0, 8);
    for (auto k : {TestKind::Bump, TestKind::EigenGuess, TestKind::RandomSmooth, TestKind::RandomRough}) {
      const auto a = test_function(k, d, 42);
      const auto b = test_function(k, d, 42);
      CHECK(a == b);
      CHECK(a.norm() > 0.0);
    }
    CHECK(test_function(TestKind::RandomRough, d, 1) != test_function(TestKind::RandomRough, d, 2));
    CHECK(parse_test_kind("eigen-guess") == TestKind::EigenGuess);
  }
}
