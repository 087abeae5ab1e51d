#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "superlap/kernel.hpp"

using namespace superlap;

TEST_SUITE("kernel") {
  TEST_CASE("Gamma against the multiprecision oracle") {
    for (double x : {0.1, 0.5, 1.0, 1.5, 2.5, 3.75, 7.0, 12.3}) {
      CAPTURE(x);
      CHECK(gamma_fn(x) == doctest::Approx(oracle::gamma_hp(x)).epsilon(1e-13));
    }
    CHECK(gamma_fn(0.5) == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-14));
    CHECK(gamma_fn(5.0) == doctest::Approx(24.0).epsilon(1e-14));
  }

  TEST_CASE("normalizing constant is positive and matches the closed form") {
    for (int n : {1, 2, 3})
      for (double s : {0.05, 0.25, 0.5, 0.75, 0.95})
        for (double p : {1.5, 2.0, 3.0}) {
          CAPTURE(n);
          CAPTURE(s);
          CAPTURE(p);
          const double c = normalizing_constant(n, s, p);
          CHECK(c > 0.0);
          CHECK(c == doctest::Approx(oracle::normalizing_constant_hp(n, s, p)).epsilon(1e-12));
        }
  }

  TEST_CASE("normalizing constant endpoint asymptotics") {
    // c / s -> Gamma((p+N-2)/2) / (2 pi^{N/2}) as s -> 0.
    const double s0 = 1e-7;
    for (double p : {1.5, 2.0}) {
      const double lim = oracle::gamma_hp((p + 2 - 2) / 2) / (2 * M_PI);
      CHECK(normalizing_constant(2, s0, p) / s0 == doctest::Approx(lim).epsilon(1e-5));
    }
    // c / (1-s) -> 2 Gamma((2p+N-2)/2) / pi^{N/2} as s -> 1.
    const double s1 = 1.0 - 1e-7;
    const double lim = 2.0 * oracle::gamma_hp((4.0 + 1 - 2) / 2) / std::sqrt(M_PI);
    CHECK(normalizing_constant(1, s1, 2.0) / (1 - s1) == doctest::Approx(lim).epsilon(1e-5));
  }

  TEST_CASE("adjacent cells interact with weight h^{1-sp} in 1D") {
    const auto d = Domain::interval(0.0, 1.0, 2);
    for (double s : {0.25, 0.5, 0.75}) {
      const auto t = assemble(d, s, 2.0);
      CHECK(t.W(0, 1) == doctest::Approx(std::pow(0.5, 1 - 2 * s)).epsilon(1e-14));
      CHECK(t.W(0, 0) == 0.0);
    }
  }

  TEST_CASE("1D tail at the midpoint with sp = 1 equals 4") {
    const auto d = Domain::interval(0.0, 1.0, 3);
    const auto t = assemble(d, 0.5, 2.0);
    CHECK(t.tail[1] == doctest::Approx(4.0).epsilon(1e-14));
  }

  TEST_CASE("1D tails against double-exponential quadrature") {
    const auto d = Domain::interval(-1.0, 2.0, 17);
    for (double s : {0.2, 0.6}) {
      const auto t = assemble(d, s, 1.5);
      for (int i : {0, 5, 8, 16}) {
        const double ref = oracle::tail_1d(d.center(i)[0], -1.0, 2.0, s * 1.5);
        CHECK(t.tail[i] == doctest::Approx(ref).epsilon(1e-10));
      }
    }
  }

  TEST_CASE("2D box tails against a polar oracle") {
    const Domain d(2, {0.0, 2.0, 0.0, 1.0}, 0.125);
    for (double s : {0.3, 0.7}) {
      const auto t = assemble(d, s, 2.0);
      for (int i : {0, 9, 40, d.n() - 1}) {
        const auto c = d.center(i);
        const double ref = oracle::tail_box_2d(d.box(), c[0], c[1], 2.0 * s);
        CAPTURE(i);
        CHECK(t.tail[i] == doctest::Approx(ref).epsilon(1e-9));
      }
    }
  }

  TEST_CASE("2D mask holes approximate the tail of the inner box") {
    MaskSpec m;
    m.kind = MaskKind::Rectangle;
    m.params = {0.25, 0.75, 0.25, 0.75};
    const Domain d(2, {0.0, 1.0, 0.0, 1.0}, 1.0 / 16, m);
    REQUIRE(d.n() == 64);
    const auto t = assemble(d, 0.5, 1.5);
    for (int i = 0; i < d.n(); i += 9) {
      const auto c = d.center(i);
      const double ref = oracle::tail_box_2d({0.25, 0.75, 0.25, 0.75}, c[0], c[1], 0.75);
      CAPTURE(i);
      CHECK(t.tail[i] == doctest::Approx(ref).epsilon(5e-3));
    }
  }

  TEST_CASE("kernel matrix is symmetric with matching row sums") {
    const auto d = Domain::square(0.0, 1.0, 6);
    const auto t = assemble(d, 0.4, 1.8);
    CHECK((t.W - t.W.transpose()).norm() == 0.0);
    CHECK((t.W.rowwise().sum() - t.W_rows).norm() < 1e-12 * t.W_rows.norm());
  }

  TEST_CASE("seminorm is absolutely homogeneous of degree one") {
    const auto d = Domain::square(0.0, 1.0, 6);
    const GridFunction u = test_function(TestKind::RandomRough, d, 9);
    for (double s : {0.0, 0.3, 1.0}) {
      const auto t = make_table(d, s, 1.6);
      const double base = seminorm(u, t, d);
      CHECK(seminorm(-2.5 * u, t, d) == doctest::Approx(2.5 * base).epsilon(1e-13));
    }
  }

  TEST_CASE("endpoint tables dispatch to the Lp norm and the gradient") {
    const auto d = Domain::interval(0.0, 1.0, 12);
    const GridFunction u = test_function(TestKind::RandomSmooth, d, 1);
    CHECK(seminorm_pow(u, make_table(d, 0.0, 2.5), d) == doctest::Approx(lp_norm_pow(u, d, 2.5)));
    CHECK(seminorm_pow(u, make_table(d, 1.0, 2.5), d) == doctest::Approx(grad_seminorm_pow(u, d, 2.5)));
  }

  TEST_CASE("dual vector is the scaled derivative of the seminorm power") {
    const auto d = Domain::square(0.0, 1.0, 4);
    const GridFunction u = test_function(TestKind::RandomSmooth, d, 5);
    for (double p : {1.5, 2.0, 3.0}) {
      const auto t = assemble(d, 0.45, p);
      const GridFunction a = seminorm_dual(u, t, d);
      const double eps = 1e-6;
      for (int i : {0, 5, 15}) {
        GridFunction up = u, um = u;
        up[i] += eps;
        um[i] -= eps;
        const double fd = (seminorm_pow(up, t, d) - seminorm_pow(um, t, d)) / (2 * eps * p);
        CHECK(a[i] == doctest::Approx(fd).epsilon(1e-6));
      }
    }
  }

  TEST_CASE("cache returns the shared table for equal keys") {
    auto& cache = KernelCache::global();
    const auto d = Domain::interval(0.0, 1.0, 20);
    const auto a = cache.get(d, 0.5, 2.0);
    const auto b = cache.get(d, 0.5, 2.0);
    CHECK(a.get() == b.get());
    CHECK(cache.get(d, 0.5, 3.0).get() != a.get());
  }
}
