#include <cmath>

#include "doctest.h"
#include "superlap/error.hpp"
#include "superlap/operators.hpp"

using namespace superlap;

namespace {
Problem make(const Domain& d, std::vector<MeasureAtom> atoms, double s_bar, double p, double lambda = 0.0) {
  return Problem::build(d, validate(SpectralMeasure::from_signed(atoms), s_bar), p, lambda);
}
}  // namespace

TEST_SUITE("operators") {
  TEST_CASE("<A_p u, u> equals rho_p(u)^p") {
    const auto d = Domain::square(0.0, 1.0, 6);
    for (double p : {1.5, 2.0, 3.0}) {
      const auto prob = make(d, {{1.0, 1.0}, {0.6, 0.5}, {0.0, 0.2}, {0.3, -0.05}}, 0.5, p);
      for (std::uint64_t seed : {1, 2, 3}) {
        const GridFunction u = test_function(TestKind::RandomRough, d, seed);
        CHECK(pairing_Ap(u, u, prob) == doctest::Approx(rho_pow(u, prob)).epsilon(1e-12));
        CHECK(pairing_Bp(u, u, prob) == doctest::Approx(lp_norm_pow(u, d, p)).epsilon(1e-12));
        CHECK(pairing_Lp(u, u, prob) == doctest::Approx(p * potential_N(u, prob)).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("operators are odd and energies even") {
    const auto d = Domain::interval(0.0, 1.0, 20);
    const auto prob = make(d, {{0.4, 1.0}, {0.2, -0.1}}, 0.3, 1.7, 0.4);
    const GridFunction u = test_function(TestKind::RandomSmooth, d, 4);
    CHECK((dual_Ap(-u, prob) + dual_Ap(u, prob)).norm() <= 1e-14 * dual_Ap(u, prob).norm());
    CHECK((dual_f(-u, prob) + dual_f(u, prob)).norm() <= 1e-14 * dual_f(u, prob).norm());
    CHECK(energy(-u, prob).total == doctest::Approx(energy(u, prob).total).epsilon(1e-14));
  }

  TEST_CASE("hand-expanded three-cell energy") {
    const auto d = Domain::interval(0.0, 1.0, 3);
    const double p = 1.5, s = 0.5, sp = s * p, lambda = 0.3, h = 1.0 / 3.0;
    const auto prob = make(d, {{s, 1.0}}, 0.5, p, lambda);
    GridFunction u(3);
    u << 1.0, 2.0, 0.0;
    const double c = normalizing_constant(1, s, p);
    auto w = [&](double dist) { return h * h / std::pow(dist, 1.0 + sp); };
    auto tail = [&](double x) { return (std::pow(x, -sp) + std::pow(1.0 - x, -sp)) / sp; };
    const double pairs = w(h) * std::pow(1.0, p) + w(2 * h) * std::pow(1.0, p) + w(h) * std::pow(2.0, p);
    const double ext = h * (tail(h / 2) * 1.0 + tail(0.5) * std::pow(2.0, p));
    const double rho = c * 2.0 * (pairs + ext);
    const double lp = h * (1.0 + std::pow(2.0, p));
    const double q = 1.0 * p / (1.0 - sp);
    const double crit = h * (1.0 + std::pow(2.0, q));
    const double expected = rho / p - lambda * lp / p - crit / q;

    const auto e = energy(u, prob);
    CHECK(e.rho_pow == doctest::Approx(rho).epsilon(1e-14));
    CHECK(e.crit_pow == doctest::Approx(crit).epsilon(1e-14));
    CHECK(e.total == doctest::Approx(expected).epsilon(1e-13));
    CHECK(prob.critical_exponent() == doctest::Approx(6.0));
  }

  TEST_CASE("doubling an atom scales rho_p by 2^{1/p}") {
    const auto d = Domain::interval(0.0, 1.0, 16);
    const GridFunction u = test_function(TestKind::Bump, d, 0);
    for (double p : {1.5, 2.0, 3.0}) {
      const double one = rho_p(u, make(d, {{0.5, 1.0}}, 0.5, p));
      const double two = rho_p(u, make(d, {{0.5, 1.0}, {0.5, 1.0}}, 0.5, p));
      CHECK(two / one == doctest::Approx(std::pow(2.0, 1.0 / p)).epsilon(1e-14));
    }
  }

  TEST_CASE("L_p is homogeneous of degree p-1") {
    const auto d = Domain::square(0.0, 1.0, 5);
    const double p = 2.5;
    const auto prob = make(d, {{1.0, 1.0}, {0.25, -0.2}}, 0.5, p);
    const GridFunction u = test_function(TestKind::RandomRough, d, 8);
    const GridFunction v = test_function(TestKind::RandomSmooth, d, 9);
    for (double t : {-3.0, 0.5, 4.0}) {
      const double expected = std::copysign(std::pow(std::abs(t), p - 1.0), t) * pairing_Lp(u, v, prob);
      CHECK(pairing_Lp(t * u, v, prob) == doctest::Approx(expected).epsilon(1e-12));
    }
  }

  TEST_CASE("residual matches finite differences and the reference rebuild") {
    const auto d = Domain::square(0.0, 1.0, 5);
    const auto prob = make(d, {{1.0, 1.0}, {0.5, 0.5}, {0.2, -0.1}}, 0.5, 1.8, 2.0);
    const GridFunction u = test_function(TestKind::RandomSmooth, d, 12);
    const GridFunction r = residual(u, prob);
    const GridFunction ref = residual_reference(u, prob);
    CHECK((r - ref).norm() <= 1e-12 * r.norm());
    const double eps = 1e-6;
    for (int i : {0, 6, 12, 24}) {
      GridFunction up = u, um = u;
      up[i] += eps;
      um[i] -= eps;
      const double fd = (energy(up, prob).total - energy(um, prob).total) / (2 * eps);
      CHECK(r[i] == doctest::Approx(fd).epsilon(1e-6));
    }
  }

  TEST_CASE("dual norm of a cell-indicator pairing") {
    const auto d = Domain::interval(0.0, 1.0, 4);
    // r_i = h g_i for constant g = 1 gives ||g||_{p'} = 1 on a unit interval.
    const GridFunction r = GridFunction::Constant(4, d.h());
    CHECK(dual_norm(r, d, 3.0) == doctest::Approx(1.0).epsilon(1e-14));
  }

  TEST_CASE("linearized form reproduces the p = 2 energy and is SPD") {
    const auto d = Domain::square(0.0, 1.0, 5);
    const auto prob = make(d, {{1.0, 1.0}, {0.5, 0.5}, {0.0, 0.1}}, 0.5, 2.0);
    const Eigen::MatrixXd k = linearized_form(prob);
    const GridFunction u = test_function(TestKind::RandomRough, d, 1);
    CHECK(u.dot(k * u) == doctest::Approx(rho_pow(u, prob)).epsilon(1e-12));
    CHECK(k.llt().info() == Eigen::Success);
  }

  TEST_CASE("critical exponent requires N > s_sharp p") {
    const auto d = Domain::interval(0.0, 1.0, 8);
    CHECK_THROWS_AS(make(d, {{1.0, 1.0}}, 1.0, 1.5).critical_exponent(), Error);
    CHECK(make(d, {{0.5, 1.0}}, 0.5, 1.5).p_star.has_value());
  }

  TEST_CASE("scaled problems multiply the atom weights") {
    const auto d = Domain::interval(0.0, 1.0, 10);
    const auto prob = make(d, {{0.8, 1.0}, {0.2, -0.1}}, 0.5, 2.0);
    const auto sc = prob.scaled(3.0, 0.5);
    const GridFunction u = test_function(TestKind::Bump, d, 0);
    CHECK(rho_pow(u, sc) == doctest::Approx(3.0 * rho_pow(u, prob)));
    CHECK(minus_pow(u, sc) == doctest::Approx(0.5 * minus_pow(u, prob)));
  }
}
