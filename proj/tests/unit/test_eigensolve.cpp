#include <cmath>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "superlap/eigensolve.hpp"

using namespace superlap;

namespace {
Problem make(const Domain& d, std::vector<MeasureAtom> atoms, double s_bar, double p, double lambda = 0.0) {
  return Problem::build(d, validate(SpectralMeasure::from_signed(atoms), s_bar), p, lambda);
}
double dense_lambda1(const Problem& prob) {
  const Eigen::MatrixXd k = linearized_form(prob);
  const Eigen::MatrixXd b = prob.domain.cell_volume() * Eigen::MatrixXd::Identity(prob.n(), prob.n());
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(k, b);
  return es.eigenvalues()[0];
}
}  // namespace

TEST_SUITE("eigensolve") {
  TEST_CASE("p = 2 agrees with the dense generalized eigenproblem") {
    const auto prob = make(Domain::interval(0.0, 1.0, 24), {{0.5, 1.0}, {1.0, 0.3}}, 0.5, 2.0);
    const auto rep = lambda1(prob);
    CHECK(rep.converged);
    CHECK(rep.lambda1 == doctest::Approx(dense_lambda1(prob)).epsilon(1e-8));
    CHECK(lp_norm(rep.u1, prob.domain, 2.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rep.u1.minCoeff() > 0.0);
  }

  TEST_CASE("tripling mu+ triples lambda1") {
    const auto prob = make(Domain::square(0.0, 1.0, 8), {{0.6, 1.0}}, 0.5, 1.6);
    const double base = lambda1(prob).lambda1;
    const double tripled = lambda1(prob.scaled(3.0, 1.0)).lambda1;
    CHECK(tripled == doctest::Approx(3.0 * base).epsilon(1e-6));
  }

  TEST_CASE("Rayleigh quotient is scale invariant and bounded below by lambda1") {
    const auto prob = make(Domain::interval(0.0, 1.0, 32), {{0.7, 1.0}}, 0.5, 2.5);
    const auto rep = lambda1(prob);
    for (std::uint64_t seed : {1, 2, 3}) {
      const GridFunction u = test_function(TestKind::RandomRough, prob.domain, seed);
      CHECK(rayleigh(7.0 * u, prob) == doctest::Approx(rayleigh(u, prob)).epsilon(1e-12));
      CHECK(rayleigh(u, prob) >= rep.lambda1 * (1 - 1e-9));
    }
  }

  TEST_CASE("lambda2 estimate lies above lambda1") {
    const auto prob = make(Domain::square(0.0, 1.0, 10), {{1.0, 1.0}}, 1.0, 1.5);
    const auto l1 = lambda1(prob).lambda1;
    const auto l2 = lambda2_estimate(prob);
    CHECK(l2.value > l1);
    CHECK(l2.heuristic);
  }

  TEST_CASE("Sobolev quotient is scale invariant and doubles with mu+") {
    const auto prob = make(Domain::square(0.0, 1.0, 8), {{1.0, 1.0}}, 1.0, 1.5);
    const auto rep = sobolev_constant(prob);
    REQUIRE(rep.starts.size() == 5);
    const double q = prob.critical_exponent();
    auto quotient = [&](const GridFunction& u) {
      return rho_pow(u, prob) / std::pow(lp_norm(u, prob.domain, q), prob.p);
    };
    CHECK(quotient(rep.u) == doctest::Approx(rep.value).epsilon(1e-9));
    CHECK(quotient(4.0 * rep.u) == doctest::Approx(rep.value).epsilon(1e-12));
    for (double v : rep.starts) CHECK(v >= rep.value * (1 - 1e-12));
    const auto doubled = sobolev_constant(prob.scaled(2.0, 1.0));
    CHECK(doubled.value == doctest::Approx(2.0 * rep.value).epsilon(1e-5));
  }

  TEST_CASE("theta0 runs from 0 at the window edge to 1/2 at lambda_l") {
    const auto base = make(Domain::square(0.0, 1.0, 8), {{1.0, 1.0}}, 1.0, 1.5);
    const double l1 = 10.0, sob = 3.0;
    const auto probe = thresholds(base, 1, l1, sob);
    const auto lo = thresholds(base.with_lambda(probe.window_lo), 1, l1, sob);
    CHECK(lo.theta0 == doctest::Approx(0.0).epsilon(1e-12));
    const auto hi = thresholds(base.with_lambda(l1), 1, l1, sob);
    CHECK(hi.theta0 == doctest::Approx(0.5).epsilon(1e-12));
    const auto mid = thresholds(base.with_lambda(0.5 * (probe.window_lo + l1)), 1, l1, sob);
    CHECK(mid.in_window);
    CHECK(mid.theta0 == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(mid.c_star > 0.0);
    CHECK_FALSE(thresholds(base.with_lambda(l1 + 1.0), 1, l1, sob).in_window);
  }

  TEST_CASE("peak bound vanishes outside the gap") {
    const auto prob = make(Domain::square(0.0, 1.0, 6), {{1.0, 1.0}}, 1.0, 1.5, 5.0);
    CHECK(peak_bound(prob, 4.0) == 0.0);
    CHECK(peak_bound(prob, 6.0) > 0.0);
  }
}
