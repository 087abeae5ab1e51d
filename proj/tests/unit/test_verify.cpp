#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "superlap/verify.hpp"

using namespace superlap;

namespace {
Problem make(const Domain& d, std::vector<MeasureAtom> atoms, double s_bar, double p) {
  return Problem::build(d, validate(SpectralMeasure::from_signed(atoms), s_bar), p);
}
}  // namespace

TEST_SUITE("verify") {
  TEST_CASE("scan report bookkeeping") {
    ScanReport r;
    r.name = "demo";
    r.bound = 1.0;
    r.add({0, 11, 0.5, 1.0, 0.5});
    r.add({1, 12, 2.0, 1.0, 2.0});
    CHECK(r.samples == 2);
    CHECK(r.worst_ratio == 2.0);
    CHECK(r.violations == 0);
    CHECK(r.passed());
    r.violations = 1;
    CHECK_FALSE(r.passed());
    r.asserted = false;
    CHECK(r.passed());

    const auto path = std::filesystem::temp_directory_path() / "superlap_scan_demo.csv";
    r.write_csv(path);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "sample_id,inputs_hash,lhs,rhs,ratio");
    CHECK(r.details == path.string());
    std::filesystem::remove(path);
  }

  TEST_CASE("an empty scan passes") {
    ScanReport r;
    CHECK(r.passed());
    CHECK(r.samples == 0);
  }

  TEST_CASE("hash and samples are deterministic") {
    const auto d = Domain::interval(0.0, 1.0, 16);
    const auto a = sample_function(d, 3, 5);
    CHECK(hash_values(a) == hash_values(sample_function(d, 3, 5)));
    CHECK(hash_values(a) != hash_values(sample_function(d, 3, 6)));
  }

  TEST_CASE("convexity modulus bounds") {
    CHECK(convexity_delta(2.0, 0.0) == doctest::Approx(0.0));
    CHECK(convexity_delta(2.0, 1.0) > 0.0);
    CHECK(convexity_delta(3.0, 0.5) < convexity_delta(3.0, 1.0));
    CHECK(convexity_delta(1.5, 0.5) > 0.0);
  }

  TEST_CASE("phi ratio limits") {
    // phi(t) -> 1 as |t| -> infinity.
    CHECK(phi_ratio(1.5, 1e12) == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(phi_ratio(1.5, -1e12) == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(phi_ratio(1.5, 1e-12) < 1e-3);
  }

  TEST_CASE("identity and pairing scans pass on a mixed measure") {
    const auto prob = make(Domain::interval(0.0, 1.0, 24), {{1.0, 1.0}, {0.5, 0.5}, {0.2, -0.05}}, 0.5, 1.7);
    CHECK(identity_scan(prob, 20, 1).passed());
    const auto pb = pairing_bounds(prob, 20, 2);
    CHECK(pb.a_bound.passed());
    CHECK(pb.b_bound.passed());
    CHECK(pb.l_bound.passed());
    CHECK(pb.equality_error <= 1e-10);
  }

  TEST_CASE("reabsorption reports eta below one for a small negative part") {
    const auto prob = make(Domain::interval(0.0, 1.0, 64), {{1.0, 1.0}, {0.25, -0.1}}, 1.0, 2.0);
    const auto r = reabsorption_check(prob, 30, 3);
    CHECK(r.passed());
    CHECK(r.extra.at("eta") < 1.0);
  }

  TEST_CASE("gradient check on a smooth fractional problem") {
    auto prob = make(Domain::square(0.0, 1.0, 6), {{0.6, 1.0}}, 0.5, 1.5);
    prob = prob.with_lambda(1.0);
    const auto r = gradient_check(prob, 5, 1e-6, 1e-5, 4);
    CHECK(r.passed());
  }

  TEST_CASE("scalar inequalities hold") {
    const auto r = scalar_inequalities(2000, 9);
    CHECK(r.plas.passed());
    CHECK(r.lipschitz.passed());
    CHECK(r.holder.passed());
    CHECK(r.c_star > 1.0);
  }

  TEST_CASE("embedding and monotonicity scans stay finite") {
    const auto d = Domain::interval(0.0, 1.0, 32);
    const auto e = embedding_scan(d, 2.0, {0.0, 0.5, 1.0}, 10, 1);
    CHECK(e.passed());
    CHECK(std::isfinite(e.worst_ratio));
    const auto m = monotonicity_scan(d, 1.5, {{0.25, 0.75}, {0.0, 1.0}}, 10, 2);
    CHECK(m.passed());
    CHECK(m.extra.size() == 2);
    CHECK(m.extra.count("C(0.250,0.750)") == 1);
  }

  TEST_CASE("small-order seminorm approaches the L2 norm at p = 2") {
    const auto d = Domain::interval(0.0, 1.0, 64);
    const auto r = limit_consistency(d, 2.0, test_function(TestKind::Bump, d));
    CHECK(r.passed());
    CHECK(r.rows.front().ratio <= 0.05);
    const auto r3 = limit_consistency(d, 3.0, test_function(TestKind::Bump, d));
    CHECK_FALSE(r3.asserted);
    CHECK(r3.passed());
  }

  TEST_CASE("F checks on the unit square") {
    const auto prob = make(Domain::square(0.0, 1.0, 8), {{1.0, 1.0}}, 1.0, 1.5);
    const auto r = f_checks(prob, 10, 3);
    CHECK(r.f1.passed());
    CHECK(r.f2.passed());
  }

  TEST_CASE("convexity scan passes and rejects too-close pairs") {
    const auto prob = make(Domain::interval(0.0, 1.0, 24), {{1.0, 1.0}}, 1.0, 3.0);
    const auto r = convexity_modulus(prob, 0.5, 40, 5);
    CHECK(r.passed());
    CHECK(r.samples == 40);
  }
}
