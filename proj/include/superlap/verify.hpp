#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "superlap/operators.hpp"

namespace superlap {

struct ScanRow {
  int id = 0;
  std::uint64_t inputs_hash = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
};

struct ScanReport {
  std::string name;
  int samples = 0;
  double worst_ratio = 0.0;
  double bound = 0.0;
  int violations = 0;
  bool asserted = true;  // false for report-only diagnostics
  std::string details;   // CSV path once written
  std::vector<ScanRow> rows;
  std::map<std::string, double> extra;  // named diagnostics (c0, eta, C_star, ...)

  bool passed() const { return !asserted || violations == 0; }
  void add(const ScanRow& row);
  /// Writes sample id, inputs hash, LHS, RHS, ratio and records the path.
  void write_csv(const std::filesystem::path& path);
};

/// FNV-1a over the raw bytes of a grid function.
std::uint64_t hash_values(const GridFunction& u);

/// Random sample functions cycling through smooth, rough and bump shapes.
GridFunction sample_function(const Domain& d, int k, std::uint64_t seed);

/// max ||u||_p / [u]_{s,p} over samples and orders; asserts finiteness.
ScanReport embedding_scan(const Domain& d, double p, const std::vector<double>& s_grid, int n_samples,
                          std::uint64_t seed);

/// max [u]_{s,p} / [u]_{S,p} for each pair s <= S; asserts finiteness.
ScanReport monotonicity_scan(const Domain& d, double p, const std::vector<std::pair<double, double>>& pairs,
                             int n_samples, std::uint64_t seed);

/// Ratio of the mu- part to gamma times the mu+ part on [s_bar,1]; reports c0 and eta.
ScanReport reabsorption_check(const Problem& prob, int n_samples, std::uint64_t seed);

/// Modulus of convexity of rho_p: delta(eps) from the Clarkson-type bounds.
double convexity_delta(double p, double eps);

/// rho(u+v) <= 2 - delta(eps) over pairs with rho(u) = rho(v) = 1, rho(u-v) >= eps.
ScanReport convexity_modulus(const Problem& prob, double eps, int n_samples, std::uint64_t seed);

struct BrezisLiebReport {
  ScanReport plus;
  ScanReport minus;
};

/// u fixed bump, u_n = u + w_n with w_n a hat of the given half-widths (in
/// cells) and fixed amplitude at an off-center cell.
BrezisLiebReport brezis_lieb_check(const Problem& prob, const std::vector<int>& widths, double amplitude = 1.0,
                                   double location = 0.2);

struct ScalarReport {
  ScanReport plas;      // |a+b|^p + |a-b|^p <= 2^{p-1}(|a|^p + |b|^p), p >= 2
  ScanReport lipschitz; // ||a|^{p-2}a - |b|^{p-2}b| <= (p-1)(|a|^{p-2} + |b|^{p-2})|a-b|, p > 2
  ScanReport holder;    // ||a|^{p-2}a - |b|^{p-2}b| <= C* |a-b|^{p-1}, 1 < p < 2
  double c_star = 0.0;
  double phi_at_large_pos = 0.0;
  double phi_at_large_neg = 0.0;
  double phi_at_small = 0.0;
};

/// phi(t) = ||1+t|^{p-2}(1+t) - 1| / |t|^{p-1}.
double phi_ratio(double p, double t);

ScalarReport scalar_inequalities(int n_samples, std::uint64_t seed, double p_high = 3.0, double p_low = 1.5);

/// |[u]_{s,p} - ||u||_p| / ||u||_p at s = 1e-3 (asserted <= 5% at p = 2), plus the
/// trend toward [u]_{1,p} at s in {0.9, 0.99, 0.999} (reported).
ScanReport limit_consistency(const Domain& d, double p, const GridFunction& u);

/// <A_p u, u> = rho_p(u)^p to 1e-12 relative.
ScanReport identity_scan(const Problem& prob, int n_samples, std::uint64_t seed);

/// |<A_p u,v>| <= rho(u)^{p-1} rho(v), with the v = 2u equality case, and the
/// Hölder bound for B_p; the L_p bound is included when mu- is present.
struct PairingReport {
  ScanReport a_bound;
  ScanReport b_bound;
  ScanReport l_bound;
  double equality_error = 0.0;
};
PairingReport pairing_bounds(const Problem& prob, int n_samples, std::uint64_t seed);

/// Residual against central differences of the energy over functions whose
/// values and pairwise gaps stay away from zero.
ScanReport gradient_check(const Problem& prob, int n_samples, double eps, double tol, std::uint64_t seed);

struct FReport {
  ScanReport f1;  // F(tu)/rho(tu)^p decreasing to 0 as t -> 0
  ScanReport f2;  // F(u) >= (beta/q)(p J_p(u))^{q/p}
};
FReport f_checks(const Problem& prob, int n_samples, std::uint64_t seed);

}  // namespace superlap
