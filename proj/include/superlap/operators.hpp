#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "superlap/grid.hpp"
#include "superlap/kernel.hpp"
#include "superlap/measure.hpp"

namespace superlap {

/// Discrete critical problem A_{mu,p} u = lambda |u|^{p-2}u + |u|^{p*-2}u on a domain.
struct Problem {
  Domain domain;
  ValidatedMeasure measure;
  std::vector<std::shared_ptr<const KernelTable>> tables;  // one per measure atom
  double p = 2.0;
  double lambda = 0.0;
  std::optional<double> p_star;  // absent unless N > s_sharp p

  /// Builds tables through the global cache.
  static Problem build(const Domain& d, const ValidatedMeasure& m, double p, double lambda = 0.0);

  Problem with_lambda(double lambda) const;
  /// Same domain and p with atom weights of one sign multiplied by a factor.
  Problem scaled(double plus_factor, double minus_factor) const;

  /// Critical exponent; throws CriticalExponent when N <= s_sharp p.
  double critical_exponent() const;
  int n() const { return domain.n(); }
};

struct EnergyBreakdown {
  double rho_pow = 0.0;    // rho_p(u)^p
  double minus_pow = 0.0;  // mu- weighted seminorm powers
  double lp_pow = 0.0;     // ||u||_p^p
  double crit_pow = 0.0;   // ||u||_{p*}^{p*}
  double total = 0.0;
};

double rho_pow(const GridFunction& u, const Problem& prob);
double rho_p(const GridFunction& u, const Problem& prob);
double minus_pow(const GridFunction& u, const Problem& prob);

/// Dual vectors: component i is the pairing against the i-th cell indicator.
GridFunction dual_Ap(const GridFunction& u, const Problem& prob);
GridFunction dual_Lp(const GridFunction& u, const Problem& prob);
GridFunction dual_Bp(const GridFunction& u, const Problem& prob);
GridFunction dual_f(const GridFunction& u, const Problem& prob);

double pairing_Ap(const GridFunction& u, const GridFunction& v, const Problem& prob);
double pairing_Lp(const GridFunction& u, const GridFunction& v, const Problem& prob);
double pairing_Bp(const GridFunction& u, const GridFunction& v, const Problem& prob);
double pairing_f(const GridFunction& u, const GridFunction& v, const Problem& prob);

/// N_p(u) = (1/p) <L_p u, u>.
double potential_N(const GridFunction& u, const Problem& prob);
/// F(u) = ||u||_{p*}^{p*} / p*.
double potential_F(const GridFunction& u, const Problem& prob);

EnergyBreakdown energy(const GridFunction& u, const Problem& prob);
/// Gradient of the energy in cell-indicator coordinates.
GridFunction residual(const GridFunction& u, const Problem& prob);
/// Residual rebuilt from freshly assembled tables with plain loops, for
/// a-posteriori checks independent of the cache and the fast paths.
GridFunction residual_reference(const GridFunction& u, const Problem& prob);

/// (sum |r_i / h^N|^{p'} h^N)^{1/p'}.
double dual_norm(const GridFunction& r, const Domain& d, double p);

/// Matrix of the p = 2 quadratic form built from the mu+ tables; SPD.
Eigen::MatrixXd linearized_form(const Problem& prob);

}  // namespace superlap
