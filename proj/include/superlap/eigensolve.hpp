#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "superlap/operators.hpp"
#include "superlap/optim.hpp"

namespace superlap {

struct EigenOptions {
  int max_iter = 5000;
  double tol = 1e-9;  // dual norm of A_p u - lambda B_p u at ||u||_p = 1
  std::uint64_t seed = 1;
};

struct EigenReport {
  double lambda1 = 0.0;
  GridFunction u1;  // ||u1||_p = 1, positive
  int iterations = 0;
  std::vector<IterRecord> rayleigh_history;
  bool converged = false;
  double residual_norm = 0.0;
};

/// R(u) = rho_p(u)^p / ||u||_p^p.
double rayleigh(const GridFunction& u, const Problem& prob);

/// Minimizes R from a positive bump; mu- and the critical term are ignored.
EigenReport lambda1(const Problem& prob, const EigenOptions& opt = {});

struct Lambda2Estimate {
  double value = 0.0;
  double best_cut = 0.0;  // fraction along the split axis
  int best_axis = 0;
  bool heuristic = true;
};

/// Heuristic second eigenvalue: for each axis-aligned cut, first eigenfunctions
/// on the two sides span a sign-changing family; take the maximum of R over
/// that family and minimize over cuts.
Lambda2Estimate lambda2_estimate(const Problem& prob, const EigenOptions& opt = {});

struct SobolevReport {
  double value = 0.0;
  GridFunction u;
  std::vector<double> starts;  // value reached from each start
};

/// min rho_p(u)^p / ||u||_{p*}^p over functions supported in the domain; five starts.
SobolevReport sobolev_constant(const Problem& prob, const EigenOptions& opt = {});

struct ThresholdReport {
  int l = 1;
  double lambda_l = 0.0;
  double lambda = 0.0;
  double sobolev = 0.0;
  double c_star = 0.0;
  double theta0 = 0.0;
  double window_lo = 0.0;
  double window_hi = 0.0;
  double gamma_diag = 0.0;
  bool in_window = false;
  bool theta0_valid = false;  // theta0 in (0,1)
};

ThresholdReport thresholds(const Problem& prob, int l, double lambda_l, double sobolev);

/// Closed-form peak bound (1/p - 1/q) ((lambda_l - lambda) / beta^{p/q})^{q/(q-p)}
/// with q = p* and beta = |Omega|^{-(p*-p)/p}.
double peak_bound(const Problem& prob, double lambda_l);

}  // namespace superlap
