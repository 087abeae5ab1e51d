#pragma once

#include <functional>
#include <vector>

#include <Eigen/Cholesky>

#include "superlap/grid.hpp"

namespace superlap {

struct IterRecord {
  int iter = 0;
  double value = 0.0;
  double step = 0.0;     // accepted line-search step length
  double measure = 0.0;  // stopping measure, e.g. a residual dual norm
};

/// Value and gradient at u; a non-finite value marks u as infeasible.
using ValueGrad = std::function<double(const GridFunction& u, GridFunction& grad)>;
/// Rescales u in place and returns the factor applied.
using Normalizer = std::function<double(GridFunction& u)>;
/// Convergence measure from (u, value, gradient).
using Measure = std::function<double(const GridFunction& u, double value, const GridFunction& grad)>;

struct QuotientOptions {
  int max_iter = 5000;
  int memory = 10;
  double tol = 1e-9;           // stop once measure <= tol ...
  int polish = 0;              // ... after this many further iterations
  int stall_window = 20;       // stop when the relative decrease over the window
  double stall_rel = 1e-12;    // drops below stall_rel
  double armijo_c = 1e-4;
  double backtrack = 0.5;
  double initial_step = 1.0;
  const Eigen::LLT<Eigen::MatrixXd>* precond = nullptr;
};

struct QuotientResult {
  GridFunction u;
  double value = 0.0;
  double measure = 0.0;
  int iterations = 0;
  bool converged = false;  // measure reached tol or the value stalled
  bool reached_tol = false;
  std::vector<IterRecord> history;
};

/// Preconditioned L-BFGS for a scale-invariant objective. The iterate is
/// renormalized after every accepted step; Armijo backtracking, with an
/// approximate-Wolfe acceptance once value differences hit round-off.
QuotientResult minimize_quotient(const ValueGrad& f, const Normalizer& normalize, const Measure& measure,
                                 GridFunction u0, const QuotientOptions& opt);

}  // namespace superlap
