#pragma once

#include <cstdint>
#include <vector>

#include "superlap/eigensolve.hpp"
#include "superlap/operators.hpp"

namespace superlap {

struct PsRecord {
  int iter = 0;
  double energy = 0.0;
  double residual_norm = 0.0;
  double step = 0.0;
};

struct SolveOptions {
  double tol = 1e-6;
  int max_iter = 5000;
  int polish = 10;  // iterations kept after the tolerance is first met
  double perturbation = 0.05;
  std::uint64_t seed = 1;
  int eta_samples = 100;
};

struct SolveReport {
  GridFunction u;
  double energy = 0.0;
  double residual_norm = 0.0;
  int iterations = 0;
  std::vector<PsRecord> ps_trace;
  bool converged = false;
  bool nontrivial = false;
  bool below_cstar = false;
  double c_star = 0.0;
};

struct MountainPass {
  GridFunction direction;  // rho_p(direction) = 1
  double R = 0.0;
  double t_peak = 0.0;
  double E_peak = 0.0;
};

/// Doubles R until E(R dir) <= 0, then maximizes t -> E(t R dir) on [0,1].
MountainPass mountain_pass_path(const Problem& prob, const GridFunction& direction);

/// Critical-point search from u0. When the quadratic part of E is positive at
/// u0 the iterates stay on the Nehari set {<dE(u),u> = 0}, where E reduces to
/// an increasing function of a scale-invariant quotient minimized by L-BFGS;
/// otherwise plain Armijo descent on E is used.
SolveReport descend(const Problem& prob, const GridFunction& u0, double c_star, const SolveOptions& opt = {});

struct PairReport {
  SolveReport plus;
  SolveReport minus;
  EigenReport eigen;
  SobolevReport sobolev;
  ThresholdReport thresholds;
  MountainPass path;
  double peak_bound = 0.0;
  double eta = 0.0;
  bool reliable = true;     // measured eta < 1
  bool pair_ok = false;     // both residuals within tol and equal energies
  bool peak_ok = false;     // E_peak <= peak_bound + 1e-8
  bool diverged = false;
};

/// sup over sample functions of p N_p(u) / rho_p(u)^p.
double measure_eta(const Problem& prob, int samples, std::uint64_t seed);

PairReport find_pair(const Problem& prob, const SolveOptions& opt = {});
/// Same, reusing a first eigenpair and Sobolev estimate (both independent of lambda).
PairReport find_pair(const Problem& prob, const EigenReport& eigen, const SobolevReport& sobolev,
                     const SolveOptions& opt = {});

}  // namespace superlap
