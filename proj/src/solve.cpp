#include "superlap/solve.hpp"

#include <cmath>
#include <limits>

#include "superlap/error.hpp"
#include "superlap/optim.hpp"
#include "superlap/rng.hpp"

namespace superlap {

namespace {

double energy_along(const Problem& prob, const GridFunction& dir, double t) {
  return energy(t * dir, prob).total;
}

}  // namespace

MountainPass mountain_pass_path(const Problem& prob, const GridFunction& direction) {
  const double rho = rho_p(direction, prob);
  require(rho > 0.0, ErrorCode::InvalidArgument, "mountain-pass direction must be nonzero");
  MountainPass mp;
  mp.direction = direction / rho;
  double R = 1.0;
  int doublings = 0;
  while (energy_along(prob, mp.direction, R) > 0.0) {
    R *= 2.0;
    if (++doublings > 80)
      throw Error(ErrorCode::NoCrossing, "energy stays positive along the ray; no mountain-pass crossing");
  }
  mp.R = R;
  // Golden-section maximization of t -> E(t R dir) on [0,1].
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = 0.0, b = 1.0;
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = energy_along(prob, mp.direction, x1 * R), f2 = energy_along(prob, mp.direction, x2 * R);
  while (b - a > 1e-12) {
    if (f1 > f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = energy_along(prob, mp.direction, x1 * R);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = energy_along(prob, mp.direction, x2 * R);
    }
  }
  mp.t_peak = 0.5 * (a + b);
  mp.E_peak = energy_along(prob, mp.direction, mp.t_peak * R);
  return mp;
}

namespace {

void finish(SolveReport& rep, const Problem& prob, const SolveOptions& opt, double c_star) {
  const auto e = energy(rep.u, prob);
  rep.energy = e.total;
  rep.residual_norm = dual_norm(residual(rep.u, prob), prob.domain, prob.p);
  rep.converged = rep.residual_norm <= opt.tol;
  rep.nontrivial = lp_norm(rep.u, prob.domain, prob.p) > opt.tol;
  rep.c_star = c_star;
  rep.below_cstar = rep.energy > 0.0 && rep.energy < c_star;
}

SolveReport plain_descent(const Problem& prob, const GridFunction& u0, double c_star, const SolveOptions& opt) {
  SolveReport rep;
  GridFunction u = u0;
  double E = energy(u, prob).total;
  double last_step = 0.0;
  for (int it = 0;; ++it) {
    const GridFunction r = residual(u, prob);
    const double rn = dual_norm(r, prob.domain, prob.p);
    rep.ps_trace.push_back({it, E, rn, last_step});
    rep.iterations = it;
    if (rn <= opt.tol || it >= opt.max_iter) break;
    // Steepest descent in the L^2(h^N) metric.
    const GridFunction d = -r / prob.domain.cell_volume();
    const double slope = r.dot(d);
    double step = 1.0;
    bool accepted = false;
    for (int k = 0; k < 60; ++k) {
      const double Et = energy(u + step * d, prob).total;
      if (Et <= E + 1e-4 * step * slope) {
        u += step * d;
        E = Et;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (E < -1e12)
      throw Error(ErrorCode::Diverged, "energy below -1e12 during descent; check lambda and the grid");
    if (!accepted) break;
    last_step = step;
  }
  rep.u = u;
  finish(rep, prob, opt, c_star);
  return rep;
}

}  // namespace

SolveReport descend(const Problem& prob, const GridFunction& u0, double c_star, const SolveOptions& opt) {
  require(u0.allFinite(), ErrorCode::InvalidArgument, "descent start must be finite");
  const double p = prob.p;
  const double q = prob.critical_exponent();
  const Domain& d = prob.domain;

  SolveReport rep;
  const double r0 = dual_norm(residual(u0, prob), d, p);
  if (r0 <= opt.tol) {
    rep.u = u0;
    rep.ps_trace.push_back({0, energy(u0, prob).total, r0, 0.0});
    finish(rep, prob, opt, c_star);
    return rep;
  }
  const auto e0 = energy(u0, prob);
  const double a0 = e0.rho_pow - e0.minus_pow - prob.lambda * e0.lp_pow;
  if (!(a0 > 0.0)) return plain_descent(prob, u0, c_star, opt);

  // Q(x) = a(x) / b(x)^{p/q}, a = rho^p - minus - lambda ||x||_p^p, b = ||x||_q^q.
  ValueGrad f = [&](const GridFunction& x, GridFunction& grad) {
    const auto e = energy(x, prob);
    const double a = e.rho_pow - e.minus_pow - prob.lambda * e.lp_pow;
    const double b = e.crit_pow;
    if (!(a > 0.0) || !(b > 0.0)) return std::numeric_limits<double>::infinity();
    const double bq = std::pow(b, p / q);
    const double Q = a / bq;
    const GridFunction da = p * (dual_Ap(x, prob) - dual_Lp(x, prob) - prob.lambda * dual_Bp(x, prob));
    grad = (da - Q * p * std::pow(b, p / q - 1.0) * dual_f(x, prob)) / bq;
    return Q;
  };
  Normalizer norm = [&](GridFunction& x) {
    const double c = 1.0 / lp_norm(x, d, q);
    x *= c;
    return c;
  };
  // With ||x||_q = 1 the Nehari point is t x, t = Q^{1/(q-p)}, and there
  // dE = t^{p-1} grad Q / p.
  auto nehari_scale = [&](double Q) { return std::pow(Q, 1.0 / (q - p)); };
  Measure measure = [&](const GridFunction&, double Q, const GridFunction& grad) {
    const double t = nehari_scale(Q);
    return dual_norm(std::pow(t, p - 1.0) * grad / p, d, p);
  };

  const Eigen::MatrixXd form = linearized_form(prob);
  Eigen::LLT<Eigen::MatrixXd> llt(form);
  require(llt.info() == Eigen::Success, ErrorCode::InvalidArgument, "linearized form is not positive definite");
  QuotientOptions qo;
  qo.max_iter = opt.max_iter;
  qo.tol = opt.tol;
  qo.polish = opt.polish;
  qo.precond = &llt;
  qo.stall_window = 200;
  auto res = minimize_quotient(f, norm, measure, u0, qo);

  const double gap = 1.0 / p - 1.0 / q;
  for (const auto& h : res.history)
    rep.ps_trace.push_back({h.iter, gap * std::pow(h.value, q / (q - p)), h.measure, h.step});
  rep.iterations = res.iterations;
  rep.u = nehari_scale(res.value) * res.u;
  finish(rep, prob, opt, c_star);
  return rep;
}

double measure_eta(const Problem& prob, int samples, std::uint64_t seed) {
  if (prob.measure.minus_count() == 0) return 0.0;
  double eta = 0.0;
  for (int k = 0; k < samples; ++k) {
    GridFunction u;
    switch (k % 4) {
      case 0: u = test_function(TestKind::RandomSmooth, prob.domain, mix_seed(seed, k)); break;
      case 1: u = test_function(TestKind::RandomRough, prob.domain, mix_seed(seed, k)); break;
      case 2: u = test_function(TestKind::Bump, prob.domain, mix_seed(seed, k)); break;
      default: u = test_function(TestKind::EigenGuess, prob.domain, mix_seed(seed, k)); break;
    }
    const double rp = rho_pow(u, prob);
    if (rp > 0.0) eta = std::max(eta, prob.p * potential_N(u, prob) / rp);
  }
  return eta;
}

PairReport find_pair(const Problem& prob, const SolveOptions& opt) {
  EigenOptions eo;
  eo.seed = opt.seed;
  return find_pair(prob, lambda1(prob, eo), sobolev_constant(prob, eo), opt);
}

PairReport find_pair(const Problem& prob, const EigenReport& eigen, const SobolevReport& sobolev,
                     const SolveOptions& opt) {
  PairReport out;
  out.eigen = eigen;
  out.sobolev = sobolev;
  out.thresholds = thresholds(prob, 1, out.eigen.lambda1, out.sobolev.value);
  out.path = mountain_pass_path(prob, out.eigen.u1);
  out.peak_bound = peak_bound(prob, out.eigen.lambda1);
  out.peak_ok = out.path.E_peak <= out.peak_bound + 1e-8;
  out.eta = measure_eta(prob, opt.eta_samples, opt.seed);
  out.reliable = out.eta < 1.0;

  // Push the peak point off the ray with a small smooth perturbation.
  GridFunction u0 = out.path.t_peak * out.path.R * out.path.direction;
  GridFunction w = test_function(TestKind::RandomSmooth, prob.domain, mix_seed(opt.seed, 99));
  w *= opt.perturbation * lp_norm(u0, prob.domain, prob.p) / lp_norm(w, prob.domain, prob.p);
  u0 += w;

  try {
    out.plus = descend(prob, u0, out.thresholds.c_star, opt);
    out.minus = descend(prob, -u0, out.thresholds.c_star, opt);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::Diverged || out.reliable) throw;
    out.diverged = true;
    return out;
  }
  const double scale = std::max(1.0, std::abs(out.plus.energy));
  out.pair_ok = out.plus.converged && out.minus.converged && out.plus.nontrivial && out.minus.nontrivial &&
                std::abs(out.plus.energy - out.minus.energy) <= 1e-12 * scale;
  return out;
}

}  // namespace superlap
