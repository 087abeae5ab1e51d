#include "superlap/eigensolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "superlap/error.hpp"
#include "superlap/rng.hpp"

namespace superlap {

double rayleigh(const GridFunction& u, const Problem& prob);

namespace {

// Cells kept free in a reduced solve; the rest are pinned to zero.
struct Support {
  std::vector<int> index;

  GridFunction expand(const GridFunction& x, int n) const {
    GridFunction u = GridFunction::Zero(n);
    for (std::size_t k = 0; k < index.size(); ++k) u[index[k]] = x[k];
    return u;
  }
  GridFunction restrict_to(const GridFunction& u) const {
    GridFunction x(index.size());
    for (std::size_t k = 0; k < index.size(); ++k) x[k] = u[index[k]];
    return x;
  }
};

Support full_support(int n) {
  Support s;
  s.index.resize(n);
  for (int i = 0; i < n; ++i) s.index[i] = i;
  return s;
}

Eigen::LLT<Eigen::MatrixXd> preconditioner(const Problem& prob, const Support& sup) {
  const Eigen::MatrixXd full = linearized_form(prob);
  const int m = static_cast<int>(sup.index.size());
  Eigen::MatrixXd red(m, m);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i) red(i, j) = full(sup.index[i], sup.index[j]);
  red.diagonal().array() += 1e-14 * red.diagonal().maxCoeff();
  Eigen::LLT<Eigen::MatrixXd> llt(red);
  require(llt.info() == Eigen::Success, ErrorCode::InvalidArgument,
          "linearized form is not positive definite; check the measure");
  return llt;
}

// Minimizes rho^p / ||u||_r^p over the support, with ||u||_r = 1 at every iterate.
QuotientResult minimize_ratio(const Problem& prob, const Support& sup, double r, const GridFunction& start,
                              const EigenOptions& opt, const Eigen::LLT<Eigen::MatrixXd>& llt) {
  const int n = prob.n();
  const double p = prob.p;
  const Domain& d = prob.domain;
  auto power_dual = [&](const GridFunction& u) {
    GridFunction b(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i)
      b[i] = u[i] == 0.0 ? 0.0 : std::copysign(std::pow(std::abs(u[i]), r - 1.0), u[i]) * d.cell_volume();
    return b;
  };

  ValueGrad f = [&](const GridFunction& x, GridFunction& grad) {
    const GridFunction u = sup.expand(x, n);
    const double lr = lp_norm_pow(u, d, r);
    if (!(lr > 0.0)) return std::numeric_limits<double>::infinity();
    const double denom = std::pow(lr, p / r);
    const double num = rho_pow(u, prob);
    const double val = num / denom;
    const GridFunction a = dual_Ap(u, prob);
    const GridFunction b = power_dual(u);
    grad = sup.restrict_to(p * (a - val * std::pow(lr, p / r - 1.0) * b) / denom);
    return val;
  };
  Normalizer norm = [&](GridFunction& x) {
    const double c = 1.0 / lp_norm(sup.expand(x, n), d, r);
    x *= c;
    return c;
  };
  // Iterates are normalized, so grad / p is the Euler-Lagrange residual.
  Measure measure = [&](const GridFunction&, double, const GridFunction& grad) {
    return dual_norm(sup.expand(grad, n), d, p) / p;
  };
  QuotientOptions qo;
  qo.max_iter = opt.max_iter;
  qo.tol = opt.tol;
  qo.precond = &llt;
  auto res = minimize_quotient(f, norm, measure, sup.restrict_to(start), qo);
  res.u = sup.expand(res.u, n);
  return res;
}


struct SplitValue {
  double value;
  double tau;
};

// max over tau in [0, pi/2] of R(cos(tau) ul - sin(tau) ur): coarse scan plus
// golden-section refinement around the best sample.
SplitValue split_value(const Problem& prob, const GridFunction& ul, const GridFunction& ur) {
  auto family = [&](double tau) { return rayleigh(std::cos(tau) * ul - std::sin(tau) * ur, prob); };
  constexpr int samples = 17;
  const double half_pi = 0.5 * std::numbers::pi;
  int arg = 0;
  double top = -1.0;
  for (int k = 0; k < samples; ++k) {
    const double v = family(half_pi * k / (samples - 1));
    if (v > top) {
      top = v;
      arg = k;
    }
  }
  double a = half_pi * std::max(0, arg - 1) / (samples - 1);
  double b = half_pi * std::min(samples - 1, arg + 1) / (samples - 1);
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = family(x1), f2 = family(x2);
  for (int it = 0; it < 40; ++it) {
    if (f1 > f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = family(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = family(x2);
    }
  }
  SplitValue out{top, half_pi * arg / (samples - 1)};
  if (f1 > out.value) out = {f1, x1};
  if (f2 > out.value) out = {f2, x2};
  return out;
}

// Projected gradient on the sign cone {ul >= 0 on the left, ur >= 0 on the
// right} for the split value, with Barzilai-Borwein steps and Armijo backtracking.
double refine_split(const Problem& prob, const Support& left, const Support& right, GridFunction ul,
                    GridFunction ur, int max_iter = 100) {
  const Domain& d = prob.domain;
  const double p = prob.p;
  auto project = [&](GridFunction& l, GridFunction& r) {
    GridFunction nl = GridFunction::Zero(l.size()), nr = GridFunction::Zero(r.size());
    for (int i : left.index) nl[i] = std::max(0.0, l[i]);
    for (int i : right.index) nr[i] = std::max(0.0, r[i]);
    const double ln = lp_norm(nl, d, p), rn = lp_norm(nr, d, p);
    if (ln > 0.0) nl /= ln;
    if (rn > 0.0) nr /= rn;
    l = std::move(nl);
    r = std::move(nr);
    return ln > 0.0 && rn > 0.0;
  };
  auto gradient = [&](const SplitValue& sv, GridFunction& gl, GridFunction& gr) {
    const GridFunction w = std::cos(sv.tau) * ul - std::sin(sv.tau) * ur;
    const double lw = lp_norm_pow(w, d, p);
    const GridFunction g = p * (dual_Ap(w, prob) - sv.value * dual_Bp(w, prob)) / lw;
    gl = std::cos(sv.tau) * g;
    gr = -std::sin(sv.tau) * g;
  };
  project(ul, ur);
  SplitValue cur = split_value(prob, ul, ur);
  GridFunction gl, gr;
  gradient(cur, gl, gr);
  double step = 1.0 / std::max(1e-300, std::sqrt(gl.squaredNorm() + gr.squaredNorm()));
  for (int it = 0; it < max_iter; ++it) {
    bool accepted = false;
    GridFunction nl, nr;
    SplitValue next{};
    for (int k = 0; k < 30; ++k) {
      nl = ul - step * gl;
      nr = ur - step * gr;
      if (project(nl, nr)) {
        next = split_value(prob, nl, nr);
        const double moved = (nl - ul).squaredNorm() + (nr - ur).squaredNorm();
        if (next.value <= cur.value - 1e-4 * moved / step) {
          accepted = true;
          break;
        }
      }
      step *= 0.5;
    }
    if (!accepted) break;
    GridFunction ngl, ngr;
    gradient(next, ngl, ngr);
    const double sy = (nl - ul).dot(ngl - gl) + (nr - ur).dot(ngr - gr);
    const double ss = (nl - ul).squaredNorm() + (nr - ur).squaredNorm();
    const double rel = (cur.value - next.value) / cur.value;
    ul = std::move(nl);
    ur = std::move(nr);
    gl = std::move(ngl);
    gr = std::move(ngr);
    cur = next;
    step = sy > 0.0 ? ss / sy : step * 2.0;
    if (rel < 1e-12) break;
  }
  return cur.value;
}

}  // namespace

double rayleigh(const GridFunction& u, const Problem& prob) {
  return rho_pow(u, prob) / lp_norm_pow(u, prob.domain, prob.p);
}

EigenReport lambda1(const Problem& prob, const EigenOptions& opt) {
  const Support sup = full_support(prob.n());
  const auto llt = preconditioner(prob, sup);
  GridFunction start = test_function(TestKind::Bump, prob.domain, opt.seed);
  auto res = minimize_ratio(prob, sup, prob.p, start, opt, llt);
  EigenReport rep;
  rep.u1 = res.u;
  if (rep.u1.sum() < 0.0) rep.u1 = -rep.u1;
  rep.u1 /= lp_norm(rep.u1, prob.domain, prob.p);
  rep.lambda1 = rayleigh(rep.u1, prob);
  rep.iterations = res.iterations;
  rep.rayleigh_history = std::move(res.history);
  rep.converged = res.converged;
  const GridFunction r = dual_Ap(rep.u1, prob) - rep.lambda1 * dual_Bp(rep.u1, prob);
  rep.residual_norm = dual_norm(r, prob.domain, prob.p);
  return rep;
}

Lambda2Estimate lambda2_estimate(const Problem& prob, const EigenOptions& opt) {
  const Domain& d = prob.domain;
  const int n = d.n();
  Lambda2Estimate best;
  best.value = std::numeric_limits<double>::infinity();
  const GridFunction guess = test_function(TestKind::EigenGuess, d, opt.seed).cwiseAbs();
  Support best_left, best_right;
  GridFunction best_ul, best_ur;

  for (int axis = 0; axis < d.dim(); ++axis) {
    int lo = std::numeric_limits<int>::max(), hi = -1;
    for (int i = 0; i < n; ++i) {
      lo = std::min(lo, d.cell(i)[axis]);
      hi = std::max(hi, d.cell(i)[axis]);
    }
    for (double frac : {0.3, 0.4, 0.5, 0.6, 0.7}) {
      const double cut = lo + frac * (hi - lo + 1);
      Support left, right;
      for (int i = 0; i < n; ++i) (d.cell(i)[axis] + 0.5 < cut ? left : right).index.push_back(i);
      if (left.index.empty() || right.index.empty()) continue;
      const GridFunction ul =
          minimize_ratio(prob, left, prob.p, guess, opt, preconditioner(prob, left)).u.cwiseAbs();
      const GridFunction ur =
          minimize_ratio(prob, right, prob.p, guess, opt, preconditioner(prob, right)).u.cwiseAbs();
      const double top = split_value(prob, ul, ur).value;
      if (top < best.value) {
        best.value = top;
        best.best_cut = frac;
        best.best_axis = axis;
        best_left = left;
        best_right = right;
        best_ul = ul;
        best_ur = ur;
      }
    }
  }
  if (!best_left.index.empty())
    best.value = std::min(best.value, refine_split(prob, best_left, best_right, best_ul, best_ur));
  return best;
}

SobolevReport sobolev_constant(const Problem& prob, const EigenOptions& opt) {
  const double q = prob.critical_exponent();
  const Support sup = full_support(prob.n());
  const auto llt = preconditioner(prob, sup);
  SobolevReport rep;
  rep.value = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 5; ++k) {
    GridFunction start;
    if (k == 0)
      start = test_function(TestKind::Bump, prob.domain);
    else if (k == 1)
      start = test_function(TestKind::EigenGuess, prob.domain);
    else
      start = test_function(TestKind::RandomSmooth, prob.domain, mix_seed(opt.seed, k));
    auto res = minimize_ratio(prob, sup, q, start, opt, llt);
    const double v = rho_pow(res.u, prob) / std::pow(lp_norm_pow(res.u, prob.domain, q), prob.p / q);
    rep.starts.push_back(v);
    if (v < rep.value) {
      rep.value = v;
      rep.u = res.u;
    }
  }
  return rep;
}

ThresholdReport thresholds(const Problem& prob, int l, double lambda_l, double sobolev) {
  const double n_dim = prob.domain.dim();
  const double ss = prob.measure.s_sharp;
  const double p = prob.p;
  const double vol_pow = std::pow(prob.domain.volume(), ss * p / n_dim);
  ThresholdReport t;
  t.l = l;
  t.lambda_l = lambda_l;
  t.lambda = prob.lambda;
  t.sobolev = sobolev;
  t.theta0 = 0.5 * (1.0 - vol_pow * (lambda_l - prob.lambda) / sobolev);
  t.theta0_valid = t.theta0 > 0.0 && t.theta0 < 1.0;
  const double base = (1.0 - t.theta0) * sobolev;
  t.c_star = base > 0.0 ? ss / n_dim * std::pow(base, n_dim / (ss * p)) : 0.0;
  t.window_lo = lambda_l - sobolev / vol_pow;
  t.window_hi = lambda_l;
  t.in_window = prob.lambda > t.window_lo && prob.lambda < t.window_hi;
  t.gamma_diag = prob.measure.gamma;
  return t;
}

double peak_bound(const Problem& prob, double lambda_l) {
  const double p = prob.p;
  const double q = prob.critical_exponent();
  const double gap = lambda_l - prob.lambda;
  if (!(gap > 0.0)) return 0.0;
  const double beta = std::pow(prob.domain.volume(), -(q - p) / p);
  return (1.0 / p - 1.0 / q) * std::pow(gap / std::pow(beta, p / q), q / (q - p));
}

}  // namespace superlap
