#include "superlap/optim.hpp"

#include <cmath>
#include <deque>
#include <limits>

#include "superlap/error.hpp"

namespace superlap {

namespace {

struct Pair {
  GridFunction s, y;
  double rho;
};

GridFunction apply_h0(const GridFunction& q, const QuotientOptions& opt) {
  return opt.precond ? GridFunction(opt.precond->solve(q)) : q;
}

GridFunction lbfgs_direction(const GridFunction& g, const std::deque<Pair>& pairs, const QuotientOptions& opt) {
  GridFunction q = g;
  std::vector<double> alpha(pairs.size());
  for (std::size_t k = pairs.size(); k-- > 0;) {
    alpha[k] = pairs[k].rho * pairs[k].s.dot(q);
    q -= alpha[k] * pairs[k].y;
  }
  GridFunction r = apply_h0(q, opt);
  if (!pairs.empty()) {
    const auto& last = pairs.back();
    const GridFunction hy = apply_h0(last.y, opt);
    r *= last.s.dot(last.y) / last.y.dot(hy);
  }
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const double beta = pairs[k].rho * pairs[k].y.dot(r);
    r += (alpha[k] - beta) * pairs[k].s;
  }
  return -r;
}

// The value stopped moving over the window and the measure stopped improving.
bool stalled(const std::vector<IterRecord>& h, const QuotientOptions& opt) {
  const std::size_t cut = h.size() - 1 - opt.stall_window;
  if ((h[cut].value - h.back().value) > opt.stall_rel * std::abs(h.back().value)) return false;
  double before = std::numeric_limits<double>::infinity(), recent = before;
  for (std::size_t k = 0; k < h.size(); ++k) {
    double& slot = k <= cut ? before : recent;
    slot = std::min(slot, h[k].measure);
  }
  return recent > 0.5 * before;
}

}  // namespace

QuotientResult minimize_quotient(const ValueGrad& f, const Normalizer& normalize, const Measure& measure,
                                 GridFunction u0, const QuotientOptions& opt) {
  QuotientResult res;
  GridFunction u = std::move(u0);
  GridFunction g(u.size());
  normalize(u);
  double fu = f(u, g);
  require(std::isfinite(fu), ErrorCode::InvalidArgument, "starting point is infeasible for the objective");

  std::deque<Pair> pairs;
  int polish_left = -1;
  double last_step = 0.0;
  for (int it = 0;; ++it) {
    const double m = measure(u, fu, g);
    res.history.push_back({it, fu, last_step, m});
    res.iterations = it;
    if (m <= opt.tol) {
      res.reached_tol = true;
      if (polish_left < 0) polish_left = opt.polish;
      if (polish_left-- == 0) {
        res.converged = true;
        break;
      }
    }
    if (it >= opt.stall_window && stalled(res.history, opt)) {
      res.converged = true;
      break;
    }
    if (it >= opt.max_iter) break;

    GridFunction d = lbfgs_direction(g, pairs, opt);
    double gd = g.dot(d);
    if (!(gd < 0.0)) {
      pairs.clear();
      d = lbfgs_direction(g, pairs, opt);
      gd = g.dot(d);
    }
    if (pairs.empty()) {
      // Cap the first step relative to the iterate size.
      const double cap = 0.25 * u.norm();
      const double dn = d.norm();
      if (dn > cap && cap > 0.0) {
        d *= cap / dn;
        gd *= cap / dn;
      }
    }
    if (!(gd < 0.0)) break;

    // Armijo backtracking. Once values agree to round-off the decision uses
    // only the directional derivative: bracket a step whose slope has shrunk
    // to within 0.9 of the initial one, expanding when the step is too short.
    double step = opt.initial_step;
    double lo = 0.0, hi = std::numeric_limits<double>::infinity();
    bool accepted = false;
    GridFunction ut(u.size()), gt(u.size());
    double ft = 0.0;
    for (int k = 0; k < 60; ++k) {
      ut = u + step * d;
      ft = f(ut, gt);
      if (std::isfinite(ft)) {
        if (std::abs(ft - fu) <= 1e-13 * std::abs(fu)) {
          const double gtd = gt.dot(d);
          if (gtd < 0.9 * gd) {
            lo = step;
            step = std::isinf(hi) ? 2.0 * step : 0.5 * (lo + hi);
            continue;
          }
          if (gtd <= -0.9 * gd) {
            accepted = true;
            break;
          }
        } else if (ft <= fu + opt.armijo_c * step * gd) {
          accepted = true;
          break;
        }
      }
      hi = step;
      step = lo + opt.backtrack * (hi - lo);
    }
    if (!accepted) {
      if (!pairs.empty()) {
        pairs.clear();
        continue;
      }
      break;
    }
    const double scale = normalize(ut);
    gt /= scale;
    Pair pr{ut - u, gt - g, 0.0};
    const double sy = pr.s.dot(pr.y);
    if (sy > 1e-14 * pr.s.norm() * pr.y.norm()) {
      pr.rho = 1.0 / sy;
      pairs.push_back(std::move(pr));
      if (static_cast<int>(pairs.size()) > opt.memory) pairs.pop_front();
    }
    u = std::move(ut);
    g = std::move(gt);
    fu = ft;
    last_step = step;
  }
  res.u = std::move(u);
  res.value = fu;
  res.measure = res.history.back().measure;
  return res;
}

}  // namespace superlap
