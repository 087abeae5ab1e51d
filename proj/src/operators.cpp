#include "superlap/operators.hpp"

#include <cmath>

#include "powers.hpp"
#include "superlap/error.hpp"

namespace superlap {

Problem Problem::build(const Domain& d, const ValidatedMeasure& m, double p, double lambda) {
  require(p > 1.0, ErrorCode::InvalidArgument, "exponent p must exceed 1");
  Problem prob{d, m, {}, p, lambda, std::nullopt};
  for (const auto& a : m.atoms) prob.tables.push_back(KernelCache::global().get(d, a.order, p));
  const double n_dim = d.dim();
  if (n_dim > m.s_sharp * p) prob.p_star = n_dim * p / (n_dim - m.s_sharp * p);
  return prob;
}

Problem Problem::with_lambda(double new_lambda) const {
  Problem out = *this;
  out.lambda = new_lambda;
  return out;
}

Problem Problem::scaled(double plus_factor, double minus_factor) const {
  require(plus_factor > 0.0 && minus_factor >= 0.0, ErrorCode::InvalidArgument,
          "scaling factors must keep the sign structure of the measure");
  Problem out = *this;
  out.tables.clear();
  out.measure.atoms.clear();
  for (std::size_t k = 0; k < measure.atoms.size(); ++k) {
    auto a = measure.atoms[k];
    a.weight *= a.weight > 0.0 ? plus_factor : minus_factor;
    if (a.weight == 0.0) continue;
    out.measure.atoms.push_back(a);
    out.tables.push_back(tables[k]);
  }
  out.measure.mass_plus_high *= plus_factor;
  out.measure.mass_minus_low *= minus_factor;
  out.measure.gamma = out.measure.mass_minus_low / out.measure.mass_plus_high;
  return out;
}

double Problem::critical_exponent() const {
  if (!p_star)
    throw Error(ErrorCode::CriticalExponent,
                std::string(measure.s_sharp == 1.0 ? "condition N > p violated; " : "") +
                "condition N > s_sharp * p violated (N = " + std::to_string(domain.dim()) +
                    ", s_sharp = " + std::to_string(measure.s_sharp) + ", p = " + std::to_string(p) +
                    "): critical exponent p* is undefined");
  return *p_star;
}

namespace {

template <class Pred>
double weighted_pow(const GridFunction& u, const Problem& prob, Pred keep) {
  double acc = 0.0;
  for (std::size_t k = 0; k < prob.tables.size(); ++k) {
    const double w = prob.measure.atoms[k].weight;
    if (keep(w)) acc += std::abs(w) * seminorm_pow(u, *prob.tables[k], prob.domain);
  }
  return acc;
}

template <class Pred>
GridFunction weighted_dual(const GridFunction& u, const Problem& prob, Pred keep) {
  GridFunction a = GridFunction::Zero(u.size());
  for (std::size_t k = 0; k < prob.tables.size(); ++k) {
    const double w = prob.measure.atoms[k].weight;
    if (keep(w)) a += std::abs(w) * seminorm_dual(u, *prob.tables[k], prob.domain);
  }
  return a;
}

bool is_plus(double w) { return w > 0.0; }
bool is_minus(double w) { return w < 0.0; }

GridFunction power_dual(const GridFunction& u, double q, double cell_volume) {
  GridFunction a(u.size());
  detail::with_power(q, [&](auto pw) {
    for (Eigen::Index i = 0; i < u.size(); ++i) a[i] = pw.odd(u[i]) * cell_volume;
    return 0;
  });
  return a;
}

}  // namespace

double rho_pow(const GridFunction& u, const Problem& prob) { return weighted_pow(u, prob, is_plus); }

double rho_p(const GridFunction& u, const Problem& prob) { return std::pow(rho_pow(u, prob), 1.0 / prob.p); }

double minus_pow(const GridFunction& u, const Problem& prob) { return weighted_pow(u, prob, is_minus); }

GridFunction dual_Ap(const GridFunction& u, const Problem& prob) { return weighted_dual(u, prob, is_plus); }

GridFunction dual_Lp(const GridFunction& u, const Problem& prob) { return weighted_dual(u, prob, is_minus); }

GridFunction dual_Bp(const GridFunction& u, const Problem& prob) {
  return power_dual(u, prob.p, prob.domain.cell_volume());
}

GridFunction dual_f(const GridFunction& u, const Problem& prob) {
  return power_dual(u, prob.critical_exponent(), prob.domain.cell_volume());
}

double pairing_Ap(const GridFunction& u, const GridFunction& v, const Problem& prob) {
  return dual_Ap(u, prob).dot(v);
}

double pairing_Lp(const GridFunction& u, const GridFunction& v, const Problem& prob) {
  return dual_Lp(u, prob).dot(v);
}

double pairing_Bp(const GridFunction& u, const GridFunction& v, const Problem& prob) {
  return dual_Bp(u, prob).dot(v);
}

double pairing_f(const GridFunction& u, const GridFunction& v, const Problem& prob) {
  return dual_f(u, prob).dot(v);
}

double potential_N(const GridFunction& u, const Problem& prob) { return minus_pow(u, prob) / prob.p; }

double potential_F(const GridFunction& u, const Problem& prob) {
  const double q = prob.critical_exponent();
  return lp_norm_pow(u, prob.domain, q) / q;
}

EnergyBreakdown energy(const GridFunction& u, const Problem& prob) {
  const double q = prob.critical_exponent();
  EnergyBreakdown e;
  e.rho_pow = rho_pow(u, prob);
  e.minus_pow = minus_pow(u, prob);
  e.lp_pow = lp_norm_pow(u, prob.domain, prob.p);
  e.crit_pow = lp_norm_pow(u, prob.domain, q);
  e.total = e.rho_pow / prob.p - e.minus_pow / prob.p - prob.lambda * e.lp_pow / prob.p - e.crit_pow / q;
  return e;
}

GridFunction residual(const GridFunction& u, const Problem& prob) {
  GridFunction r = GridFunction::Zero(u.size());
  for (std::size_t k = 0; k < prob.tables.size(); ++k)
    r += prob.measure.atoms[k].weight * seminorm_dual(u, *prob.tables[k], prob.domain);
  return r - prob.lambda * dual_Bp(u, prob) - dual_f(u, prob);
}

GridFunction residual_reference(const GridFunction& u, const Problem& prob) {
  const Domain& d = prob.domain;
  const double p = prob.p;
  const double q = prob.critical_exponent();
  const double hn = d.cell_volume();
  const int n = d.n();
  auto phi = [](double x, double e) { return x == 0.0 ? 0.0 : std::copysign(std::pow(std::abs(x), e - 1.0), x); };
  auto value = [&](int ix, int iy) {
    const int k = d.index(ix, iy);
    return k >= 0 ? u[k] : 0.0;
  };

  GridFunction r(n);
  for (int i = 0; i < n; ++i) r[i] = -hn * (prob.lambda * phi(u[i], p) + phi(u[i], q));

  for (const auto& atom : prob.measure.atoms) {
    const KernelTable t = make_table(d, atom.order, p);
    const double w = atom.weight;
    if (t.kind == KernelKind::Lebesgue) {
      for (int i = 0; i < n; ++i) r[i] += w * hn * phi(u[i], p);
      continue;
    }
    if (t.kind == KernelKind::Fractional) {
      for (int i = 0; i < n; ++i) {
        double acc = 2.0 * t.tail[i] * hn * phi(u[i], p);
        for (int j = 0; j < n; ++j)
          if (j != i) acc += 2.0 * t.W(i, j) * phi(u[i] - u[j], p);
        r[i] += w * t.c * acc;
      }
      continue;
    }
    // Gradient: cell i appears in its own forward stencil and in the stencils
    // of its left and lower neighbours.
    const double h = d.h();
    auto grad_at = [&](int ix, int iy) {
      const double c0 = value(ix, iy);
      const double gx = (value(ix + 1, iy) - c0) / h;
      const double gy = d.dim() == 2 ? (value(ix, iy + 1) - c0) / h : 0.0;
      return std::array<double, 2>{gx, gy};
    };
    auto weight_at = [&](const std::array<double, 2>& g) {
      const double m = std::hypot(g[0], g[1]);
      return m == 0.0 ? 0.0 : std::pow(m, p - 2.0);
    };
    for (int i = 0; i < n; ++i) {
      const auto c = d.cell(i);
      const auto g0 = grad_at(c[0], c[1]);
      const auto gl = grad_at(c[0] - 1, c[1]);
      double acc = -weight_at(g0) * (g0[0] + g0[1]) + weight_at(gl) * gl[0];
      if (d.dim() == 2) {
        const auto gb = grad_at(c[0], c[1] - 1);
        acc += weight_at(gb) * gb[1];
      }
      r[i] += w * acc * hn / h;
    }
  }
  return r;
}

double dual_norm(const GridFunction& r, const Domain& d, double p) {
  const double pp = p / (p - 1.0);
  const double hn = d.cell_volume();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < r.size(); ++i) acc += std::pow(std::abs(r[i] / hn), pp);
  return std::pow(acc * hn, 1.0 / pp);
}

Eigen::MatrixXd linearized_form(const Problem& prob) {
  const Domain& d = prob.domain;
  const int n = d.n();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t k = 0; k < prob.tables.size(); ++k) {
    const double w = prob.measure.atoms[k].weight;
    if (w <= 0.0) continue;
    const KernelTable& t = *prob.tables[k];
    switch (t.kind) {
      case KernelKind::Lebesgue: m.diagonal().array() += w * t.cell_volume; break;
      case KernelKind::Fractional:
        m.noalias() -= 2.0 * w * t.c * t.W;
        m.diagonal() += 2.0 * w * t.c * (t.W_rows + t.cell_volume * t.tail);
        break;
      case KernelKind::Gradient: {
        GridFunction e = GridFunction::Zero(n);
        for (int j = 0; j < n; ++j) {
          e[j] = 1.0;
          m.col(j) += w * grad_seminorm_dual(e, d, 2.0);
          e[j] = 0.0;
        }
        break;
      }
    }
  }
  return m;
}

}  // namespace superlap
