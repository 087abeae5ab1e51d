#include "superlap/measure.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "superlap/error.hpp"
#include "superlap/quadrature.hpp"

namespace superlap {

namespace {

void check_atom(const MeasureAtom& a) {
  require(std::isfinite(a.order) && a.order >= 0.0 && a.order <= 1.0, ErrorCode::InvalidArgument,
          "atom order must lie in [0,1]");
  require(std::isfinite(a.weight) && a.weight != 0.0, ErrorCode::InvalidArgument,
          "atom weight must be finite and nonzero");
}

double interpolate(const DensityTable& t, std::size_t lo, std::size_t hi, double s) {
  // Linear interpolation restricted to the smooth piece [lo, hi].
  auto it = std::upper_bound(t.s.begin() + lo, t.s.begin() + hi + 1, s);
  std::size_t j = static_cast<std::size_t>(it - t.s.begin());
  if (j <= lo) return t.f[lo];
  if (j > hi) return t.f[hi];
  const double s0 = t.s[j - 1], s1 = t.s[j];
  if (s1 == s0) return t.f[j];
  const double w = (s - s0) / (s1 - s0);
  return (1.0 - w) * t.f[j - 1] + w * t.f[j];
}

}  // namespace

SpectralMeasure SpectralMeasure::from_signed(const std::vector<MeasureAtom>& atoms) {
  std::map<double, double> merged;
  for (const auto& a : atoms) {
    check_atom(a);
    merged[a.order] += a.weight;
  }
  SpectralMeasure m;
  for (auto it = merged.rbegin(); it != merged.rend(); ++it) {
    if (it->second > 0.0) m.plus_atoms.push_back({it->first, it->second});
    if (it->second < 0.0) m.minus_atoms.push_back({it->first, -it->second});
  }
  return m;
}

std::vector<MeasureAtom> SpectralMeasure::signed_atoms() const {
  std::vector<MeasureAtom> out;
  for (const auto& a : plus_atoms) {
    check_atom(a);
    require(a.weight > 0.0, ErrorCode::InvalidArgument, "plus atom with nonpositive weight");
    out.push_back(a);
  }
  for (const auto& a : minus_atoms) {
    check_atom(a);
    require(a.weight > 0.0, ErrorCode::InvalidArgument, "minus atom magnitude must be positive");
    out.push_back({a.order, -a.weight});
  }
  if (density) {
    auto d = discretize_density(*density);
    out.insert(out.end(), d.begin(), d.end());
  }
  auto merged = from_signed(out);
  std::vector<MeasureAtom> result;
  for (const auto& a : merged.plus_atoms) result.push_back(a);
  for (const auto& a : merged.minus_atoms) result.push_back({a.order, -a.weight});
  std::sort(result.begin(), result.end(),
            [](const MeasureAtom& x, const MeasureAtom& y) { return x.order > y.order; });
  return result;
}

std::vector<MeasureAtom> discretize_density(const std::function<double(double)>& f, int m,
                                            const std::vector<double>& breakpoints) {
  require(m >= 2, ErrorCode::InvalidArgument, "density quadrature order M >= 2 required");
  require(breakpoints.size() >= 2, ErrorCode::InvalidArgument, "density needs at least one piece");
  std::vector<MeasureAtom> atoms;
  bool any_nonzero = false;
  for (std::size_t k = 0; k + 1 < breakpoints.size(); ++k) {
    const double a = breakpoints[k], b = breakpoints[k + 1];
    require(a >= 0.0 && b <= 1.0 && a <= b, ErrorCode::InvalidArgument,
            "density breakpoints must be nondecreasing in [0,1]");
    if (b == a) continue;
    const auto rule = gauss_legendre(m, a, b);
    for (int i = 0; i < m; ++i) {
      const double v = f(rule.nodes[i]);
      require(std::isfinite(v), ErrorCode::InvalidArgument, "density value is not finite");
      if (v == 0.0) continue;
      any_nonzero = true;
      atoms.push_back({rule.nodes[i], v * rule.weights[i]});
    }
  }
  require(any_nonzero, ErrorCode::ZeroDensity, "density must not vanish identically");
  return atoms;
}

std::vector<MeasureAtom> discretize_density(const DensityTable& t) {
  require(t.s.size() == t.f.size() && t.s.size() >= 2, ErrorCode::InvalidArgument,
          "density table needs matching s and f columns with at least two rows");
  for (std::size_t i = 1; i < t.s.size(); ++i)
    require(t.s[i] >= t.s[i - 1], ErrorCode::InvalidArgument, "density abscissae must be sorted");
  require(t.s.front() >= 0.0 && t.s.back() <= 1.0, ErrorCode::InvalidArgument,
          "density abscissae must lie in [0,1]");

  std::vector<MeasureAtom> atoms;
  bool any_nonzero = false;
  std::size_t lo = 0;
  for (std::size_t i = 1; i <= t.s.size(); ++i) {
    const bool piece_end = i == t.s.size() || t.s[i] == t.s[i - 1];
    if (!piece_end) continue;
    const std::size_t hi = i - 1;
    if (t.s[hi] > t.s[lo]) {
      try {
        auto piece = discretize_density([&](double s) { return interpolate(t, lo, hi, s); },
                                        t.quad_order, {t.s[lo], t.s[hi]});
        atoms.insert(atoms.end(), piece.begin(), piece.end());
        any_nonzero = true;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::ZeroDensity) throw;
      }
    }
    lo = i;
  }
  require(any_nonzero, ErrorCode::ZeroDensity, "density must not vanish identically");
  return atoms;
}

std::size_t ValidatedMeasure::plus_count() const {
  return static_cast<std::size_t>(
      std::count_if(atoms.begin(), atoms.end(), [](const MeasureAtom& a) { return a.weight > 0; }));
}

std::size_t ValidatedMeasure::minus_count() const { return atoms.size() - plus_count(); }

ValidatedMeasure validate(const SpectralMeasure& m, double s_bar, std::optional<double> s_sharp) {
  require(s_bar > 0.0 && s_bar <= 1.0, ErrorCode::InvalidArgument, "s_bar must lie in (0,1]");
  ValidatedMeasure v;
  v.atoms = m.signed_atoms();
  v.s_bar = s_bar;
  v.tail_mass = m.tail_mass;

  double max_plus = -1.0;
  for (const auto& a : v.atoms) {
    if (a.weight > 0.0) {
      if (a.order >= s_bar) v.mass_plus_high += a.weight;
      max_plus = std::max(max_plus, a.order);
    } else {
      if (a.order >= s_bar)
        throw Error(ErrorCode::NegativeHighAtom,
                    "negative part charges order " + std::to_string(a.order) +
                        " >= s_bar = " + std::to_string(s_bar));
      v.mass_minus_low += -a.weight;
    }
  }
  if (!(v.mass_plus_high > 0.0))
    throw Error(ErrorCode::ZeroHighMass,
                "positive mass on [s_bar,1] is zero for s_bar = " + std::to_string(s_bar));
  v.gamma = v.mass_minus_low / v.mass_plus_high;
  v.s_sharp = max_plus;
  if (s_sharp) {
    require(*s_sharp >= s_bar && *s_sharp <= max_plus, ErrorCode::InvalidArgument,
            "s_sharp must satisfy s_bar <= s_sharp <= largest mu+ order");
    v.s_sharp = *s_sharp;
  }
  return v;
}

SeriesTruncation truncate_series(const std::vector<double>& orders,
                                 const std::vector<double>& weights, int k,
                                 std::optional<double> series_sum) {
  require(orders.size() == weights.size() && !orders.empty(), ErrorCode::InvalidArgument,
          "series orders and weights must have equal nonzero length");
  require(k >= 1, ErrorCode::InvalidArgument, "series cut index K >= 1 required");
  for (std::size_t i = 1; i < orders.size(); ++i)
    if (!(orders[i] < orders[i - 1]))
      throw Error(ErrorCode::NonMonotoneSeries, "series orders must be strictly decreasing");

  const std::size_t kept = std::min<std::size_t>(static_cast<std::size_t>(k), orders.size());
  std::vector<MeasureAtom> atoms;
  double kept_sum = 0.0, dropped_sum = 0.0;
  for (std::size_t i = 0; i < orders.size(); ++i) {
    if (i < kept) {
      if (weights[i] != 0.0) atoms.push_back({orders[i], weights[i]});
      kept_sum += weights[i];
    } else {
      dropped_sum += weights[i];
    }
  }
  SeriesTruncation out;
  out.measure = SpectralMeasure::from_signed(atoms);
  out.tail_mass = series_sum ? *series_sum - kept_sum : dropped_sum;
  out.measure.tail_mass = out.tail_mass;
  out.kept = static_cast<int>(kept);
  return out;
}

}  // namespace superlap
