#pragma once

#include <functional>
#include <optional>
#include <vector>

namespace superlap {

/// Dirac component weight * delta_order. Weight is signed.
struct MeasureAtom {
  double order = 0.0;
  double weight = 0.0;
};

/// Tabulated density f on [0,1], linear between samples. A repeated abscissa
/// marks a jump; each smooth piece gets its own Gauss-Legendre rule.
struct DensityTable {
  std::vector<double> s;
  std::vector<double> f;
  int quad_order = 8;
};

struct SpectralMeasure {
  std::vector<MeasureAtom> plus_atoms;   // positive weights
  std::vector<MeasureAtom> minus_atoms;  // magnitudes of mu-
  std::optional<DensityTable> density;
  double tail_mass = 0.0;  // mass dropped by series truncation

  /// Splits a signed atom list into mu+ and mu-, merging atoms of equal order.
  static SpectralMeasure from_signed(const std::vector<MeasureAtom>& atoms);

  /// Signed atoms with the density already discretized and merged in.
  std::vector<MeasureAtom> signed_atoms() const;
};

struct ValidatedMeasure {
  std::vector<MeasureAtom> atoms;  // signed, sorted by decreasing order
  double s_bar = 1.0;
  double gamma = 0.0;
  double s_sharp = 1.0;
  double mass_plus_high = 0.0;  // mu+([s_bar,1])
  double mass_minus_low = 0.0;  // mu-([0,s_bar])
  double tail_mass = 0.0;

  std::size_t plus_count() const;
  std::size_t minus_count() const;
};

/// Gauss-Legendre discretization of f ds on the pieces [b_k, b_{k+1}].
/// Throws ZeroDensity if every node value vanishes.
std::vector<MeasureAtom> discretize_density(const std::function<double(double)>& f, int m,
                                            const std::vector<double>& breakpoints = {0.0, 1.0});
std::vector<MeasureAtom> discretize_density(const DensityTable& table);

/// Checks positivity of mu+ on [s_bar,1] and absence of mu- there; derives
/// gamma and s_sharp (largest mu+ order unless overridden).
ValidatedMeasure validate(const SpectralMeasure& m, double s_bar,
                          std::optional<double> s_sharp = std::nullopt);

struct SeriesTruncation {
  SpectralMeasure measure;
  double tail_mass = 0.0;
  int kept = 0;
};

/// Keeps the first K atoms of a series with strictly decreasing orders.
/// Tail mass is series_sum minus the kept partial sum when the sum is known,
/// otherwise the sum of the supplied terms that were dropped.
SeriesTruncation truncate_series(const std::vector<double>& orders,
                                 const std::vector<double>& weights, int k,
                                 std::optional<double> series_sum = std::nullopt);

}  // namespace superlap
