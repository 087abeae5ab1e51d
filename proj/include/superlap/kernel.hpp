#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <tuple>

#include "superlap/grid.hpp"

namespace superlap {

/// Euler Gamma, Lanczos approximation (g = 7, 9 terms) with reflection below 1/2.
double gamma_fn(double x);

/// c_{N,s,p} = s 2^{2s-1} Gamma((ps+p+N-2)/2) / (pi^{N/2} Gamma(1-s)), s in (0,1).
double normalizing_constant(int n_dim, double s, double p);

enum class KernelKind {
  Lebesgue,    // s = 0: [u] = ||u||_p
  Fractional,  // 0 < s < 1
  Gradient,    // s = 1: [u] = ||grad u||_p
};

struct KernelTable {
  KernelKind kind = KernelKind::Fractional;
  double s = 0.0;
  double p = 2.0;
  double c = 1.0;
  int n = 0;
  double cell_volume = 0.0;
  Eigen::MatrixXd W;       // h^{2N} / |x_i - x_j|^{N+sp}, zero diagonal
  Eigen::VectorXd W_rows;  // row sums of W
  Eigen::VectorXd tail;    // integral of |x_i - y|^{-(N+sp)} over the complement of the domain
};

/// Builds the fractional table for s in (0,1). Tails are exact in 1D; in 2D the
/// part outside the box is a per-face angular integral and mask holes inside the
/// box use tensor Gauss-Legendre.
KernelTable assemble(const Domain& d, double s, double p);

/// Table for any s in [0,1], dispatching the endpoints to the special kinds.
KernelTable make_table(const Domain& d, double s, double p);

/// [u]_{s,p}^p.
double seminorm_pow(const GridFunction& u, const KernelTable& t, const Domain& d);
double seminorm(const GridFunction& u, const KernelTable& t, const Domain& d);

/// Vector a with a.dot(v) = <(-Delta)_p^s u, v>; equals (1/p) grad of seminorm_pow.
GridFunction seminorm_dual(const GridFunction& u, const KernelTable& t, const Domain& d);

/// Process-wide table cache keyed by (dim, box, h, mask hash, s, p), with an
/// optional on-disk layer.
class KernelCache {
 public:
  static KernelCache& global();

  std::shared_ptr<const KernelTable> get(const Domain& d, double s, double p);
  void set_directory(std::optional<std::filesystem::path> dir);
  void clear();
  std::size_t size() const;

 private:
  using Key = std::tuple<int, double, double, double, double, double, std::uint64_t, double, double>;
  static Key key_of(const Domain& d, double s, double p);
  std::shared_ptr<const KernelTable> load(const Key& key, const std::filesystem::path& file) const;
  void store(const Key& key, const KernelTable& t, const std::filesystem::path& file) const;
  std::filesystem::path file_for(const Key& key, const std::filesystem::path& dir) const;

  mutable std::mutex mutex_;
  std::map<Key, std::shared_ptr<const KernelTable>> tables_;
  std::optional<std::filesystem::path> dir_;
};

}  // namespace superlap
