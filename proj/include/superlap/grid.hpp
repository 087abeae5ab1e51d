#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace superlap {

/// Values on interior cells; zero everywhere else.
using GridFunction = Eigen::VectorXd;

enum class MaskKind { Full, Interval, Rectangle, Disk };

struct MaskSpec {
  MaskKind kind = MaskKind::Full;
  std::array<double, 4> params{};  // interval: a b; rectangle: x0 x1 y0 y1; disk: cx cy r
};

/// Cell-centered uniform grid over a box; cells whose center lies in the mask
/// are the unknowns.
class Domain {
 public:
  Domain(int dim, std::array<double, 4> box, double h, MaskSpec mask = {});

  static Domain interval(double a, double b, int n);
  static Domain square(double a, double b, int n);

  int dim() const { return dim_; }
  double h() const { return h_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  const std::array<double, 4>& box() const { return box_; }
  const MaskSpec& mask() const { return mask_; }

  /// Number of interior cells.
  int n() const { return static_cast<int>(cells_.size()); }
  /// h^dim.
  double cell_volume() const;
  double volume() const { return n() * cell_volume(); }

  /// Interior index of box cell (ix, iy), or -1 if outside the mask or box.
  int index(int ix, int iy = 0) const;
  std::array<int, 2> cell(int i) const { return cells_[i]; }
  std::array<double, 2> center(int i) const;
  std::array<double, 2> center_of(int ix, int iy) const;

  /// FNV-1a hash of the mask bitmap, used for cache keys.
  std::uint64_t mask_hash() const;
  std::string describe() const;

 private:
  int dim_;
  std::array<double, 4> box_;
  double h_;
  MaskSpec mask_;
  int nx_ = 0, ny_ = 1;
  std::vector<int> lookup_;  // box cell -> interior index or -1
  std::vector<std::array<int, 2>> cells_;
};

double lp_norm_pow(const GridFunction& u, const Domain& d, double p);
double lp_norm(const GridFunction& u, const Domain& d, double p);

double grad_seminorm_pow(const GridFunction& u, const Domain& d, double p);
double grad_seminorm(const GridFunction& u, const Domain& d, double p);
/// (1/p) times the gradient of grad_seminorm_pow with respect to the cell values.
GridFunction grad_seminorm_dual(const GridFunction& u, const Domain& d, double p);

double volume(const Domain& d);

enum class TestKind { Bump, EigenGuess, RandomSmooth, RandomRough };

TestKind parse_test_kind(const std::string& name);

GridFunction test_function(TestKind kind, const Domain& d, std::uint64_t seed = 0);

}  // namespace superlap
