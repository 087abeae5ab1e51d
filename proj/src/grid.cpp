#include "superlap/grid.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "superlap/error.hpp"
#include "superlap/rng.hpp"

namespace superlap {

namespace {

int cells_along(double lo, double hi, double h) {
  require(hi > lo, ErrorCode::InvalidArgument, "box axis must have hi > lo");
  const double len = hi - lo;
  const long n = std::lround(len / h);
  require(n >= 1 && std::abs(n * h - len) <= 1e-9 * len, ErrorCode::InvalidArgument,
          "cell width h must divide every box side");
  return static_cast<int>(n);
}

bool in_mask(const MaskSpec& m, int dim, double x, double y) {
  switch (m.kind) {
    case MaskKind::Full: return true;
    case MaskKind::Interval: return x > m.params[0] && x < m.params[1];
    case MaskKind::Rectangle:
      return x > m.params[0] && x < m.params[1] && (dim == 1 || (y > m.params[2] && y < m.params[3]));
    case MaskKind::Disk: {
      const double dx = x - m.params[0], dy = dim == 1 ? 0.0 : y - m.params[1];
      return dx * dx + dy * dy < m.params[2] * m.params[2];
    }
  }
  return false;
}

}  // namespace

Domain::Domain(int dim, std::array<double, 4> box, double h, MaskSpec mask)
    : dim_(dim), box_(box), h_(h), mask_(mask) {
  require(dim == 1 || dim == 2, ErrorCode::InvalidArgument, "dim must be 1 or 2");
  require(h > 0.0 && std::isfinite(h), ErrorCode::InvalidArgument, "h must be positive");
  require(dim == 2 || mask.kind != MaskKind::Rectangle, ErrorCode::InvalidArgument,
          "rectangle mask needs dim = 2");
  require(dim == 1 || mask.kind != MaskKind::Interval, ErrorCode::InvalidArgument,
          "interval mask needs dim = 1");
  nx_ = cells_along(box_[0], box_[1], h_);
  ny_ = dim_ == 2 ? cells_along(box_[2], box_[3], h_) : 1;
  lookup_.assign(static_cast<std::size_t>(nx_) * ny_, -1);
  for (int iy = 0; iy < ny_; ++iy) {
    for (int ix = 0; ix < nx_; ++ix) {
      const auto c = center_of(ix, iy);
      if (in_mask(mask_, dim_, c[0], c[1])) {
        lookup_[static_cast<std::size_t>(iy) * nx_ + ix] = static_cast<int>(cells_.size());
        cells_.push_back({ix, iy});
      }
    }
  }
  require(!cells_.empty(), ErrorCode::InvalidArgument, "mask contains no cell centers");
}

Domain Domain::interval(double a, double b, int n) { return Domain(1, {a, b, 0.0, 0.0}, (b - a) / n); }

Domain Domain::square(double a, double b, int n) { return Domain(2, {a, b, a, b}, (b - a) / n); }

double Domain::cell_volume() const { return dim_ == 1 ? h_ : h_ * h_; }

int Domain::index(int ix, int iy) const {
  if (ix < 0 || ix >= nx_ || iy < 0 || iy >= ny_) return -1;
  return lookup_[static_cast<std::size_t>(iy) * nx_ + ix];
}

std::array<double, 2> Domain::center_of(int ix, int iy) const {
  return {box_[0] + (ix + 0.5) * h_, dim_ == 2 ? box_[2] + (iy + 0.5) * h_ : 0.0};
}

std::array<double, 2> Domain::center(int i) const { return center_of(cells_[i][0], cells_[i][1]); }

std::uint64_t Domain::mask_hash() const {
  std::uint64_t hsh = 1469598103934665603ULL;
  auto mix = [&](std::uint64_t v) {
    for (int b = 0; b < 8; ++b) {
      hsh ^= (v >> (8 * b)) & 0xffU;
      hsh *= 1099511628211ULL;
    }
  };
  mix(static_cast<std::uint64_t>(nx_));
  mix(static_cast<std::uint64_t>(ny_));
  for (int v : lookup_) mix(v >= 0 ? 1U : 0U);
  return hsh;
}

std::string Domain::describe() const {
  std::ostringstream os;
  os << "dim=" << dim_ << " nx=" << nx_ << " ny=" << ny_ << " h=" << h_ << " n=" << n();
  return os.str();
}

double lp_norm_pow(const GridFunction& u, const Domain& d, double p) {
  double acc = 0.0;
  if (p == 2.0) {
    acc = u.squaredNorm();
  } else {
    for (Eigen::Index i = 0; i < u.size(); ++i) acc += std::pow(std::abs(u[i]), p);
  }
  return acc * d.cell_volume();
}

double lp_norm(const GridFunction& u, const Domain& d, double p) {
  return std::pow(lp_norm_pow(u, d, p), 1.0 / p);
}

namespace {

// Visits every forward-difference stencil, including the ghost row/column at
// index -1, passing the gradient and the interior indices it depends on.
template <class F>
void for_each_gradient(const GridFunction& u, const Domain& d, F&& f) {
  const double inv_h = 1.0 / d.h();
  auto val = [&](int k) { return k >= 0 ? u[k] : 0.0; };
  if (d.dim() == 1) {
    for (int ix = -1; ix < d.nx(); ++ix) {
      const int k0 = d.index(ix), k1 = d.index(ix + 1);
      if (k0 < 0 && k1 < 0) continue;
      const double gx = (val(k1) - val(k0)) * inv_h;
      f(gx, 0.0, k0, k1, -1);
    }
    return;
  }
  for (int iy = -1; iy < d.ny(); ++iy) {
    for (int ix = -1; ix < d.nx(); ++ix) {
      const int k0 = d.index(ix, iy), kx = d.index(ix + 1, iy), ky = d.index(ix, iy + 1);
      if (k0 < 0 && kx < 0 && ky < 0) continue;
      const double gx = (val(kx) - val(k0)) * inv_h;
      const double gy = (val(ky) - val(k0)) * inv_h;
      f(gx, gy, k0, kx, ky);
    }
  }
}

}  // namespace

double grad_seminorm_pow(const GridFunction& u, const Domain& d, double p) {
  double acc = 0.0;
  for_each_gradient(u, d, [&](double gx, double gy, int, int, int) {
    const double g2 = gx * gx + gy * gy;
    acc += p == 2.0 ? g2 : std::pow(g2, 0.5 * p);
  });
  return acc * d.cell_volume();
}

double grad_seminorm(const GridFunction& u, const Domain& d, double p) {
  return std::pow(grad_seminorm_pow(u, d, p), 1.0 / p);
}

GridFunction grad_seminorm_dual(const GridFunction& u, const Domain& d, double p) {
  GridFunction a = GridFunction::Zero(u.size());
  const double scale = d.cell_volume() / d.h();
  for_each_gradient(u, d, [&](double gx, double gy, int k0, int kx, int ky) {
    const double g2 = gx * gx + gy * gy;
    if (g2 == 0.0) return;
    const double w = (p == 2.0 ? 1.0 : std::pow(g2, 0.5 * p - 1.0)) * scale;
    if (kx >= 0) a[kx] += w * gx;
    if (ky >= 0) a[ky] += w * gy;
    if (k0 >= 0) a[k0] -= w * (gx + gy);
  });
  return a;
}

double volume(const Domain& d) { return d.volume(); }

TestKind parse_test_kind(const std::string& name) {
  if (name == "bump") return TestKind::Bump;
  if (name == "eigen-guess") return TestKind::EigenGuess;
  if (name == "random-smooth") return TestKind::RandomSmooth;
  if (name == "random-rough") return TestKind::RandomRough;
  throw Error(ErrorCode::InvalidArgument, "unknown test function kind '" + name + "'");
}

GridFunction test_function(TestKind kind, const Domain& d, std::uint64_t seed) {
  // Normalized coordinates over the bounding box of the interior cells.
  int x0 = d.nx(), x1 = -1, y0 = d.ny(), y1 = -1;
  for (int i = 0; i < d.n(); ++i) {
    const auto c = d.cell(i);
    x0 = std::min(x0, c[0]);
    x1 = std::max(x1, c[0]);
    y0 = std::min(y0, c[1]);
    y1 = std::max(y1, c[1]);
  }
  auto tx = [&](int ix) { return (ix - x0 + 0.5) / (x1 - x0 + 1); };
  auto ty = [&](int iy) { return (iy - y0 + 0.5) / (y1 - y0 + 1); };

  GridFunction u(d.n());
  Rng rng(seed);
  constexpr double pi = std::numbers::pi;
  switch (kind) {
    case TestKind::Bump:
      for (int i = 0; i < d.n(); ++i) {
        const auto c = d.cell(i);
        const double a = 4.0 * tx(c[0]) * (1.0 - tx(c[0]));
        const double b = d.dim() == 2 ? 4.0 * ty(c[1]) * (1.0 - ty(c[1])) : 1.0;
        u[i] = a * a * b * b;
      }
      break;
    case TestKind::EigenGuess:
      for (int i = 0; i < d.n(); ++i) {
        const auto c = d.cell(i);
        u[i] = std::sin(pi * tx(c[0])) * (d.dim() == 2 ? std::sin(pi * ty(c[1])) : 1.0);
      }
      break;
    case TestKind::RandomSmooth: {
      const int kmax = d.dim() == 1 ? 6 : 4;
      const int kymax = d.dim() == 1 ? 1 : kmax;
      std::vector<double> coef(static_cast<std::size_t>(kmax * kymax));
      for (int j = 0; j < kmax; ++j)
        for (int k = 0; k < kymax; ++k) coef[j * kymax + k] = rng.normal() / ((j + 1.0) * (k + 1.0));
      for (int i = 0; i < d.n(); ++i) {
        const auto c = d.cell(i);
        double v = 0.0;
        for (int j = 0; j < kmax; ++j) {
          const double sx = std::sin((j + 1) * pi * tx(c[0]));
          for (int k = 0; k < kymax; ++k) {
            const double sy = d.dim() == 2 ? std::sin((k + 1) * pi * ty(c[1])) : 1.0;
            v += coef[j * kymax + k] * sx * sy;
          }
        }
        u[i] = v;
      }
      break;
    }
    case TestKind::RandomRough:
      for (int i = 0; i < d.n(); ++i) u[i] = rng.uniform(-1.0, 1.0);
      break;
  }
  return u;
}

}  // namespace superlap
