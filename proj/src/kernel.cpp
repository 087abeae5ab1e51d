#include "superlap/kernel.hpp"

#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "powers.hpp"
#include "superlap/error.hpp"
#include "superlap/quadrature.hpp"

namespace superlap {

double gamma_fn(double x) {
  require(std::isfinite(x) && x > 0.0, ErrorCode::DomainError, "gamma_fn requires x > 0");
  static constexpr double g = 7.0;
  static constexpr std::array<double, 9> coef = {
      0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
      771.32342877765313,   -176.61502916214059,   12.507343278686905,
      -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
  constexpr double pi = std::numbers::pi;
  if (x < 0.5) return pi / (std::sin(pi * x) * gamma_fn(1.0 - x));
  const double z = x - 1.0;
  double a = coef[0];
  for (int i = 1; i < 9; ++i) a += coef[i] / (z + i);
  const double t = z + g + 0.5;
  return std::sqrt(2.0 * pi) * std::pow(t, z + 0.5) * std::exp(-t) * a;
}

double normalizing_constant(int n_dim, double s, double p) {
  require(s > 0.0 && s < 1.0, ErrorCode::DomainError,
          "normalizing_constant needs s in (0,1); use the s=0 or s=1 seminorm");
  require(p > 1.0, ErrorCode::DomainError, "normalizing_constant needs p > 1");
  require(n_dim >= 1, ErrorCode::DomainError, "normalizing_constant needs N >= 1");
  const double num = s * std::pow(2.0, 2.0 * s - 1.0) * gamma_fn((p * s + p + n_dim - 2.0) / 2.0);
  const double den = std::pow(std::numbers::pi, n_dim / 2.0) * gamma_fn(1.0 - s);
  return num / den;
}

namespace {

// Integral over the part of R^2 outside the box [x0,x1]x[y0,y1] of
// |x - y|^{-(2+sigma)}, as a sum over faces of d^{-sigma}/sigma * int cos^sigma.
double box_exterior_tail_2d(const std::array<double, 4>& box, double x, double y, double sigma) {
  auto face = [&](double dist, double lo, double hi) {
    const double a = std::atan(lo / dist), b = std::atan(hi / dist);
    auto f = [sigma](double phi) { return std::pow(std::cos(phi), sigma); };
    const double integral = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 15, 1e-14);
    return std::pow(dist, -sigma) * integral / sigma;
  };
  return face(x - box[0], box[2] - y, box[3] - y) + face(box[1] - x, box[2] - y, box[3] - y) +
         face(y - box[2], box[0] - x, box[1] - x) + face(box[3] - y, box[0] - x, box[1] - x);
}

// Integral over the cell centered at (cx,cy) with side h of |x - y|^{-(2+sigma)}.
double cell_integral_2d(double x, double y, double cx, double cy, double h, double sigma,
                        const QuadratureRule& far, const QuadratureRule& near) {
  const double dist = std::hypot(cx - x, cy - y);
  const double expo = -(2.0 + sigma) / 2.0;
  auto sum_rule = [&](const QuadratureRule& r, double ox, double oy, double side) {
    double acc = 0.0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) {
      const double px = ox + side * r.nodes[i] - x;
      for (std::size_t j = 0; j < r.nodes.size(); ++j) {
        const double py = oy + side * r.nodes[j] - y;
        acc += r.weights[i] * r.weights[j] * std::pow(px * px + py * py, expo);
      }
    }
    return acc * side * side;
  };
  const double ox = cx - 0.5 * h, oy = cy - 0.5 * h;
  if (dist > 3.0 * h) return sum_rule(far, ox, oy, h);
  constexpr int sub = 4;
  const double hs = h / sub;
  double acc = 0.0;
  for (int a = 0; a < sub; ++a)
    for (int b = 0; b < sub; ++b) acc += sum_rule(near, ox + a * hs, oy + b * hs, hs);
  return acc;
}

}  // namespace

KernelTable assemble(const Domain& d, double s, double p) {
  require(s > 0.0 && s < 1.0, ErrorCode::DomainError, "assemble needs s in (0,1)");
  KernelTable t;
  t.kind = KernelKind::Fractional;
  t.s = s;
  t.p = p;
  t.c = normalizing_constant(d.dim(), s, p);
  t.n = d.n();
  t.cell_volume = d.cell_volume();
  const int n = d.n();
  const double sigma = s * p;
  const double expo = -(d.dim() + sigma) / 2.0;
  const double num = t.cell_volume * t.cell_volume;

  t.W.setZero(n, n);
  for (int j = 0; j < n; ++j) {
    const auto cj = d.center(j);
    for (int i = 0; i < j; ++i) {
      const auto ci = d.center(i);
      const double dx = ci[0] - cj[0], dy = ci[1] - cj[1];
      const double w = num * std::pow(dx * dx + dy * dy, expo);
      t.W(i, j) = w;
      t.W(j, i) = w;
    }
  }
  t.W_rows = t.W.rowwise().sum();

  t.tail.resize(n);
  if (d.dim() == 1) {
    // Interior cells are contiguous; the complement is two half-lines.
    int lo = d.nx(), hi = -1;
    for (int i = 0; i < n; ++i) {
      lo = std::min(lo, d.cell(i)[0]);
      hi = std::max(hi, d.cell(i)[0]);
    }
    const double a = d.box()[0] + lo * d.h();
    const double b = d.box()[0] + (hi + 1) * d.h();
    for (int i = 0; i < n; ++i) {
      const double x = d.center(i)[0];
      t.tail[i] = (std::pow(x - a, -sigma) + std::pow(b - x, -sigma)) / sigma;
    }
    return t;
  }

  std::vector<std::array<double, 2>> holes;
  for (int iy = 0; iy < d.ny(); ++iy)
    for (int ix = 0; ix < d.nx(); ++ix)
      if (d.index(ix, iy) < 0) holes.push_back(d.center_of(ix, iy));
  const auto far = gauss_legendre(3, 0.0, 1.0);
  const auto near = gauss_legendre(4, 0.0, 1.0);
  for (int i = 0; i < n; ++i) {
    const auto c = d.center(i);
    double acc = box_exterior_tail_2d(d.box(), c[0], c[1], sigma);
    for (const auto& e : holes) acc += cell_integral_2d(c[0], c[1], e[0], e[1], d.h(), sigma, far, near);
    t.tail[i] = acc;
  }
  return t;
}

KernelTable make_table(const Domain& d, double s, double p) {
  require(s >= 0.0 && s <= 1.0, ErrorCode::DomainError, "order s must lie in [0,1]");
  require(p > 1.0, ErrorCode::DomainError, "exponent p must exceed 1");
  if (s > 0.0 && s < 1.0) return assemble(d, s, p);
  KernelTable t;
  t.kind = s == 0.0 ? KernelKind::Lebesgue : KernelKind::Gradient;
  t.s = s;
  t.p = p;
  t.c = 1.0;
  t.n = d.n();
  t.cell_volume = d.cell_volume();
  return t;
}

double seminorm_pow(const GridFunction& u, const KernelTable& t, const Domain& d) {
  switch (t.kind) {
    case KernelKind::Lebesgue: return lp_norm_pow(u, d, t.p);
    case KernelKind::Gradient: return grad_seminorm_pow(u, d, t.p);
    case KernelKind::Fractional: break;
  }
  const int n = t.n;
  return detail::with_power(t.p, [&](auto pw) {
    double pairs = 0.0, ext = 0.0;
    for (int j = 0; j < n; ++j) {
      const double* col = t.W.col(j).data();
      const double uj = u[j];
      double acc = 0.0;
      for (int i = 0; i < j; ++i) acc += col[i] * pw.abs(u[i] - uj);
      pairs += acc;
      ext += t.tail[j] * pw.abs(uj);
    }
    return t.c * 2.0 * (pairs + t.cell_volume * ext);
  });
}

double seminorm(const GridFunction& u, const KernelTable& t, const Domain& d) {
  return std::pow(seminorm_pow(u, t, d), 1.0 / t.p);
}

GridFunction seminorm_dual(const GridFunction& u, const KernelTable& t, const Domain& d) {
  switch (t.kind) {
    case KernelKind::Lebesgue: {
      GridFunction a(u.size());
      detail::with_power(t.p, [&](auto pw) {
        for (Eigen::Index i = 0; i < u.size(); ++i) a[i] = pw.odd(u[i]) * t.cell_volume;
        return 0;
      });
      return a;
    }
    case KernelKind::Gradient: return grad_seminorm_dual(u, d, t.p);
    case KernelKind::Fractional: break;
  }
  const int n = t.n;
  if (t.p == 2.0) {
    GridFunction a = t.W_rows.cwiseProduct(u) - t.W * u + t.cell_volume * t.tail.cwiseProduct(u);
    return 2.0 * t.c * a;
  }
  GridFunction a = GridFunction::Zero(n);
  detail::with_power(t.p, [&](auto pw) {
    for (int j = 0; j < n; ++j) {
      const double* col = t.W.col(j).data();
      const double uj = u[j];
      double aj = 0.0;
      for (int i = 0; i < j; ++i) {
        const double v = col[i] * pw.odd(u[i] - uj);
        a[i] += v;
        aj -= v;
      }
      a[j] += aj + t.cell_volume * t.tail[j] * pw.odd(uj);
    }
    return 0;
  });
  return 2.0 * t.c * a;
}

// ---------------------------------------------------------------------------
// Cache

namespace {

constexpr char kMagic[4] = {'S', 'L', 'K', 'T'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void write_pod(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
bool read_pod(std::istream& is, T& v) {
  return static_cast<bool>(is.read(reinterpret_cast<char*>(&v), sizeof(T)));
}

}  // namespace

KernelCache& KernelCache::global() {
  static KernelCache cache;
  return cache;
}

KernelCache::Key KernelCache::key_of(const Domain& d, double s, double p) {
  const auto& b = d.box();
  return {d.dim(), b[0], b[1], b[2], b[3], d.h(), d.mask_hash(), s, p};
}

std::filesystem::path KernelCache::file_for(const Key& key, const std::filesystem::path& dir) const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&](const void* data, std::size_t len) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= bytes[i];
      h *= 1099511628211ULL;
    }
  };
  std::apply([&](const auto&... field) { (mix(&field, sizeof(field)), ...); }, key);
  char name[40];
  std::snprintf(name, sizeof(name), "kernel_%016llx.bin", static_cast<unsigned long long>(h));
  return dir / name;
}

void KernelCache::store(const Key& key, const KernelTable& t, const std::filesystem::path& file) const {
  std::ofstream os(file, std::ios::binary);
  if (!os) return;
  os.write(kMagic, 4);
  write_pod(os, kVersion);
  std::apply([&](const auto&... field) { (write_pod(os, field), ...); }, key);
  write_pod(os, static_cast<std::int32_t>(t.kind));
  write_pod(os, t.c);
  write_pod(os, static_cast<std::int32_t>(t.n));
  write_pod(os, t.cell_volume);
  os.write(reinterpret_cast<const char*>(t.tail.data()), sizeof(double) * t.tail.size());
  const std::int64_t wsize = t.W.size();
  write_pod(os, wsize);
  os.write(reinterpret_cast<const char*>(t.W.data()), sizeof(double) * wsize);
}

std::shared_ptr<const KernelTable> KernelCache::load(const Key& key, const std::filesystem::path& file) const {
  std::ifstream is(file, std::ios::binary);
  if (!is) return nullptr;
  char magic[4];
  std::uint32_t version = 0;
  if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0 || !read_pod(is, version) || version != kVersion)
    return nullptr;
  Key stored;
  bool ok = true;
  std::apply([&](auto&... field) { ((ok = ok && read_pod(is, field)), ...); }, stored);
  if (!ok || stored != key) return nullptr;
  auto t = std::make_shared<KernelTable>();
  std::int32_t kind = 0, n = 0;
  std::int64_t wsize = 0;
  if (!read_pod(is, kind) || !read_pod(is, t->c) || !read_pod(is, n) || !read_pod(is, t->cell_volume)) return nullptr;
  t->kind = static_cast<KernelKind>(kind);
  t->s = std::get<7>(key);
  t->p = std::get<8>(key);
  t->n = n;
  t->tail.resize(n);
  if (!is.read(reinterpret_cast<char*>(t->tail.data()), sizeof(double) * n) || !read_pod(is, wsize)) return nullptr;
  if (wsize != 0) {
    if (wsize != static_cast<std::int64_t>(n) * n) return nullptr;
    t->W.resize(n, n);
    if (!is.read(reinterpret_cast<char*>(t->W.data()), sizeof(double) * wsize)) return nullptr;
    t->W_rows = t->W.rowwise().sum();
  }
  return t;
}

std::shared_ptr<const KernelTable> KernelCache::get(const Domain& d, double s, double p) {
  const Key key = key_of(d, s, p);
  {
    std::lock_guard lock(mutex_);
    if (auto it = tables_.find(key); it != tables_.end()) return it->second;
  }
  std::shared_ptr<const KernelTable> table;
  std::optional<std::filesystem::path> dir;
  {
    std::lock_guard lock(mutex_);
    dir = dir_;
  }
  const bool fractional = s > 0.0 && s < 1.0;
  if (dir && fractional) table = load(key, file_for(key, *dir));
  if (!table) {
    table = std::make_shared<const KernelTable>(make_table(d, s, p));
    if (dir && fractional) store(key, *table, file_for(key, *dir));
  }
  std::lock_guard lock(mutex_);
  auto [it, inserted] = tables_.emplace(key, table);
  return it->second;
}

void KernelCache::set_directory(std::optional<std::filesystem::path> dir) {
  std::lock_guard lock(mutex_);
  if (dir) std::filesystem::create_directories(*dir);
  dir_ = std::move(dir);
}

void KernelCache::clear() {
  std::lock_guard lock(mutex_);
  tables_.clear();
}

std::size_t KernelCache::size() const {
  std::lock_guard lock(mutex_);
  return tables_.size();
}

}  // namespace superlap
