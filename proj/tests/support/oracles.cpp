#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

namespace oracle {

using hp = boost::multiprecision::cpp_bin_float_50;

double gamma_hp(double x) { return static_cast<double>(boost::math::tgamma(hp(x))); }

double normalizing_constant_hp(int n_dim, double s, double p) {
  const hp S(s), P(p), N(n_dim);
  const hp pi = boost::math::constants::pi<hp>();
  const hp num = S * pow(hp(2), 2 * S - 1) * boost::math::tgamma((P * S + P + N - 2) / 2);
  const hp den = pow(pi, N / 2) * boost::math::tgamma(1 - S);
  return static_cast<double>(num / den);
}

double tail_1d(double x, double a, double b, double sigma) {
  boost::math::quadrature::exp_sinh<double> integrator;
  auto f = [sigma](double r) { return std::pow(r, -(1.0 + sigma)); };
  // y = x - (x - a) - r and y = x + (b - x) + r, r > 0.
  const double left = integrator.integrate([&](double r) { return f((x - a) + r); });
  const double right = integrator.integrate([&](double r) { return f((b - x) + r); });
  return left + right;
}

double tail_box_2d(const std::array<double, 4>& box, double x, double y, double sigma) {
  auto r_exit = [&](double phi) {
    const double c = std::cos(phi), s = std::sin(phi);
    double r = std::numeric_limits<double>::infinity();
    if (c > 0) r = std::min(r, (box[1] - x) / c);
    if (c < 0) r = std::min(r, (box[0] - x) / c);
    if (s > 0) r = std::min(r, (box[3] - y) / s);
    if (s < 0) r = std::min(r, (box[2] - y) / s);
    return r;
  };
  auto f = [&](double phi) { return std::pow(r_exit(phi), -sigma) / sigma; };
  // Split at the corner directions, where r_exit has kinks.
  std::array<double, 6> cuts = {std::atan2(box[2] - y, box[0] - x), std::atan2(box[2] - y, box[1] - x),
                                std::atan2(box[3] - y, box[1] - x), std::atan2(box[3] - y, box[0] - x)};
  const double two_pi = 2.0 * boost::math::constants::pi<double>();
  for (int i = 0; i < 4; ++i)
    if (cuts[i] < 0) cuts[i] += two_pi;
  std::sort(cuts.begin(), cuts.begin() + 4);
  double total = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double lo = cuts[i];
    const double hi = i + 1 < 4 ? cuts[i + 1] : cuts[0] + two_pi;
    total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, hi, 20, 1e-14);
  }
  return total;
}

}  // namespace oracle
