#pragma once

#include <cmath>

namespace superlap::detail {

// |x|^p and |x|^{p-2} x with specialized exponents that show up in the hot loops.
struct Pow2 {
  double abs(double x) const { return x * x; }
  double odd(double x) const { return x; }
};

struct Pow15 {
  double abs(double x) const {
    const double a = std::abs(x);
    return a * std::sqrt(a);
  }
  double odd(double x) const { return std::copysign(std::sqrt(std::abs(x)), x); }
};

struct Pow3 {
  double abs(double x) const {
    const double a = std::abs(x);
    return a * a * a;
  }
  double odd(double x) const { return x * std::abs(x); }
};

struct PowAny {
  double p;
  double abs(double x) const { return x == 0.0 ? 0.0 : std::pow(std::abs(x), p); }
  double odd(double x) const { return x == 0.0 ? 0.0 : std::copysign(std::pow(std::abs(x), p - 1.0), x); }
};

template <class F>
decltype(auto) with_power(double p, F&& f) {
  if (p == 2.0) return f(Pow2{});
  if (p == 1.5) return f(Pow15{});
  if (p == 3.0) return f(Pow3{});
  return f(PowAny{p});
}

}  // namespace superlap::detail
