#pragma once

#include <array>

// Reference values computed independently of the library code paths.
namespace oracle {

/// Gamma at 50 decimal digits, rounded to double.
double gamma_hp(double x);

/// c_{N,s,p} from the closed form, evaluated with gamma_hp.
double normalizing_constant_hp(int n_dim, double s, double p);

/// Integral over the complement of (a,b) of |x-y|^{-(1+sigma)}, by
/// double-exponential quadrature on each half-line.
double tail_1d(double x, double a, double b, double sigma);

/// Integral over the complement of a box of |x-y|^{-(2+sigma)}, in polar
/// coordinates around x: integral over angle of r_exit(phi)^{-sigma}/sigma.
double tail_box_2d(const std::array<double, 4>& box, double x, double y, double sigma);

}  // namespace oracle
