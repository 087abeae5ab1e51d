#pragma once

#include <vector>

namespace superlap {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// M-point Gauss-Legendre rule mapped to [a, b].
QuadratureRule gauss_legendre(int m, double a = -1.0, double b = 1.0);

}  // namespace superlap
