#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace solar {

struct GaussRule {
  std::vector<double> nodes;    // on (-1, 1), ascending
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule.
GaussRule gauss_legendre(std::size_t n);

/// Integral of f over [a, b] with an n-point Gauss-Legendre rule.
double integrate_gauss(const std::function<double(double)>& f, double a, double b,
                       std::size_t n = 64);

}  // namespace solar
