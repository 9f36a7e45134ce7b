#pragma once

#include <span>
#include <vector>

#include "kdvcrit/common.hpp"

namespace kdvcrit::quad {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule, nodes by Newton iteration on P_n.
const GaussRule& gauss_legendre(int n);

/// Composite rule with `panels` equal panels of an n-point Gauss rule on [a, b].
template <class F>
auto composite(F&& f, double a, double b, int panels, int n = 64) {
  const GaussRule& g = gauss_legendre(n);
  using R = decltype(f(a));
  R acc{};
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    R part{};
    for (int i = 0; i < n; ++i) part += g.weights[i] * f(mid + 0.5 * h * g.nodes[i]);
    acc += part * (0.5 * h);
  }
  return acc;
}

/// Trapezoid rule over uniformly spaced samples.
template <class T>
T trapezoid(std::span<const T> y, double h) {
  if (y.size() < 2) return T{};
  T acc = 0.5 * (y.front() + y.back());
  for (std::size_t i = 1; i + 1 < y.size(); ++i) acc += y[i];
  return acc * h;
}

}  // namespace kdvcrit::quad
