#pragma once

#include <functional>

#include "kt/geometry.hpp"

namespace kt {

// One-dimensional derivative helpers shared by every finite-difference user
// in the library. g is the restriction of a field to a line, g(s) = f(p + s*d).

// 4th-order central first derivative, five-point stencil:
//   g'(0) = [g(-2h) - 8 g(-h) + 8 g(h) - g(2h)] / (12 h) + O(h^4)
template <class G>
double central4(G&& g, double h) {
  return (g(-2.0 * h) - 8.0 * g(-h) + 8.0 * g(h) - g(2.0 * h)) / (12.0 * h);
}

// One Richardson level on top of the 4th-order stencil (step ratio 2),
// cancelling the leading h^4 term: (16 D(h/2) - D(h)) / 15.
template <class G>
double central4_richardson(G&& g, double h) {
  const double coarse = central4(g, h);
  const double fine = central4(g, 0.5 * h);
  return (16.0 * fine - coarse) / 15.0;
}

// 2nd-order central first derivative (used only where a documented option
// selects it, e.g. the outermost curvature-jet level).
template <class G>
double central2(G&& g, double h) {
  return (g(h) - g(-h)) / (2.0 * h);
}

// Directional derivative of a multivariate function along direction d.
template <class F>
double directional4(F&& f, const Vec& p, const Vec& d, double h) {
  return central4([&](double s) { return f(Vec(p + s * d)); }, h);
}

template <class F>
double directional2(F&& f, const Vec& p, const Vec& d, double h) {
  return central2([&](double s) { return f(Vec(p + s * d)); }, h);
}

}  // namespace kt
