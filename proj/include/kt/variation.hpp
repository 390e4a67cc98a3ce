#pragma once

#include <vector>

#include "kt/curve.hpp"
#include "kt/transport.hpp"

namespace kt {

// A rigid variation of a base curve: neighbors at parameter -dtau and +dtau
// sharing the base curve's geodesic curvature function, so all three are
// congruent. Sampled on the same arclength grid as the base.
struct CurveFamily {
  SampledCurve minus;
  SampledCurve base;
  SampledCurve plus;
  double dtau = 0.0;
};

// Build the variation generated by a jet at the start of the curve: move the
// start point along the coordinate-straight transversal c(tau) = p0 + tau X,
// carry the start tangent along c with the jet's rotation operator
// (nabla_c' T = -xi12 J T), and re-integrate the curve from the displaced
// initial data with the shared curvature profile.
CurveFamily rigid_variation(const MetricChart& chart, const SampledCurve& curve,
                            const Jet2& jet0, double dtau);

// First-order variation field: central difference of the family's curves at
// each sample, (gamma_+ - gamma_-) / (2 dtau), unwrapped across periodic
// seams. Approximates the transported jet's field part to O(dtau^2).
std::vector<Vec> variation_field(const MetricChart& chart, const CurveFamily& family);

}  // namespace kt
