#pragma once

#include <functional>
#include <vector>

#include "kt/chart.hpp"

namespace kt {

// A curve sampled at uniform arclength. The sample count is always odd
// (2n + 1 points) so consumers can step through (left, mid, right) triples
// with genuine midpoints. Coordinates are stored unwrapped: consecutive
// samples never jump across a periodic seam.
struct SampledCurve {
  std::vector<double> t;   // arclength parameter, t[k] = k * length / (2n)
  std::vector<Vec> p;      // coordinates, continuous across periodic seams
  std::vector<Vec> T;      // unit tangents (coordinate components)
  std::vector<Vec> N;      // J T, the oriented unit normal (2-D charts only)
  std::vector<double> kappa;  // geodesic curvature at each sample (2-D only)
  double length = 0.0;
  bool closed = false;
  // Largest unit-norm correction applied during integration (integrated
  // curves renormalize their tangent every 64 steps; 0 for reparameterized
  // curves).
  double max_renorm_correction = 0.0;

  int steps() const { return (static_cast<int>(p.size()) - 1) / 2; }
  int samples() const { return static_cast<int>(p.size()); }
  double spacing() const { return length / (samples() - 1); }
};

using CurveFn = std::function<Vec(double)>;
using KappaFn = std::function<double(double)>;

struct CurveOptions {
  int steps = 400;            // n; the curve carries 2n + 1 samples
  double closed_tol = 1e-8;   // endpoint metric distance that counts as closed
};

// Reparameterize the coordinate curve fn over [t0, t1] by arclength.
// fn must stay inside the chart and be evaluable in a small neighborhood of
// the interval; speed must be bounded away from zero (else ZeroSpeed).
SampledCurve reparam_arclength(const MetricChart& chart, const CurveFn& fn, double t0,
                               double t1, const CurveOptions& opts = {});

// Arclength sampling of the coordinate-straight segment a -> b. Tangent
// directions are exact (the derivative is the constant b - a), so short
// segments stay free of differencing noise.
SampledCurve straight_segment(const MetricChart& chart, const Vec& a, const Vec& b,
                              const CurveOptions& opts = {});

// Integrate the geodesic equation from p0 with initial direction v0 (any
// nonzero vector; it is normalized) for the given arclength.
SampledCurve geodesic(const MetricChart& chart, const Vec& p0, const Vec& v0,
                      double length, const CurveOptions& opts = {});

// Integrate the unit-speed curve whose geodesic curvature at arclength s is
// kappa(s), starting at p0 with unit tangent along T0. 2-D charts only.
SampledCurve curve_from_curvature(const MetricChart& chart, const Vec& p0,
                                  const Vec& T0, const KappaFn& kappa, double length,
                                  const CurveOptions& opts = {});

// Geodesic curvature recomputed from the stored samples alone (finite
// differences of the tangent field plus the Christoffel correction).
std::vector<double> geodesic_curvature(const MetricChart& chart,
                                       const SampledCurve& curve);

// The same trace traversed backwards: tangents and normals flip, the
// geodesic curvature changes sign.
SampledCurve reversed_curve(const SampledCurve& curve);

// Cubic Lagrange interpolation of per-sample data at arclength s.
double interp_sample(const SampledCurve& curve, const std::vector<double>& values,
                     double s);
Vec interp_point(const SampledCurve& curve, double s);
Vec interp_tangent(const SampledCurve& curve, double s);

}  // namespace kt
