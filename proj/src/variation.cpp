#include "kt/variation.hpp"

#include <cmath>

#include "kt/errors.hpp"
#include "kt/frame.hpp"

namespace kt {

namespace {

struct TransversalState {
  Vec p;  // point reached on the transversal
  Vec T;  // unit tangent carried to that point (coordinate components)
};

/**
 * Carry the start tangent from tau = 0 to tau = tau_end along the straight
 * transversal c(tau) = p0 + tau * X0. The covariant equation is
 *
 *   nabla_{c'} T = -xi12 J T,
 *
 * i.e. in coordinates dT/dtau = -xi12 J(c) T - Gamma_c(X0, T). With X0 = 0 the
 * transversal degenerates to the point p0 and only the rotation term acts.
 */
TransversalState carry_start(const MetricChart& chart, const Vec& p0, const Vec& T0,
                             const Vec& X0, double xi12, double tau_end) {
  const int steps = 32;
  const double h = tau_end / steps;
  auto rhs = [&](double tau, const Vec& T) -> Vec {
    const Vec c = p0 + tau * X0;
    Vec out = -xi12 * (rotation_j(chart, c) * T);
    out -= chart.gamma(c, X0, T);
    return out;
  };
  Vec T = T0;
  for (int i = 0; i < steps; ++i) {
    const double tau = i * h;
    const Vec k1 = rhs(tau, T);
    const Vec k2 = rhs(tau + 0.5 * h, T + 0.5 * h * k1);
    const Vec k3 = rhs(tau + 0.5 * h, T + 0.5 * h * k2);
    const Vec k4 = rhs(tau + h, T + h * k3);
    T += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return {p0 + tau_end * X0, T};
}

}  // namespace

CurveFamily rigid_variation(const MetricChart& chart, const SampledCurve& curve,
                            const Jet2& jet0, double dtau) {
  if (chart.dim() != 2) {
    throw SchemaError("rigid_variation: chart must be 2-dimensional");
  }
  if (!(dtau > 0.0)) {
    throw SchemaError("rigid_variation: dtau must be positive");
  }
  if (curve.samples() < 5) {
    throw SchemaError("rigid_variation: curve has too few samples");
  }

  const Vec& p0 = curve.p[0];
  const Frame2D fr = orthonormal_frame(chart, p0);
  const Vec X0 = jet0[0] * Vec(fr.e1) + jet0[1] * Vec(fr.e2);
  const double xi12 = jet0[2];

  const KappaFn shared_kappa = [&curve](double s) {
    return interp_sample(curve, curve.kappa, s);
  };
  CurveOptions opts;
  opts.steps = curve.steps();

  CurveFamily family;
  family.dtau = dtau;
  family.base = curve;
  for (const double sign : {-1.0, +1.0}) {
    const TransversalState st =
        carry_start(chart, p0, curve.T[0], X0, xi12, sign * dtau);
    SampledCurve neighbor =
        curve_from_curvature(chart, st.p, st.T, shared_kappa, curve.length, opts);
    (sign < 0 ? family.minus : family.plus) = std::move(neighbor);
  }
  return family;
}

std::vector<Vec> variation_field(const MetricChart& chart, const CurveFamily& family) {
  const int m = family.base.samples();
  if (family.plus.samples() != m || family.minus.samples() != m) {
    throw SchemaError("variation_field: family curves have mismatched sampling");
  }
  if (!(family.dtau > 0.0)) {
    throw SchemaError("variation_field: dtau must be positive");
  }
  std::vector<Vec> field(m);
  for (int k = 0; k < m; ++k) {
    const Vec plus = chart.domain().unwrap_near(family.plus.p[k], family.minus.p[k]);
    field[k] = (plus - family.minus.p[k]) / (2.0 * family.dtau);
  }
  return field;
}

}  // namespace kt
