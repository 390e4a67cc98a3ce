#include "kt/curve.hpp"

#include <algorithm>
#include <cmath>

#include "kt/errors.hpp"
#include "kt/frame.hpp"

namespace kt {

namespace {

// 4-point Gauss-Legendre on [-1, 1].
constexpr double kGlNode[4] = {-0.8611363115940526, -0.3399810435848563,
                               0.3399810435848563, 0.8611363115940526};
constexpr double kGlWeight[4] = {0.34785484513745385, 0.6521451548625461,
                                 0.6521451548625461, 0.34785484513745385};

Vec fd_tangent(const CurveFn& fn, double t, double h) {
  return (fn(t - 2.0 * h) - 8.0 * fn(t - h) + 8.0 * fn(t + h) - fn(t + 2.0 * h)) /
         (12.0 * h);
}

// Endpoints coincide up to whole periods of periodic axes.
bool endpoints_meet(const MetricChart& chart, const Vec& first, const Vec& last,
                    double tol) {
  Vec gap = last - first;
  for (size_t a = 0; a < chart.domain().axes.size(); ++a) {
    const auto& ax = chart.domain().axes[a];
    if (ax.periodic) gap[a] -= ax.period * std::round(gap[a] / ax.period);
  }
  return std::sqrt(gap.dot(chart.metric(first) * gap)) <= tol;
}

double unit_norm_error(const MetricChart& chart, const Vec& p, Vec& v,
                       const char* what) {
  const double n = chart.norm(p, v);
  if (!(n > 1e-14)) throw ZeroSpeed(std::string(what) + ": vanishing velocity");
  v /= n;
  return std::abs(n - 1.0);
}

}  // namespace

namespace {

// Shared reparameterization core. When the caller knows the derivative in
// closed form (dfn non-empty) it is used everywhere a tangent is needed;
// otherwise tangents come from a 4-point stencil of fn.
SampledCurve reparam_impl(const MetricChart& chart, const CurveFn& fn,
                          const CurveFn& dfn, double t0, double t1,
                          const CurveOptions& opts) {
  if (!(t1 > t0)) throw SchemaError("curve parameter interval is empty");
  if (opts.steps < 2) throw SchemaError("curve needs at least 2 steps");
  const double span = t1 - t0;
  const double ht = 1e-5 * span;
  const bool planar = chart.dim() == 2;

  auto tangent_at = [&](double t) {
    return dfn ? dfn(t) : fd_tangent(fn, t, ht);
  };
  auto speed_at = [&](double t) {
    const Vec p = fn(t);
    const Vec d = tangent_at(t);
    const double s = chart.norm(p, d);
    // Below this the differenced tangent is mostly rounding noise and the
    // direction field is meaningless.
    if (!(s > 1e-9 * (1.0 + p.cwiseAbs().maxCoeff()))) {
      throw ZeroSpeed("curve speed vanishes near parameter " + std::to_string(t));
    }
    return s;
  };
  auto segment_length = [&](double a, double b) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double acc = 0.0;
    for (int i = 0; i < 4; ++i) acc += kGlWeight[i] * speed_at(mid + half * kGlNode[i]);
    return acc * half;
  };

  // Dense cumulative arclength table, then Newton to invert it.
  const int dense = std::max(1024, 8 * opts.steps);
  std::vector<double> cum(dense + 1, 0.0);
  for (int i = 0; i < dense; ++i) {
    const double a = t0 + span * i / dense;
    const double b = t0 + span * (i + 1) / dense;
    cum[i + 1] = cum[i] + segment_length(a, b);
  }
  const double length = cum[dense];

  const int m = 2 * opts.steps + 1;
  SampledCurve out;
  out.length = length;
  out.t.resize(m);
  out.p.resize(m);
  out.T.resize(m);
  if (planar) {
    out.N.resize(m);
    out.kappa.resize(m);
  }

  double t = t0;
  for (int k = 0; k < m; ++k) {
    const double target = length * k / (m - 1);
    if (k == 0) {
      t = t0;
    } else if (k == m - 1) {
      t = t1;
    } else {
      const auto it = std::upper_bound(cum.begin(), cum.end(), target);
      const int i = std::min<int>(dense - 1, std::max<int>(0, int(it - cum.begin()) - 1));
      const double ta = t0 + span * i / dense;
      const double tb = t0 + span * (i + 1) / dense;
      const double frac = (target - cum[i]) / std::max(cum[i + 1] - cum[i], 1e-300);
      t = ta + frac * (tb - ta);
      for (int iter = 0; iter < 40; ++iter) {
        const double err = cum[i] + segment_length(ta, t) - target;
        if (std::abs(err) <= 1e-13 * std::max(1.0, length)) break;
        t -= err / speed_at(t);
        t = std::min(std::max(t, ta - span / dense), tb + span / dense);
      }
    }
    out.t[k] = target;

    const Vec raw = fn(t);
    out.p[k] = k == 0 ? raw : chart.domain().unwrap_near(raw, out.p[k - 1]);
    const Vec d = tangent_at(t);
    const double sp = chart.norm(out.p[k], d);
    out.T[k] = d / sp;

    if (planar) {
      const Matrix2d J = rotation_j(chart, out.p[k]);
      Vec n = Vec::Zero(2);
      n[0] = J(0, 0) * out.T[k][0] + J(0, 1) * out.T[k][1];
      n[1] = J(1, 0) * out.T[k][0] + J(1, 1) * out.T[k][1];
      out.N[k] = n;
      // kappa = < dT/ds + Gamma(T, T), N >_g with dT/dt differenced in the
      // original parameter.
      auto unit_tangent = [&](double tt) {
        const Vec dd = tangent_at(tt);
        return Vec(dd / chart.norm(fn(tt), dd));
      };
      const Vec dT =
          (unit_tangent(t - 2.0 * ht) - 8.0 * unit_tangent(t - ht) +
           8.0 * unit_tangent(t + ht) - unit_tangent(t + 2.0 * ht)) /
          (12.0 * ht);
      const Vec cov = dT / sp + chart.gamma(out.p[k], out.T[k], out.T[k]);
      out.kappa[k] = cov.dot(chart.metric(out.p[k]) * out.N[k]);
    }
  }

  out.closed = endpoints_meet(chart, out.p[0], out.p[m - 1], opts.closed_tol);
  return out;
}

}  // namespace

SampledCurve reparam_arclength(const MetricChart& chart, const CurveFn& fn, double t0,
                               double t1, const CurveOptions& opts) {
  return reparam_impl(chart, fn, CurveFn(), t0, t1, opts);
}

SampledCurve straight_segment(const MetricChart& chart, const Vec& a, const Vec& b,
                              const CurveOptions& opts) {
  const Vec d = b - a;
  return reparam_impl(
      chart, [a, d](double t) { return Vec(a + t * d); },
      [d](double) { return d; }, 0.0, 1.0, opts);
}

namespace {

// Shared fixed-step RK4 over (position, direction) states.
template <typename Deriv>
SampledCurve integrate_curve(const MetricChart& chart, const Vec& p0, Vec v0,
                             double length, const CurveOptions& opts, Deriv deriv,
                             const char* what) {
  if (!(length > 0.0)) throw SchemaError(std::string(what) + ": length must be positive");
  if (opts.steps < 2) throw SchemaError(std::string(what) + ": needs at least 2 steps");
  const bool planar = chart.dim() == 2;
  const int m = 2 * opts.steps + 1;
  const double ds = length / (m - 1);

  SampledCurve out;
  out.length = length;
  out.t.resize(m);
  out.p.resize(m);
  out.T.resize(m);
  if (planar) out.N.resize(m);

  Vec x = p0;
  unit_norm_error(chart, x, v0, what);
  Vec v = v0;
  for (int k = 0; k < m; ++k) {
    out.t[k] = ds * k;
    out.p[k] = x;
    out.T[k] = v;
    if (planar) {
      const Matrix2d J = rotation_j(chart, x);
      Vec n = Vec::Zero(2);
      n[0] = J(0, 0) * v[0] + J(0, 1) * v[1];
      n[1] = J(1, 0) * v[0] + J(1, 1) * v[1];
      out.N[k] = n;
    }
    if (k == m - 1) break;

    const double s = out.t[k];
    Vec kx1, kv1, kx2, kv2, kx3, kv3, kx4, kv4;
    deriv(s, x, v, kx1, kv1);
    deriv(s + 0.5 * ds, Vec(x + 0.5 * ds * kx1), Vec(v + 0.5 * ds * kv1), kx2, kv2);
    deriv(s + 0.5 * ds, Vec(x + 0.5 * ds * kx2), Vec(v + 0.5 * ds * kv2), kx3, kv3);
    deriv(s + ds, Vec(x + ds * kx3), Vec(v + ds * kv3), kx4, kv4);
    x += ds / 6.0 * (kx1 + 2.0 * kx2 + 2.0 * kx3 + kx4);
    v += ds / 6.0 * (kv1 + 2.0 * kv2 + 2.0 * kv3 + kv4);
    if ((k + 1) % 64 == 0) {
      out.max_renorm_correction =
          std::max(out.max_renorm_correction, unit_norm_error(chart, x, v, what));
    }
  }
  out.closed = endpoints_meet(chart, out.p[0], out.p[m - 1], opts.closed_tol);
  return out;
}

}  // namespace

SampledCurve geodesic(const MetricChart& chart, const Vec& p0, const Vec& v0,
                      double length, const CurveOptions& opts) {
  auto deriv = [&](double, const Vec& x, const Vec& v, Vec& dx, Vec& dv) {
    dx = v;
    dv = -chart.gamma(x, v, v);
  };
  SampledCurve out = integrate_curve(chart, p0, v0, length, opts, deriv, "geodesic");
  if (chart.dim() == 2) out.kappa = geodesic_curvature(chart, out);
  return out;
}

SampledCurve curve_from_curvature(const MetricChart& chart, const Vec& p0,
                                  const Vec& T0, const KappaFn& kappa, double length,
                                  const CurveOptions& opts) {
  if (chart.dim() != 2) {
    throw SchemaError("curve_from_curvature requires a 2-D chart");
  }
  auto deriv = [&](double s, const Vec& x, const Vec& v, Vec& dx, Vec& dv) {
    dx = v;
    const Matrix2d J = rotation_j(chart, x);
    Vec jv = Vec::Zero(2);
    jv[0] = J(0, 0) * v[0] + J(0, 1) * v[1];
    jv[1] = J(1, 0) * v[0] + J(1, 1) * v[1];
    dv = kappa(s) * jv - chart.gamma(x, v, v);
  };
  SampledCurve out =
      integrate_curve(chart, p0, T0, length, opts, deriv, "curve_from_curvature");
  out.kappa.resize(out.samples());
  for (int k = 0; k < out.samples(); ++k) out.kappa[k] = kappa(out.t[k]);
  return out;
}

std::vector<double> geodesic_curvature(const MetricChart& chart,
                                       const SampledCurve& curve) {
  if (chart.dim() != 2) {
    throw SchemaError("geodesic_curvature requires a 2-D chart");
  }
  const int m = curve.samples();
  if (m < 5) throw SchemaError("geodesic_curvature needs at least 5 samples");
  const double h = curve.spacing();
  const int ring = m - 1;  // for closed curves sample m-1 repeats sample 0

  auto tangent = [&](int idx) -> const Vec& {
    if (curve.closed) {
      int k = ((idx % ring) + ring) % ring;
      return curve.T[k];
    }
    return curve.T[std::min(std::max(idx, 0), m - 1)];
  };

  std::vector<double> out(m);
  for (int k = 0; k < m; ++k) {
    Vec dT;
    if (curve.closed || (k >= 2 && k <= m - 3)) {
      dT = (tangent(k - 2) - 8.0 * tangent(k - 1) + 8.0 * tangent(k + 1) -
            tangent(k + 2)) /
           (12.0 * h);
    } else if (k < 2) {
      // One-sided 4th-order stencils at the open ends.
      const Vec &f0 = curve.T[0], &f1 = curve.T[1], &f2 = curve.T[2], &f3 = curve.T[3],
                &f4 = curve.T[4];
      dT = k == 0 ? Vec((-25.0 * f0 + 48.0 * f1 - 36.0 * f2 + 16.0 * f3 - 3.0 * f4) /
                        (12.0 * h))
                  : Vec((-3.0 * f0 - 10.0 * f1 + 18.0 * f2 - 6.0 * f3 + f4) /
                        (12.0 * h));
    } else {
      const Vec &f0 = curve.T[m - 1], &f1 = curve.T[m - 2], &f2 = curve.T[m - 3],
                &f3 = curve.T[m - 4], &f4 = curve.T[m - 5];
      dT = k == m - 1
               ? Vec(-(-25.0 * f0 + 48.0 * f1 - 36.0 * f2 + 16.0 * f3 - 3.0 * f4) /
                     (12.0 * h))
               : Vec(-(-3.0 * f0 - 10.0 * f1 + 18.0 * f2 - 6.0 * f3 + f4) /
                     (12.0 * h));
    }
    const Vec& p = curve.p[k];
    const Vec& T = curve.T[k];
    const Vec cov = dT + chart.gamma(p, T, T);
    Vec n;
    if (!curve.N.empty()) {
      n = curve.N[k];
    } else {
      const Matrix2d J = rotation_j(chart, p);
      n = Vec::Zero(2);
      n[0] = J(0, 0) * T[0] + J(0, 1) * T[1];
      n[1] = J(1, 0) * T[0] + J(1, 1) * T[1];
    }
    out[k] = cov.dot(chart.metric(p) * n);
  }
  return out;
}

SampledCurve reversed_curve(const SampledCurve& curve) {
  SampledCurve out;
  const int m = curve.samples();
  out.t = curve.t;  // same uniform grid
  out.length = curve.length;
  out.closed = curve.closed;
  out.max_renorm_correction = curve.max_renorm_correction;
  out.p.resize(m);
  out.T.resize(m);
  if (!curve.N.empty()) out.N.resize(m);
  if (!curve.kappa.empty()) out.kappa.resize(m);
  for (int k = 0; k < m; ++k) {
    const int j = m - 1 - k;
    out.p[k] = curve.p[j];
    out.T[k] = -curve.T[j];
    if (!curve.N.empty()) out.N[k] = -curve.N[j];
    if (!curve.kappa.empty()) out.kappa[k] = -curve.kappa[j];
  }
  return out;
}

double interp_sample(const SampledCurve& curve, const std::vector<double>& values,
                     double s) {
  const int m = curve.samples();
  if (static_cast<int>(values.size()) != m) {
    throw SchemaError("interp_sample: value array does not match curve samples");
  }
  const double h = curve.spacing();
  double x = s / h;
  int k0 = static_cast<int>(std::floor(x)) - 1;
  k0 = std::min(std::max(k0, 0), m - 4);
  double acc = 0.0;
  for (int i = 0; i < 4; ++i) {
    double w = 1.0;
    for (int j = 0; j < 4; ++j) {
      if (j == i) continue;
      w *= (x - (k0 + j)) / double(i - j);
    }
    acc += w * values[k0 + i];
  }
  return acc;
}

namespace {

Vec interp_vec(const SampledCurve& curve, const std::vector<Vec>& values, double s) {
  const int m = curve.samples();
  const double h = curve.spacing();
  double x = s / h;
  int k0 = static_cast<int>(std::floor(x)) - 1;
  k0 = std::min(std::max(k0, 0), m - 4);
  Vec acc = Vec::Zero(values[0].size());
  for (int i = 0; i < 4; ++i) {
    double w = 1.0;
    for (int j = 0; j < 4; ++j) {
      if (j == i) continue;
      w *= (x - (k0 + j)) / double(i - j);
    }
    acc += w * values[k0 + i];
  }
  return acc;
}

}  // namespace

Vec interp_point(const SampledCurve& curve, double s) {
  return interp_vec(curve, curve.p, s);
}

Vec interp_tangent(const SampledCurve& curve, double s) {
  return interp_vec(curve, curve.T, s);
}

}  // namespace kt
