#include "kt/transport_nd.hpp"

#include <algorithm>
#include <cmath>

namespace kt {

namespace {

// Gamma(T) as a matrix: (GammaT)^i_s = Gamma^i_{ks} T^k.
Mat gamma_matrix(const std::array<Mat, 4>& gam, const Vec& T, int n) {
  Mat G = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int s = 0; s < n; ++s) {
      double acc = 0.0;
      for (int k = 0; k < n; ++k) acc += gam[i](k, s) * T[k];
      G(i, s) = acc;
    }
  return G;
}

struct NdCoeffs {
  std::vector<Mat> GammaT;          // Gamma contracted with the tangent
  std::vector<CurvatureTensor> R;   // full tensor (skipped for parallel frames)
};

NdCoeffs nd_coefficients(const MetricChart& chart, const SampledCurve& curve,
                         bool with_curvature) {
  const int n = chart.dim();
  const int m = curve.samples();
  NdCoeffs c;
  c.GammaT.resize(m);
  if (with_curvature) c.R.resize(m);
  for (int k = 0; k < m; ++k) {
    c.GammaT[k] = gamma_matrix(chart.christoffel(curve.p[k]), curve.T[k], n);
    if (with_curvature) c.R[k] = chart.curvature_tensor(curve.p[k]);
  }
  return c;
}

double skewness(const Mat& A) { return (A + A.transpose()).cwiseAbs().maxCoeff(); }

}  // namespace

TransportNdResult killing_transport_nd(const MetricChart& chart,
                                       const SampledCurve& curve, const JetND& jet0,
                                       TransportMode mode) {
  const int n = chart.dim();
  if (jet0.X.size() != n || jet0.A.rows() != n || jet0.A.cols() != n)
    throw SchemaError("killing_transport_nd: jet dimensions do not match the chart");
  if (mode == TransportMode::skew && skewness(jet0.A) > 1e-8)
    throw SchemaError("killing_transport_nd: initial operator is not skew");

  const NdCoeffs c = nd_coefficients(chart, curve, true);

  // Coordinate components of (X, A) as the integration state.
  Mat F0 = orthonormal_frame_nd(chart, curve.p[0]);
  Vec X = jet0.X;
  Mat A = F0 * jet0.A * F0.inverse();

  // d/ds X = A T - Gamma(T) X,  d/ds A = R(T, X) - Gamma(T) A + A Gamma(T).
  auto dX = [&](int k, const Vec& x, const Mat& a) {
    return Vec(a * curve.T[k] - c.GammaT[k] * x);
  };
  auto dA = [&](int k, const Vec& x, const Mat& a) {
    return Mat(c.R[k].op(curve.T[k], x) - c.GammaT[k] * a + a * c.GammaT[k]);
  };

  const int steps = curve.steps();
  TransportNdResult out;
  out.t.resize(steps + 1);
  out.p.resize(steps + 1);
  out.jet.resize(steps + 1);

  auto record = [&](int node) {
    out.t[node] = curve.t[2 * node];
    out.p[node] = curve.p[2 * node];
    const Mat F = orthonormal_frame_nd(chart, curve.p[2 * node]);
    JetND j;
    j.X = X;
    j.A = F.inverse() * A * F;
    out.skew_drift = std::max(out.skew_drift, skewness(j.A));
    out.jet[node] = j;
  };

  record(0);
  for (int k = 0; k < steps; ++k) {
    const double h = curve.t[2 * k + 2] - curve.t[2 * k];
    const int a = 2 * k, mid = 2 * k + 1, b = 2 * k + 2;
    const Vec kx1 = dX(a, X, A);
    const Mat ka1 = dA(a, X, A);
    const Vec kx2 = dX(mid, X + 0.5 * h * kx1, A + 0.5 * h * ka1);
    const Mat ka2 = dA(mid, X + 0.5 * h * kx1, A + 0.5 * h * ka1);
    const Vec kx3 = dX(mid, X + 0.5 * h * kx2, A + 0.5 * h * ka2);
    const Mat ka3 = dA(mid, X + 0.5 * h * kx2, A + 0.5 * h * ka2);
    const Vec kx4 = dX(b, X + h * kx3, A + h * ka3);
    const Mat ka4 = dA(b, X + h * kx3, A + h * ka3);
    X += (h / 6.0) * (kx1 + 2.0 * kx2 + 2.0 * kx3 + kx4);
    A += (h / 6.0) * (ka1 + 2.0 * ka2 + 2.0 * ka3 + ka4);
    record(k + 1);
  }
  return out;
}

std::vector<Mat> parallel_frames(const MetricChart& chart, const SampledCurve& curve) {
  const NdCoeffs c = nd_coefficients(chart, curve, false);
  Mat P = orthonormal_frame_nd(chart, curve.p[0]);
  const int steps = curve.steps();
  std::vector<Mat> out(steps + 1);
  out[0] = P;
  for (int k = 0; k < steps; ++k) {
    const double h = curve.t[2 * k + 2] - curve.t[2 * k];
    const int a = 2 * k, mid = 2 * k + 1, b = 2 * k + 2;
    const Mat k1 = -c.GammaT[a] * P;
    const Mat k2 = -c.GammaT[mid] * (P + 0.5 * h * k1);
    const Mat k3 = -c.GammaT[mid] * (P + 0.5 * h * k2);
    const Mat k4 = -c.GammaT[b] * (P + h * k3);
    P += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    out[k + 1] = P;
  }
  return out;
}

JetND tilde_curvature_nd(const MetricChart& chart, const Vec& p, const Vec& Y,
                         const Vec& Z, const JetND& jet) {
  const int n = chart.dim();
  if (jet.X.size() != n || jet.A.rows() != n || jet.A.cols() != n)
    throw SchemaError("tilde_curvature_nd: jet dimensions do not match the chart");

  const Mat F = orthonormal_frame_nd(chart, p);
  const Mat Acoord = F * jet.A * F.inverse();
  const CurvatureTensor R = chart.curvature_tensor(p);

  // (nabla_X R)(Y, Z) by a 4-point stencil of the tensor components along the
  // coordinate line p + eps*X, plus one Christoffel correction per slot.
  Mat M1 = Mat::Zero(n, n);
  const double xmax = jet.X.cwiseAbs().maxCoeff();
  if (xmax > 0.0) {
    const Vec d = jet.X / xmax;
    double s = chart.step(0);
    for (int a = 1; a < n; ++a) s = std::min(s, chart.step(a));
    s *= 2.0;
    CurvatureTensor st[4];
    const double off[4] = {-2.0, -1.0, 1.0, 2.0};
    for (int q = 0; q < 4; ++q) st[q] = chart.curvature_tensor(Vec(p + off[q] * s * d));
    double dR[4][4][4][4];
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l)
            dR[i][j][k][l] = xmax *
                             (st[0].R[i][j][k][l] - 8.0 * st[1].R[i][j][k][l] +
                              8.0 * st[2].R[i][j][k][l] - st[3].R[i][j][k][l]) /
                             (12.0 * s);

    const Mat G = gamma_matrix(chart.christoffel(p), jet.X, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double acc = 0.0;
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) {
            double cov = dR[i][j][k][l];
            for (int m = 0; m < n; ++m) {
              cov += G(i, m) * R.R[m][j][k][l] - G(m, j) * R.R[i][m][k][l] -
                     G(m, k) * R.R[i][j][m][l] - G(m, l) * R.R[i][j][k][m];
            }
            acc += cov * Y[k] * Z[l];
          }
        M1(i, j) = acc;
      }
  }

  const Mat RYZ = R.op(Y, Z);
  const Mat M2 = RYZ * Acoord - Acoord * RYZ;
  const Mat M3 = R.op(Y, Vec(Acoord * Z));
  const Mat M4 = R.op(Vec(Acoord * Y), Z);

  JetND out;
  out.X = Vec::Zero(n);
  out.A = F.inverse() * (M1 + M2 + M3 + M4) * F;
  return out;
}

}  // namespace kt
