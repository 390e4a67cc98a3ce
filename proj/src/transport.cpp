#include "kt/transport.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

namespace kt {

namespace {

void require_2d(const MetricChart& chart, const char* what) {
  if (chart.dim() != 2)
    throw SchemaError(std::string(what) + " requires a 2-D chart, got dimension " +
                      std::to_string(chart.dim()));
}

Matrix3d q_from_frame(const Frame2D& fr, double K, const Vector2d& T) {
  const double c = fr.conn(T);
  const double w1 = fr.omega1(T);
  const double w2 = fr.omega2(T);
  Matrix3d Q;
  Q << 0.0, -c, w2,  //
      c, 0.0, -w1,   //
      -K * w2, K * w1, 0.0;
  return Q;
}

// RK4 over sample triples: step k uses samples 2k, 2k+1, 2k+2, so midpoint
// coefficients are genuine curve data rather than interpolants. Returns the
// transport matrix at every even sample (steps + 1 nodes).
std::vector<Matrix3d> integrate_transport(const SampledCurve& curve,
                                          const PathCoeffs& pc) {
  const int n = curve.steps();
  std::vector<Matrix3d> U(n + 1);
  U[0].setIdentity();
  for (int k = 0; k < n; ++k) {
    const double h = curve.t[2 * k + 2] - curve.t[2 * k];
    const Matrix3d& Qa = pc.Q[2 * k];
    const Matrix3d& Qm = pc.Q[2 * k + 1];
    const Matrix3d& Qb = pc.Q[2 * k + 2];
    const Matrix3d& u = U[k];
    const Matrix3d k1 = Qa * u;
    const Matrix3d k2 = Qm * (u + (0.5 * h) * k1);
    const Matrix3d k3 = Qm * (u + (0.5 * h) * k2);
    const Matrix3d k4 = Qb * (u + h * k3);
    U[k + 1] = u + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return U;
}

Matrix3d loop_matrix(const MetricChart& chart, const SampledCurve& side) {
  const PathCoeffs pc = path_coefficients(chart, side);
  return integrate_transport(side, pc).back();
}

}  // namespace

Matrix3d q_matrix(const MetricChart& chart, const Vec& p, const Vec& T) {
  require_2d(chart, "q_matrix");
  const Frame2D fr = orthonormal_frame(chart, p);
  return q_from_frame(fr, gauss_curvature(chart, p), Vector2d(T[0], T[1]));
}

Matrix3d q_matrix(const MetricChart& chart, const SampledCurve& curve, double t) {
  return q_matrix(chart, interp_point(curve, t), interp_tangent(curve, t));
}

PathCoeffs path_coefficients(const MetricChart& chart, const SampledCurve& curve) {
  require_2d(chart, "path_coefficients");
  const int m = curve.samples();
  PathCoeffs pc;
  pc.Q.resize(m);
  pc.e1.resize(m);
  pc.e2.resize(m);
  pc.K.resize(m);
  for (int k = 0; k < m; ++k) {
    const Frame2D fr = orthonormal_frame(chart, curve.p[k]);
    const double K = gauss_curvature(chart, curve.p[k]);
    pc.Q[k] = q_from_frame(fr, K, Vector2d(curve.T[k][0], curve.T[k][1]));
    pc.e1[k] = fr.e1;
    pc.e2[k] = fr.e2;
    pc.K[k] = K;
  }
  return pc;
}

TransportResult killing_transport(const MetricChart& chart, const SampledCurve& curve,
                                  const Jet2& jet0) {
  const PathCoeffs pc = path_coefficients(chart, curve);
  TransportResult out;
  out.U = integrate_transport(curve, pc);
  const int nodes = static_cast<int>(out.U.size());
  out.t.resize(nodes);
  out.p.resize(nodes);
  out.jet.resize(nodes);
  for (int k = 0; k < nodes; ++k) {
    out.t[k] = curve.t[2 * k];
    out.p[k] = curve.p[2 * k];
    out.jet[k] = out.U[k] * jet0;
    out.det_drift =
        std::max(out.det_drift, std::abs(out.U[k].determinant() - 1.0));
  }
  return out;
}

Jet2 tn_to_frame(const MetricChart& chart, const Vec& p, const Vec& T,
                 const Jet2& jet_tn) {
  require_2d(chart, "tn_to_frame");
  const Frame2D fr = orthonormal_frame(chart, p);
  const Vector2d t2(T[0], T[1]);
  double c = fr.omega1(t2);
  double s = fr.omega2(t2);
  const double n = std::hypot(c, s);
  if (!(n > 0.0)) throw ZeroSpeed("tn_to_frame: zero tangent vector");
  c /= n;
  s /= n;
  return Jet2(c * jet_tn[0] - s * jet_tn[1], s * jet_tn[0] + c * jet_tn[1],
              jet_tn[2]);
}

Jet2 frame_to_tn(const MetricChart& chart, const Vec& p, const Vec& T,
                 const Jet2& jet_frame) {
  require_2d(chart, "frame_to_tn");
  const Frame2D fr = orthonormal_frame(chart, p);
  const Vector2d t2(T[0], T[1]);
  double c = fr.omega1(t2);
  double s = fr.omega2(t2);
  const double n = std::hypot(c, s);
  if (!(n > 0.0)) throw ZeroSpeed("frame_to_tn: zero tangent vector");
  c /= n;
  s /= n;
  return Jet2(c * jet_frame[0] + s * jet_frame[1],
              -s * jet_frame[0] + c * jet_frame[1], jet_frame[2]);
}

FixedDirections fixed_directions(const Matrix3d& U, double tol) {
  Eigen::JacobiSVD<Matrix3d> svd(U - Matrix3d::Identity(), Eigen::ComputeFullV);
  FixedDirections out;
  out.singular_values = svd.singularValues();
  const double cut = tol * std::max(1.0, U.norm());
  for (int i = 0; i < 3; ++i) {
    if (out.singular_values[i] <= cut) {
      ++out.dims;
      out.basis.push_back(svd.matrixV().col(i));
    }
  }
  return out;
}

HolonomyResult holonomy(const MetricChart& chart, const SampledCurve& curve) {
  if (!curve.closed)
    throw NotClosed("holonomy requires a closed curve; endpoints do not meet");
  const PathCoeffs pc = path_coefficients(chart, curve);
  const std::vector<Matrix3d> path = integrate_transport(curve, pc);
  HolonomyResult out;
  out.U = path.back();
  for (const Matrix3d& u : path)
    out.det_drift = std::max(out.det_drift, std::abs(u.determinant() - 1.0));
  Eigen::EigenSolver<Matrix3d> es(out.U);
  for (int i = 0; i < 3; ++i) {
    const auto lam = es.eigenvalues()[i];
    out.angle = std::max(out.angle, std::abs(std::atan2(lam.imag(), lam.real())));
  }
  const FixedDirections fd = fixed_directions(out.U);
  out.fixed_dims = fd.dims;
  out.fixed_basis = fd.basis;
  return out;
}

Matrix3d curvature_defect(const MetricChart& chart, const Vec& p, double h,
                          int side_steps) {
  require_2d(chart, "curvature_defect");
  if (!(h > 0.0)) throw SchemaError("curvature_defect: loop size must be positive");
  const Frame2D fr = orthonormal_frame(chart, p);
  const Vec p0 = p;
  Vec q1 = p, q2 = p, q3 = p;
  q1.head<2>() += h * fr.e1;
  q2.head<2>() += h * fr.e1 + h * fr.e2;
  q3.head<2>() += h * fr.e2;

  // Straight segments with exact tangents: differenced directions on sides of
  // length ~h would leave a noise floor that /h^2 turns into a visible defect.
  CurveOptions opts;
  opts.steps = side_steps;
  Matrix3d U = loop_matrix(chart, straight_segment(chart, p0, q1, opts));
  U = loop_matrix(chart, straight_segment(chart, q1, q2, opts)) * U;
  U = loop_matrix(chart, straight_segment(chart, q2, q3, opts)) * U;
  U = loop_matrix(chart, straight_segment(chart, q3, p0, opts)) * U;
  return (U - Matrix3d::Identity()) / (h * h);
}

JacobiReport jacobi_check(const MetricChart& chart, const SampledCurve& curve,
                          const Jet2& jet0) {
  require_2d(chart, "jacobi_check");
  double kmax = 0.0;
  for (double k : curve.kappa) kmax = std::max(kmax, std::abs(k));
  if (kmax > 1e-6)
    throw NotGeodesic("jacobi_check: max |kappa| = " + std::to_string(kmax));

  const TransportResult tr = killing_transport(chart, curve, jet0);
  const int m = static_cast<int>(tr.t.size());
  if (m < 9)
    throw SchemaError("jacobi_check: curve too short (need at least 4 steps)");
  const double hs = tr.t[1] - tr.t[0];

  // Field part in coordinate components, and the tangent at each node.
  std::vector<Vec> X(m), T(m);
  for (int i = 0; i < m; ++i) {
    const Frame2D fr = orthonormal_frame(chart, tr.p[i]);
    Vec x(2);
    x.head<2>() = tr.jet[i][0] * fr.e1 + tr.jet[i][1] * fr.e2;
    X[i] = x;
    T[i] = curve.T[2 * i];
  }

  // First-order covariant derivative along the curve at interior nodes.
  auto covariant = [&](const std::vector<Vec>& F, int i) {
    Vec d = (-F[i + 2] + 8.0 * F[i + 1] - 8.0 * F[i - 1] + F[i - 2]) / (12.0 * hs);
    return Vec(d + chart.gamma(tr.p[i], T[i], F[i]));
  };

  std::vector<Vec> Y(m, Vec::Zero(2));
  for (int i = 2; i <= m - 3; ++i) Y[i] = covariant(X, i);

  JacobiReport rep;
  for (int i = 4; i <= m - 5; ++i) {
    const Vec Z = covariant(Y, i);
    const CurvatureTensor R = chart.curvature_tensor(tr.p[i]);
    const Vec rhs = R.op(T[i], X[i]) * T[i];
    const double r = chart.norm(tr.p[i], Z - rhs);
    rep.t.push_back(tr.t[i]);
    rep.residual.push_back(r);
    rep.max_residual = std::max(rep.max_residual, r);
  }
  return rep;
}

}  // namespace kt
