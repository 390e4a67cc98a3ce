#include "kt/frame.hpp"

#include <cmath>

#include "kt/errors.hpp"
#include "kt/numdiff.hpp"

namespace kt {

namespace {

void require_2d(const MetricChart& chart, const char* what) {
  if (chart.dim() != 2) {
    throw SchemaError(std::string(what) + " requires a 2-D chart, got dimension " +
                      std::to_string(chart.dim()));
  }
}

Vector2d to2(const Vec& v) { return Vector2d(v[0], v[1]); }

}  // namespace

FrameBasis frame_basis(const MetricChart& chart, const Vec& p) {
  require_2d(chart, "frame_basis");
  FrameBasis out;
  out.g = chart.metric(p);
  const double g11 = out.g(0, 0), g12 = out.g(0, 1), g22 = out.g(1, 1);
  if (!(g11 > 0.0)) {
    throw DegenerateMetric("metric not positive along d_u at requested point");
  }
  const double r1 = std::sqrt(g11);
  out.e1 = Vec::Zero(2);
  out.e1[0] = 1.0 / r1;

  // Gram-Schmidt: subtract the d_u component from d_v, then normalize.
  Vec v = Vec::Zero(2);
  v[0] = -g12 / g11;
  v[1] = 1.0;
  const double n2 = g11 * v[0] * v[0] + 2.0 * g12 * v[0] * v[1] + g22 * v[1] * v[1];
  if (!(n2 > 0.0)) {
    throw DegenerateMetric("metric degenerate in the d_v direction at requested point");
  }
  out.e2 = v / std::sqrt(n2);
  return out;
}

Mat orthonormal_frame_nd(const MetricChart& chart, const Vec& p) {
  const int n = chart.dim();
  const Mat g = chart.metric(p);
  Mat frame = Mat::Identity(n, n);
  for (int j = 0; j < n; ++j) {
    Vec v = frame.col(j);
    for (int i = 0; i < j; ++i) {
      const Vec ei = frame.col(i);
      v -= (ei.dot(g * v)) * ei;
    }
    const double n2 = v.dot(g * v);
    if (!(n2 > 0.0)) {
      throw DegenerateMetric("metric degenerate during frame orthonormalization");
    }
    frame.col(j) = v / std::sqrt(n2);
  }
  return frame;
}

Frame2D orthonormal_frame(const MetricChart& chart, const Vec& p) {
  require_2d(chart, "orthonormal_frame");
  const FrameBasis fb = frame_basis(chart, p);

  Frame2D f;
  f.p = to2(p);
  f.e1 = to2(fb.e1);
  f.e2 = to2(fb.e2);
  f.w1 = to2(fb.g * fb.e1);
  f.w2 = to2(fb.g * fb.e2);

  // conn(d_j) = < nabla_{d_j} e2, e1 >_g with
  // (nabla_{d_j} e2)^i = d_j(e2^i) + Gamma^i_{jk} e2^k.
  const auto gam = chart.christoffel(p);
  for (int j = 0; j < 2; ++j) {
    const double h = chart.step(j);
    Vec d = Vec::Zero(2);
    d[j] = 1.0;
    const Vec em2 = frame_basis(chart, p - 2.0 * h * d).e2;
    const Vec em1 = frame_basis(chart, p - h * d).e2;
    const Vec ep1 = frame_basis(chart, p + h * d).e2;
    const Vec ep2 = frame_basis(chart, p + 2.0 * h * d).e2;
    Vec de2 = (em2 - 8.0 * em1 + 8.0 * ep1 - ep2) / (12.0 * h);
    for (int i = 0; i < 2; ++i) {
      double corr = 0.0;
      for (int k = 0; k < 2; ++k) corr += gam[i](j, k) * fb.e2[k];
      de2[i] += corr;
    }
    f.conn_cov[j] = f.w1.dot(to2(de2));
  }
  return f;
}

double connection_coefficient(const MetricChart& chart, const Vec& p, const Vec& w) {
  return orthonormal_frame(chart, p).conn(to2(w));
}

double gauss_curvature(const MetricChart& chart, const Vec& p) {
  require_2d(chart, "gauss_curvature");
  // Brioschi's determinant formula evaluates K from the metric components and
  // their first/second partials on a single shared 5x5 stencil. Compared with
  // contracting the finite-difference curvature tensor this costs a third as
  // many metric evaluations and carries far less rounding noise, which
  // matters because curvature derivatives are differenced again downstream.
  const double hu = chart.step(0);
  const double hv = chart.step(1);
  double E[5][5], F[5][5], G[5][5];
  for (int i = -2; i <= 2; ++i) {
    for (int j = -2; j <= 2; ++j) {
      Vec q(p);
      q[0] += i * hu;
      q[1] += j * hv;
      const Mat g = chart.metric(q);
      E[i + 2][j + 2] = g(0, 0);
      F[i + 2][j + 2] = g(0, 1);
      G[i + 2][j + 2] = g(1, 1);
    }
  }
  auto du = [&](const double m[5][5]) {
    return (m[0][2] - 8.0 * m[1][2] + 8.0 * m[3][2] - m[4][2]) / (12.0 * hu);
  };
  auto dv = [&](const double m[5][5]) {
    return (m[2][0] - 8.0 * m[2][1] + 8.0 * m[2][3] - m[2][4]) / (12.0 * hv);
  };
  auto duu = [&](const double m[5][5]) {
    return (-m[0][2] + 16.0 * m[1][2] - 30.0 * m[2][2] + 16.0 * m[3][2] - m[4][2]) /
           (12.0 * hu * hu);
  };
  auto dvv = [&](const double m[5][5]) {
    return (-m[2][0] + 16.0 * m[2][1] - 30.0 * m[2][2] + 16.0 * m[2][3] - m[2][4]) /
           (12.0 * hv * hv);
  };
  auto duv = [&](const double m[5][5]) {
    static const double c[5] = {1.0 / 12.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, -1.0 / 12.0};
    double acc = 0.0;
    for (int i = 0; i < 5; ++i) {
      if (c[i] == 0.0) continue;
      double row = 0.0;
      for (int j = 0; j < 5; ++j) {
        if (c[j] == 0.0) continue;
        row += c[j] * m[i][j];
      }
      acc += c[i] * row;
    }
    return acc / (hu * hv);
  };

  const double e = E[2][2], f = F[2][2], g = G[2][2];
  const double det = e * g - f * f;
  if (!(det > 0.0)) {
    throw DegenerateMetric("metric determinant not positive at requested point");
  }
  Matrix3d M1, M2;
  M1 << -0.5 * dvv(E) + duv(F) - 0.5 * duu(G), 0.5 * du(E), du(F) - 0.5 * dv(E),
        dv(F) - 0.5 * du(G),                    e,           f,
        0.5 * dv(G),                            f,           g;
  M2 << 0.0,         0.5 * dv(E), 0.5 * du(G),
        0.5 * dv(E), e,           f,
        0.5 * du(G), f,           g;
  return (M1.determinant() - M2.determinant()) / (det * det);
}

Matrix2d rotation_j(const MetricChart& chart, const Vec& p) {
  const FrameBasis fb = frame_basis(chart, p);
  Matrix2d E;
  E.col(0) = to2(fb.e1);
  E.col(1) = to2(fb.e2);
  Matrix2d rot;
  rot << 0.0, -1.0, 1.0, 0.0;
  return E * rot * E.inverse();
}

// ---------------------------------------------------------------------------
// Curvature jet: a three-level finite-difference ladder over frame directions
// with connection corrections converting raw directional derivatives into
// covariant frame derivatives. The steps at the three levels are 2h, 4h, 8h
// so each level differentiates a quantity that is itself smooth at the scale
// of the next-smaller stencil.
// ---------------------------------------------------------------------------

namespace {

struct Level2 {
  double K1 = 0.0, K2 = 0.0;
  double K11 = 0.0, K12 = 0.0, K21 = 0.0, K22 = 0.0;
  double k12_sym() const { return 0.5 * (K12 + K21); }
};

struct JetLadder {
  const MetricChart& chart;
  double s1, s2, s3;

  double curv(const Vec& q) const { return gauss_curvature(chart, q); }

  // Both first-level frame derivatives at q: K_i = e_i(K).
  Vector2d grad(const Vec& q) const {
    const FrameBasis fb = frame_basis(chart, q);
    Vector2d out;
    const Vec dirs[2] = {fb.e1, fb.e2};
    for (int i = 0; i < 2; ++i) {
      const Vec& e = dirs[i];
      out[i] = (curv(q - 2.0 * s1 * e) - 8.0 * curv(q - s1 * e) +
                8.0 * curv(q + s1 * e) - curv(q + 2.0 * s1 * e)) /
               (12.0 * s1);
    }
    return out;
  }

  // All four second-level derivatives at q, plus the first level there.
  Level2 level2(const Vec& q) const {
    const Frame2D f = orthonormal_frame(chart, q);
    const Vector2d kc = grad(q);

    Vector2d dk[2];  // dk[i][j] = raw e_i(K_j)
    const Vector2d dirs[2] = {f.e1, f.e2};
    for (int i = 0; i < 2; ++i) {
      Vec e = Vec::Zero(2);
      e[0] = dirs[i][0];
      e[1] = dirs[i][1];
      const Vec qv(q);
      const Vector2d m2 = grad(qv - 2.0 * s2 * e);
      const Vector2d m1 = grad(qv - s2 * e);
      const Vector2d p1 = grad(qv + s2 * e);
      const Vector2d p2 = grad(qv + 2.0 * s2 * e);
      dk[i] = (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * s2);
    }

    const double c1 = f.conn(f.e1);
    const double c2 = f.conn(f.e2);
    Level2 out;
    out.K1 = kc[0];
    out.K2 = kc[1];
    out.K11 = dk[0][0] + kc[1] * c1;
    out.K12 = dk[1][0] + kc[1] * c2;
    out.K21 = dk[0][1] - kc[0] * c1;
    out.K22 = dk[1][1] - kc[0] * c2;
    return out;
  }
};

double rel_residual(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

CurvatureJet curvature_jet(const MetricChart& chart, const Vec& p, const JetOptions& opts) {
  require_2d(chart, "curvature_jet");
  double extent = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 2; ++a) extent = std::min(extent, chart.domain().axes[a].extent());
  const double h0 = opts.h_scale * extent;
  const JetLadder ladder{chart, 2.0 * h0, 4.0 * h0, 8.0 * h0};

  const Frame2D f = orthonormal_frame(chart, p);
  const Level2 center = ladder.level2(p);

  CurvatureJet jet;
  jet.K = ladder.curv(p);
  jet.K1 = center.K1;
  jet.K2 = center.K2;
  jet.K11 = center.K11;
  jet.K22 = center.K22;
  jet.K12 = center.k12_sym();
  jet.k12_mismatch = std::abs(center.K12 - center.K21);

  // Third level: raw e_i of the level-2 fields, then connection corrections.
  // d2[i] holds e_i applied to (K11, K12, K22) with K12 symmetrized.
  Eigen::Vector3d d2[2];
  const Vector2d dirs[2] = {f.e1, f.e2};
  for (int i = 0; i < 2; ++i) {
    Vec e = Vec::Zero(2);
    e[0] = dirs[i][0];
    e[1] = dirs[i][1];
    auto pack = [&](const Vec& q) {
      const Level2 l = ladder.level2(q);
      return Eigen::Vector3d(l.K11, l.k12_sym(), l.K22);
    };
    if (opts.level3_order >= 4) {
      const Eigen::Vector3d m2 = pack(p - 2.0 * ladder.s3 * e);
      const Eigen::Vector3d m1 = pack(p - ladder.s3 * e);
      const Eigen::Vector3d p1 = pack(p + ladder.s3 * e);
      const Eigen::Vector3d p2 = pack(p + 2.0 * ladder.s3 * e);
      d2[i] = (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * ladder.s3);
    } else {
      const Eigen::Vector3d m1 = pack(p - ladder.s3 * e);
      const Eigen::Vector3d p1 = pack(p + ladder.s3 * e);
      d2[i] = (p1 - m1) / (2.0 * ladder.s3);
    }
  }

  const double c1 = f.conn(f.e1);
  const double c2 = f.conn(f.e2);
  const double anis = jet.K11 - jet.K22;
  jet.K111 = d2[0][0] + 2.0 * jet.K12 * c1;
  jet.K112 = d2[1][0] + 2.0 * jet.K12 * c2;
  jet.K121 = d2[0][1] - anis * c1;
  jet.K122 = d2[1][1] - anis * c2;
  jet.K221 = d2[0][2] - 2.0 * jet.K12 * c1;
  jet.K222 = d2[1][2] - 2.0 * jet.K12 * c2;

  // Two consequences of d(dK) = 0 written in frame derivatives; they give an
  // internal consistency check on every third-level value.
  jet.identity_residual_1 = rel_residual(jet.K112, jet.K121 - jet.K2 * jet.K);
  jet.identity_residual_2 = rel_residual(jet.K122, jet.K221 + jet.K1 * jet.K);
  if (opts.enforce_identities && jet.identity_residual() > opts.identity_tol) {
    throw ToleranceExceeded(
        "curvature jet consistency identities exceeded tolerance: residual " +
        std::to_string(jet.identity_residual()) + " > " +
        std::to_string(opts.identity_tol));
  }
  return jet;
}

// ---------------------------------------------------------------------------
// Killing residuals
// ---------------------------------------------------------------------------

VectorFieldJet VectorFieldJet::from_expressions(const MetricChart& chart,
                                                const std::string& xi1_text,
                                                const std::string& xi2_text) {
  return VectorFieldJet{
      ScalarField::from_expression(xi1_text, chart.domain(), chart.h_scale()),
      ScalarField::from_expression(xi2_text, chart.domain(), chart.h_scale())};
}

KillingResidual killing_residual(const MetricChart& chart, const VectorFieldJet& field,
                                 const Vec& p) {
  require_2d(chart, "killing_residual");
  // Stencil displacements run along unit frame vectors, so the step parameter
  // is metric arclength; a fixed step is therefore chart-independent. Tying
  // it to the coordinate extent would make it far too coarse on charts whose
  // box is much larger than the local metric scale.
  const double s1 = 5e-3;
  const double s2 = 2.0 * s1;

  // Full derivative matrix xi^i_k = e_k(xi^i) + connection correction at q.
  auto deriv_matrix = [&](const Vec& q) {
    const Frame2D f = orthonormal_frame(chart, q);
    const double x1 = field.xi1(q);
    const double x2 = field.xi2(q);
    Matrix2d d;  // d(i, k) = raw e_k(xi^{i+1})
    const Vector2d dirs[2] = {f.e1, f.e2};
    for (int k = 0; k < 2; ++k) {
      Vec e = Vec::Zero(2);
      e[0] = dirs[k][0];
      e[1] = dirs[k][1];
      auto stencil = [&](const ScalarField& sf) {
        return (sf(q - 2.0 * s1 * e) - 8.0 * sf(q - s1 * e) + 8.0 * sf(q + s1 * e) -
                sf(q + 2.0 * s1 * e)) /
               (12.0 * s1);
      };
      d(0, k) = stencil(field.xi1);
      d(1, k) = stencil(field.xi2);
    }
    Matrix2d xi;
    xi(0, 0) = d(0, 0) + x2 * f.conn(f.e1);
    xi(0, 1) = d(0, 1) + x2 * f.conn(f.e2);
    xi(1, 0) = d(1, 0) - x1 * f.conn(f.e1);
    xi(1, 1) = d(1, 1) - x1 * f.conn(f.e2);
    return xi;
  };

  const Matrix2d xi = deriv_matrix(p);
  KillingResidual out;
  out.first_order = std::max({std::abs(xi(0, 0)), std::abs(xi(1, 1)),
                              std::abs(xi(0, 1) + xi(1, 0))});

  // Rotation scalar xi12 = skew part of the derivative matrix; its own frame
  // derivatives must reproduce K times the field components.
  auto xi12_at = [&](const Vec& q) {
    const Matrix2d m = deriv_matrix(q);
    return 0.5 * (m(0, 1) - m(1, 0));
  };
  const Frame2D f = orthonormal_frame(chart, p);
  const double K = gauss_curvature(chart, p);
  const double x1 = field.xi1(p);
  const double x2 = field.xi2(p);
  const Vector2d dirs[2] = {f.e1, f.e2};
  double dxi12[2];
  for (int k = 0; k < 2; ++k) {
    Vec e = Vec::Zero(2);
    e[0] = dirs[k][0];
    e[1] = dirs[k][1];
    dxi12[k] = (xi12_at(p - 2.0 * s2 * e) - 8.0 * xi12_at(p - s2 * e) +
                8.0 * xi12_at(p + s2 * e) - xi12_at(p + 2.0 * s2 * e)) /
               (12.0 * s2);
  }
  out.second_order =
      std::max(std::abs(dxi12[0] - K * x2), std::abs(dxi12[1] + K * x1));
  return out;
}

}  // namespace kt
