#pragma once

#include <optional>

#include "kt/chart.hpp"
#include "kt/scalar_field.hpp"

namespace kt {

// Oriented orthonormal frame at one point of a 2-D chart, with the
// connection coefficient of the oriented coframe attached.
//
// Conventions pinned by the structure-equation residual test:
//   d omega^1 = omega^2 ^ conn,   d omega^2 = -omega^1 ^ conn,
//   d conn    = K omega^1 ^ omega^2,
// where conn is the value of the connection form on tangent vectors and the
// frame derivative reads  nabla_w e2 = conn(w) e1,  nabla_w e1 = -conn(w) e2.
struct Frame2D {
  Vector2d p;         // base point (as given, unwrapped)
  Vector2d e1, e2;    // coordinate components, det(e1,e2) > 0
  Vector2d w1, w2;    // coframe rows: omega^i(w) = w_i . w
  Vector2d conn_cov;  // conn(w) = conn_cov . w

  double omega1(const Vector2d& w) const { return w1.dot(w); }
  double omega2(const Vector2d& w) const { return w2.dot(w); }
  double conn(const Vector2d& w) const { return conn_cov.dot(w); }
};

// Metric and frame vectors only (no connection); cheap building block for
// derivative stencils.
struct FrameBasis {
  Mat g;
  Vec e1, e2;
};

FrameBasis frame_basis(const MetricChart& chart, const Vec& p);

// Gram-Schmidt of (d_u, d_v) under g, oriented, with the connection
// coefficient evaluated by finite differences of the frame field plus the
// Christoffel correction.
Frame2D orthonormal_frame(const MetricChart& chart, const Vec& p);

// Columns form a g-orthonormal frame obtained by Gram-Schmidt of the
// coordinate basis; works in any supported dimension.
Mat orthonormal_frame_nd(const MetricChart& chart, const Vec& p);

// conn evaluated on w; convenience wrapper over orthonormal_frame.
double connection_coefficient(const MetricChart& chart, const Vec& p, const Vec& w);

double gauss_curvature(const MetricChart& chart, const Vec& p);

// Rotation by +90 degrees in the oriented tangent plane: J e1 = e2.
Matrix2d rotation_j(const MetricChart& chart, const Vec& p);

// Covariant frame derivatives of the Gaussian curvature, assembled level by
// level through the structure-equation recursion. Index convention:
// K_i = e_i(K); second and third levels add the connection corrections, e.g.
//   K_11 = e1(K_1) + K_2 conn(e1),        K_22 = e2(K_2) - K_1 conn(e2),
//   K_111 = e1(K_11) + 2 K_12 conn(e1),   K_121 = e1(K_12) - (K_11-K_22) conn(e1).
struct CurvatureJet {
  double K = 0.0;
  double K1 = 0.0, K2 = 0.0;
  double K11 = 0.0, K12 = 0.0, K22 = 0.0;
  double K111 = 0.0, K112 = 0.0, K121 = 0.0, K122 = 0.0, K221 = 0.0, K222 = 0.0;

  // Diagnostics: the mixed second derivative measured both ways, and the two
  // third-order consistency identities (relative residuals).
  double k12_mismatch = 0.0;
  double identity_residual_1 = 0.0;  // K112 vs K121 - K2*K
  double identity_residual_2 = 0.0;  // K122 vs K221 + K1*K
  double identity_residual() const {
    return std::max(identity_residual_1, identity_residual_2);
  }
};

struct JetOptions {
  // Base step: h_scale times the smallest axis extent; the ladder then uses
  // 2h, 4h, 8h for the three derivative levels.
  double h_scale = 1e-3;
  // Stencil order of the outermost (third-derivative) level: 4 (accurate) or
  // 2 (half the cost, larger truncation error in the third-level values).
  int level3_order = 4;
  // Throw ToleranceExceeded when the consistency identities exceed this.
  double identity_tol = 1e-4;
  // Skip the identity check entirely (diagnostics still reported).
  bool enforce_identities = true;
};

CurvatureJet curvature_jet(const MetricChart& chart, const Vec& p,
                           const JetOptions& opts = {});

// A candidate infinitesimal isometry given by its frame components.
struct VectorFieldJet {
  ScalarField xi1;
  ScalarField xi2;

  static VectorFieldJet from_expressions(const MetricChart& chart,
                                         const std::string& xi1_text,
                                         const std::string& xi2_text);
};

// First-order residual: failure of the derivative matrix xi^i_k to be skew
// (the Killing equations). Second-order residual: failure of the derived
// rotation scalar to satisfy its prolonged equations e1(xi12) = K xi^2,
// e2(xi12) = -K xi^1. Both vanish iff the field is Killing near p.
struct KillingResidual {
  double first_order = 0.0;
  double second_order = 0.0;
};

KillingResidual killing_residual(const MetricChart& chart, const VectorFieldJet& field,
                                 const Vec& p);

}  // namespace kt
