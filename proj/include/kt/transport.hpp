#pragma once

#include <vector>

#include "kt/curve.hpp"
#include "kt/frame.hpp"

namespace kt {

// A Killing jet at a point of an oriented 2-D chart: frame components of the
// field value plus the rotation scalar, packed as (xi1, xi2, xi12).
using Jet2 = Eigen::Vector3d;

// Coefficient matrix of the transport system along a unit-speed curve,
//   d/ds (xi1, xi2, xi12) = Q(s) (xi1, xi2, xi12),
// with c = conn(T), wi = omega^i(T):
//   Q = [ 0    -c    w2 ]
//       [ c     0   -w1 ]
//       [-K w2  K w1  0 ].
// Trace-free, so det of the transport matrix is conserved.
Matrix3d q_matrix(const MetricChart& chart, const Vec& p, const Vec& T);

// Same matrix evaluated on a sampled curve at arclength t.
Matrix3d q_matrix(const MetricChart& chart, const SampledCurve& curve, double t);

// Frame data and transport coefficients precomputed at every curve sample.
struct PathCoeffs {
  std::vector<Matrix3d> Q;
  std::vector<Vector2d> e1, e2;  // frame vectors at each sample
  std::vector<double> K;
};

PathCoeffs path_coefficients(const MetricChart& chart, const SampledCurve& curve);

struct TransportResult {
  // Values recorded at every other curve sample (the RK4 nodes).
  std::vector<double> t;
  std::vector<Vec> p;
  std::vector<Jet2> jet;
  std::vector<Matrix3d> U;  // transport matrix at each node; U.front() = I
  double det_drift = 0.0;   // max |det U(t) - 1| over the nodes

  const Matrix3d& final_matrix() const { return U.back(); }
};

// Transport jet0 (frame components at the start point) along the curve.
TransportResult killing_transport(const MetricChart& chart, const SampledCurve& curve,
                                  const Jet2& jet0);

// Conversions between frame components (e1, e2) and tangent/normal components
// (T, N = JT) of a jet at a point with unit tangent T. The rotation scalar is
// frame-independent.
Jet2 tn_to_frame(const MetricChart& chart, const Vec& p, const Vec& T,
                 const Jet2& jet_tn);
Jet2 frame_to_tn(const MetricChart& chart, const Vec& p, const Vec& T,
                 const Jet2& jet_frame);

// Kernel of U - I: jets that return to themselves.
struct FixedDirections {
  int dims = 0;
  std::vector<Jet2> basis;          // orthonormal, spanning the kernel
  Eigen::Vector3d singular_values;  // of U - I, descending
};

FixedDirections fixed_directions(const Matrix3d& U, double tol = 1e-6);

struct HolonomyResult {
  Matrix3d U = Matrix3d::Identity();
  double det_drift = 0.0;
  // Largest |arg| over eigenvalues of U: the rotation angle of the holonomy,
  // folded into [0, pi]. Shears and boosts report 0.
  double angle = 0.0;
  int fixed_dims = 0;
  std::vector<Jet2> fixed_basis;
};

// Transport around a closed curve (NotClosed otherwise).
HolonomyResult holonomy(const MetricChart& chart, const SampledCurve& curve);

// Transport around the small frame-aligned square through p with sides
// h e1(p), h e2(p) (coordinate-straight segments), returning (U_loop - I)/h^2.
// As h -> 0 the bottom row tends to -(K_1, K_2, 0) and the rest vanishes;
// constant-curvature charts give the zero matrix.
Matrix3d curvature_defect(const MetricChart& chart, const Vec& p, double h,
                          int side_steps = 64);

// Transport jet0 along a geodesic and measure how well the field part
// satisfies the Jacobi equation D_T D_T X = R(T, X) T, via nested first-order
// covariant differences on the recorded nodes. Throws NotGeodesic if the
// curve has measurable geodesic curvature.
struct JacobiReport {
  double max_residual = 0.0;
  std::vector<double> t;         // interior nodes where the residual exists
  std::vector<double> residual;  // g-norm of the defect at those nodes
};

JacobiReport jacobi_check(const MetricChart& chart, const SampledCurve& curve,
                          const Jet2& jet0);

}  // namespace kt
