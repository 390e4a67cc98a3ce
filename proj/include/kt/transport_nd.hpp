#pragma once

#include <vector>

#include "kt/curve.hpp"
#include "kt/frame.hpp"

namespace kt {

// A Killing jet in arbitrary dimension: the field value X in coordinate
// components and the derivative operator A in components of the
// g-orthonormal Gram-Schmidt frame at the same point (so skewness of A is
// plain matrix skewness). In skew mode A must be skew; affine mode drops
// that requirement and transports an infinitesimal affine map instead.
struct JetND {
  Vec X;
  Mat A;
};

enum class TransportMode { skew, affine };

struct TransportNdResult {
  std::vector<double> t;  // arclength at the recorded nodes
  std::vector<Vec> p;
  std::vector<JetND> jet;
  // Largest ||A + A^T||_max over the nodes; meaningful in skew mode, where it
  // should sit at the integration error floor.
  double skew_drift = 0.0;
};

// Integrate the coordinate form of the transport system
//   nabla_T X = A T,   nabla_T A = R(T, X)
// along the curve. In skew mode the initial A must be skew (SchemaError
// otherwise) and skewness is preserved up to integration error.
TransportNdResult killing_transport_nd(const MetricChart& chart,
                                       const SampledCurve& curve, const JetND& jet0,
                                       TransportMode mode = TransportMode::skew);

// Parallel orthonormal frames along the curve: the Gram-Schmidt frame at the
// start point transported with nabla_T = 0, recorded at the same nodes as
// killing_transport_nd. Columns stay g-orthonormal up to integration error.
std::vector<Mat> parallel_frames(const MetricChart& chart, const SampledCurve& curve);

// Curvature operator of the jet connection, evaluated on tangent vectors
// Y, Z at p: the field slot is identically zero and the operator slot is
//   (nabla_X R)(Y, Z) + [R(Y, Z), A] + R(Y, AZ) + R(AY, Z),
// with nabla R formed by finite differences of the curvature tensor along X.
// Returned with the same component conventions as JetND.
JetND tilde_curvature_nd(const MetricChart& chart, const Vec& p, const Vec& Y,
                         const Vec& Z, const JetND& jet);

}  // namespace kt
