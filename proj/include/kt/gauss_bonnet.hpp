#pragma once

#include <array>
#include <string>
#include <vector>

#include "kt/curve.hpp"
#include "kt/transport.hpp"

namespace kt {

/**
 * Endpoint-adapted jet for an open edge: the non-trivial infinitesimal
 * isometry along the edge whose field is tangent to the edge at both ends.
 * It exists because the transported plane span{(T(0), 0), (0, 0, 1)} and the
 * corresponding plane at the far end always meet inside a 3-dimensional
 * fiber.
 */
struct EdgeJetResult {
  Jet2 jet0;             // start jet (frame components), unit norm, fixed sign
  double sigma1 = 0.0;   // principal-angle cosines between the two planes,
  double sigma2 = 0.0;   // sorted descending; sigma1 ~ 1 always
  bool two_dimensional = false;  // planes coincide (constant-curvature edges)
};

EdgeJetResult edge_jet(const MetricChart& chart, const SampledCurve& edge);

/**
 * Both sides of the quarter-turn angle identity along one directed edge:
 *
 *   int conn(T) dt - int xi12 r^-2 <X, T> dt  =  tau(L) - tau(0) + (pi/2) m,
 *
 * where tau is the tangent angle against the chart frame, X = r (cos theta e1
 * + sin theta e2) with r changing sign at zeros of X, and m counts the net
 * quarter turns of X/r against the tangent. m must land on an integer; the
 * rounding residual is reported.
 */
struct EdgeReport {
  double conn_integral = 0.0;  // int omega_2^1 along the edge
  double correction = 0.0;     // int xi12 r^-2 <X, gamma'> dt
  double tau_change = 0.0;     // tau(L-) - tau(0+)
  int m = 0;                   // quarter-turn integer
  double m_residual = 0.0;     // |conn - corr - tau_change - (pi/2) m|
  std::vector<double> zeros;   // arclength positions where X vanishes
};

EdgeReport edge_formula(const MetricChart& chart, const SampledCurve& edge,
                        const Jet2& jet0);

/**
 * One positively oriented triangle: three directed edges laid head to tail
 * with their edge reports, the exterior/interior angles at the vertices, and
 * the closed-boundary angle identity sum(tau changes) = 2 pi - sum(exterior).
 */
struct TriangleReport {
  std::array<EdgeReport, 3> edges;
  std::array<double, 3> exterior{};  // positive for left turns
  std::array<double, 3> interior{};  // pi - exterior
  double tau_sum = 0.0;              // sum of the three tau changes
  double angle_residual = 0.0;       // |tau_sum - (2 pi - sum exterior)|
  double boundary_integral = 0.0;    // sum of conn integrals (Stokes LHS)
  double area_integral = 0.0;        // int K dA (straight-edge triangles only)
  double stokes_residual = 0.0;      // |boundary - area|; NaN when area skipped
  double excess() const { return interior[0] + interior[1] + interior[2] - M_PI; }
};

TriangleReport triangle_sum(const MetricChart& chart,
                            const std::array<const SampledCurve*, 3>& edges,
                            const std::array<Jet2, 3>& jets);

/**
 * Triangulated closed surface in a single (periodic) chart. Triangles list
 * 1-based signed edge ids: +k traverses edge k-1 from->to, -k the reverse.
 */
struct TriEdge {
  int from = 0;
  int to = 0;
  SampledCurve curve;      // sampled from -> to, coordinates unwrapped
  bool straight = false;   // coordinate-straight (enables area quadrature)
};

struct Triangulation {
  std::vector<Vec> vertices;
  std::vector<TriEdge> edges;
  std::vector<std::array<int, 3>> triangles;

  int vertex_count() const { return static_cast<int>(vertices.size()); }
  int edge_count() const { return static_cast<int>(edges.size()); }
  int face_count() const { return static_cast<int>(triangles.size()); }
  int euler_characteristic() const {
    return vertex_count() - edge_count() + face_count();
  }
};

// Tensor-grid triangulation of a doubly periodic chart: nu x nv cells, each
// split along its diagonal; 2 nu nv triangles, Euler characteristic 0.
Triangulation torus_grid(const MetricChart& chart, int nu, int nv,
                         int edge_steps = 60);

void save_triangulation(const std::string& path, const Triangulation& tri);
Triangulation load_triangulation(const MetricChart& chart, const std::string& path,
                                 int steps = 60);

/**
 * Assemble the surface total: every directed edge use gets its own transport
 * and report (no cancellation by construction), triangles get the angle
 * identity and, when their edges are straight, the Stokes residual against
 * the curvature quadrature. total is the sum over triangles of the
 * edge-formula value of the boundary connection integral; for a closed
 * surface it must reproduce 2 pi chi.
 */
struct SurfaceReport {
  double total = 0.0;
  double expected = 0.0;  // 2 pi chi
  double residual = 0.0;
  int euler = 0;
  double max_stokes_residual = 0.0;
  double max_edge_residual = 0.0;     // worst m rounding residual
  double max_pair_correction = 0.0;   // worst |corr(e) + corr(-e)| over shared edges
  int max_pair_m = 0;                 // worst |m(e) + m(-e)| (must be 0)
  std::vector<TriangleReport> triangles;
};

SurfaceReport surface_sum(const MetricChart& chart, const Triangulation& tri);

}  // namespace kt
