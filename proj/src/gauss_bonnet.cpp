#include "kt/gauss_bonnet.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "json.hpp"
#include "kt/errors.hpp"
#include "kt/frame.hpp"

namespace kt {

namespace {

void require_2d(const MetricChart& chart, const char* who) {
  if (chart.dim() != 2) {
    throw SchemaError(std::string(who) + ": chart must be 2-dimensional");
  }
}

// Nearest representative of a modulo 2 pi (for lifting angle sequences).
double wrap_full(double a) { return std::remainder(a, 2.0 * M_PI); }
// Nearest representative modulo pi (for lifting direction sequences, which
// live on the circle of lines: the direction of X flips through a zero).
double wrap_half(double a) { return a - M_PI * std::round(a / M_PI); }

/**
 * Composite Simpson on uniformly spaced values over n intervals. Odd n gets
 * a 3/8 tail over the last three intervals so the order stays four.
 */
double integrate_uniform(const std::vector<double>& f, double h) {
  const int n = static_cast<int>(f.size()) - 1;
  if (n <= 0) return 0.0;
  if (n == 1) return 0.5 * h * (f[0] + f[1]);
  double s = 0.0;
  const int m = (n % 2 == 0) ? n : n - 3;
  for (int k = 0; k + 2 <= m; k += 2) {
    s += h / 3.0 * (f[k] + 4.0 * f[k + 1] + f[k + 2]);
  }
  if (n % 2) {
    s += 3.0 * h / 8.0 * (f[m] + 3.0 * f[m + 1] + 3.0 * f[m + 2] + f[m + 3]);
  }
  return s;
}

// Per-node frame data along an edge: connection coefficient, coframe values
// on the tangent, and the continuously lifted tangent angle tau.
struct EdgeNodes {
  std::vector<double> conn, w1, w2, tau;
};

EdgeNodes edge_nodes(const MetricChart& chart, const SampledCurve& edge) {
  const int n = edge.steps();
  EdgeNodes nd;
  nd.conn.reserve(n + 1);
  nd.w1.reserve(n + 1);
  nd.w2.reserve(n + 1);
  nd.tau.reserve(n + 1);
  for (int k = 0; k <= n; ++k) {
    const Frame2D fr = orthonormal_frame(chart, edge.p[2 * k]);
    const Vector2d T = edge.T[2 * k];
    const double a = fr.omega1(T);
    const double b = fr.omega2(T);
    nd.conn.push_back(fr.conn(T));
    nd.w1.push_back(a);
    nd.w2.push_back(b);
    const double raw = std::atan2(b, a);
    nd.tau.push_back(k == 0 ? raw : nd.tau.back() + wrap_full(raw - nd.tau.back()));
  }
  return nd;
}

int max_abs_index(const Jet2& j) {
  int idx = 0;
  for (int i = 1; i < 3; ++i) {
    if (std::abs(j[i]) > std::abs(j[idx])) idx = i;
  }
  return idx;
}

double cross2(const Vec& a, const Vec& b) { return a[0] * b[1] - a[1] * b[0]; }

bool is_straight(const SampledCurve& c) {
  const Vec d = c.p.back() - c.p.front();
  const double dn = d.norm();
  if (dn < 1e-14) return false;
  for (const Vec& p : c.p) {
    if (std::abs(cross2(p - c.p.front(), d)) > 1e-9 * dn * (dn + 1.0)) return false;
  }
  return true;
}

/**
 * Degree-5 quadrature of K dA over the coordinate triangle (v0, v1, v2):
 * uniform 4x4 barycentric refinement, 7-point rule per cell. The result is
 * signed by the coordinate orientation of the triangle, matching the sign of
 * the boundary integral of the connection form along its directed edges.
 */
double triangle_area_integral(const MetricChart& chart, const Vec& v0, const Vec& v1,
                              const Vec& v2) {
  static const double s15 = std::sqrt(15.0);
  static const double a1 = (6.0 - s15) / 21.0, w1 = (155.0 - s15) / 1200.0;
  static const double a2 = (6.0 + s15) / 21.0, w2 = (155.0 + s15) / 1200.0;
  static const double rule[7][4] = {
      {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 9.0 / 40.0},
      {1.0 - 2.0 * a1, a1, a1, w1},
      {a1, 1.0 - 2.0 * a1, a1, w1},
      {a1, a1, 1.0 - 2.0 * a1, w1},
      {1.0 - 2.0 * a2, a2, a2, w2},
      {a2, 1.0 - 2.0 * a2, a2, w2},
      {a2, a2, 1.0 - 2.0 * a2, w2},
  };

  auto cell_value = [&](const Vec& q0, const Vec& q1, const Vec& q2) {
    const double jac = cross2(q1 - q0, q2 - q0);  // twice the signed area
    double acc = 0.0;
    for (const auto& r : rule) {
      const Vec p = r[0] * q0 + r[1] * q1 + r[2] * q2;
      const double k = gauss_curvature(chart, p);
      const double det = Mat(chart.metric(p)).determinant();
      acc += r[3] * k * std::sqrt(det);
    }
    return 0.5 * jac * acc;
  };

  const int N = 4;
  auto lattice = [&](int i, int j) -> Vec {
    return v0 + (static_cast<double>(i) / N) * (v1 - v0) +
           (static_cast<double>(j) / N) * (v2 - v0);
  };
  double total = 0.0;
  for (int i = 0; i < N; ++i) {
    for (int j = 0; i + j < N; ++j) {
      total += cell_value(lattice(i, j), lattice(i + 1, j), lattice(i, j + 1));
      if (i + j < N - 1) {
        total += cell_value(lattice(i + 1, j), lattice(i + 1, j + 1), lattice(i, j + 1));
      }
    }
  }
  return total;
}

TriangleReport assemble_triangle(const MetricChart& chart,
                                 const std::array<const SampledCurve*, 3>& es,
                                 std::array<EdgeReport, 3> reps) {
  TriangleReport out;
  out.edges = std::move(reps);
  double ext_sum = 0.0;
  for (int a = 0; a < 3; ++a) {
    const SampledCurve& in = *es[(a + 2) % 3];
    const SampledCurve& next = *es[a];
    const Vec p = in.p.back();
    const Vec q = chart.domain().unwrap_near(next.p.front(), p);
    if ((q - p).norm() > 1e-6) {
      throw SchemaError("triangle edges are not laid head to tail");
    }
    const Vec Tin = in.T.back();
    const Vec Tout = next.T.front();
    const Mat g = chart.metric(p);
    const Matrix2d J = rotation_j(chart, p);
    const double c = Tin.dot(g * Tout);
    const double s = Vec(J * Tin).dot(g * Tout);
    const double eps = std::atan2(s, c);
    if (M_PI - std::abs(eps) <= 1e-8) {
      throw DegenerateVertexAngle("antiparallel tangents at a triangle vertex");
    }
    out.exterior[a] = eps;
    out.interior[a] = M_PI - eps;
    ext_sum += eps;
  }
  out.tau_sum = out.edges[0].tau_change + out.edges[1].tau_change +
                out.edges[2].tau_change;
  // The turning identity holds modulo 2 pi times the winding of the
  // coordinate frame around the triangle (nonzero when the triangle encloses
  // a frame singularity, e.g. a chart pole).
  out.angle_residual = std::abs(wrap_full(out.tau_sum - (2.0 * M_PI - ext_sum)));
  out.boundary_integral = out.edges[0].conn_integral + out.edges[1].conn_integral +
                          out.edges[2].conn_integral;
  if (is_straight(*es[0]) && is_straight(*es[1]) && is_straight(*es[2])) {
    const Vec v0 = es[0]->p.front();
    const Vec v1 = chart.domain().unwrap_near(es[0]->p.back(), v0);
    const Vec v2 = chart.domain().unwrap_near(es[1]->p.back(), v1);
    out.area_integral = triangle_area_integral(chart, v0, v1, v2);
    out.stokes_residual = std::abs(out.boundary_integral - out.area_integral);
  } else {
    out.area_integral = std::numeric_limits<double>::quiet_NaN();
    out.stokes_residual = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

}  // namespace

EdgeJetResult edge_jet(const MetricChart& chart, const SampledCurve& edge) {
  require_2d(chart, "edge_jet");
  if (edge.closed) throw SchemaError("edge_jet: edge must be open");
  if (edge.samples() < 5) throw SchemaError("edge_jet: too few samples");

  const EdgeNodes nd = edge_nodes(chart, edge);
  const double tau0 = nd.tau.front();
  const double tauL = nd.tau.back();
  const Matrix3d U = killing_transport(chart, edge, Jet2::Zero()).final_matrix();

  const Jet2 v1(std::cos(tau0), std::sin(tau0), 0.0);
  const Jet2 v2(0.0, 0.0, 1.0);
  const Jet2 w1 = U * v1;
  const Jet2 w2 = U * v2;

  // Principal-angle cosines between the transported plane and the far plane.
  const Jet2 a1 = w1.normalized();
  const Jet2 a2 = (w2 - a1.dot(w2) * a1).normalized();
  Eigen::Matrix<double, 3, 2> A, B;
  A.col(0) = a1;
  A.col(1) = a2;
  B.col(0) = Jet2(std::cos(tauL), std::sin(tauL), 0.0);
  B.col(1) = v2;
  const Eigen::Matrix2d M = B.transpose() * A;
  Eigen::JacobiSVD<Eigen::Matrix2d> svd(M);

  EdgeJetResult out;
  out.sigma1 = svd.singularValues()[0];
  out.sigma2 = svd.singularValues()[1];

  if (out.sigma2 >= 1.0 - 1e-9) {
    // The planes coincide (constant-curvature situations): the whole far
    // plane pulls back; take the basis vector with the larger field part.
    out.two_dimensional = true;
    const Jet2 b1 = U.lu().solve(B.col(0));
    const Jet2 b2 = U.lu().solve(B.col(1));
    out.jet0 = std::hypot(b1[0], b1[1]) >= std::hypot(b2[0], b2[1]) ? b1 : b2;
  } else if (out.sigma2 > 1.0 - 1e-6) {
    throw IntersectionIllConditioned(
        "edge_jet: intersection numerically 2-dimensional on a generic edge "
        "(second principal cosine " +
        std::to_string(out.sigma2) + "); refine the edge sampling");
  } else {
    const Jet2 n_mu = w1.cross(w2).normalized();
    const Jet2 n_far(std::sin(tauL), -std::cos(tauL), 0.0);
    const Jet2 w = n_mu.cross(n_far);
    out.jet0 = U.lu().solve(w);
  }

  out.jet0.normalize();
  if (out.jet0[max_abs_index(out.jet0)] < 0.0) out.jet0 = -out.jet0;
  return out;
}

EdgeReport edge_formula(const MetricChart& chart, const SampledCurve& edge,
                        const Jet2& jet0) {
  require_2d(chart, "edge_formula");
  if (edge.samples() < 9) throw SchemaError("edge_formula: too few samples");
  if (jet0.norm() == 0.0) throw SchemaError("edge_formula: zero jet");

  const int n = edge.steps();
  const double h = edge.length / n;
  const TransportResult tr = killing_transport(chart, edge, jet0);
  const EdgeNodes nd = edge_nodes(chart, edge);

  double rmax = 0.0;
  for (const Jet2& j : tr.jet) rmax = std::max(rmax, std::hypot(j[0], j[1]));
  if (rmax == 0.0) throw SchemaError("edge_formula: jet has no field part");
  const double wtol = 1e-6 * rmax;  // near-zero window for the integrand switch

  // Lift the direction angle of X modulo pi (the signed radius r changes sign
  // through zeros, the direction line turns continuously).
  std::vector<double> theta(n + 1), rs(n + 1);
  std::vector<bool> small(n + 1, false);
  for (int k = 0; k <= n; ++k) {
    const double x1 = tr.jet[k][0], x2 = tr.jet[k][1];
    const double r = std::hypot(x1, x2);
    if (r < wtol) {
      // At a zero the field direction is normal to the curve, so the lifted
      // direction angle there is known exactly.
      small[k] = true;
      const double limit = nd.tau[k] + 0.5 * M_PI;
      theta[k] = (k == 0) ? limit : theta[k - 1] + wrap_half(limit - theta[k - 1]);
      rs[k] = 0.0;
      continue;
    }
    const double phi = std::atan2(x2, x1);
    if (k == 0) {
      theta[k] = phi;
      rs[k] = r;
    } else {
      theta[k] = theta[k - 1] + wrap_half(phi - theta[k - 1]);
      rs[k] = std::cos(phi - theta[k]) >= 0.0 ? r : -r;
    }
  }

  EdgeReport out;
  out.conn_integral = integrate_uniform(nd.conn, h);
  out.tau_change = nd.tau.back() - nd.tau.front();

  // Correction integrand; near zeros of X switch to conn - theta' (the angle
  // identity read backwards), which stays bounded by construction.
  std::vector<double> g(n + 1);
  auto theta_prime = [&](int k) {
    if (k >= 2 && k <= n - 2) {
      return (theta[k - 2] - 8.0 * theta[k - 1] + 8.0 * theta[k + 1] - theta[k + 2]) /
             (12.0 * h);
    }
    if (k < 2) {
      return (-3.0 * theta[k] + 4.0 * theta[k + 1] - theta[k + 2]) / (2.0 * h);
    }
    return (3.0 * theta[k] - 4.0 * theta[k - 1] + theta[k - 2]) / (2.0 * h);
  };
  for (int k = 0; k <= n; ++k) {
    if (small[k]) {
      g[k] = nd.conn[k] - theta_prime(k);
    } else {
      const double x1 = tr.jet[k][0], x2 = tr.jet[k][1];
      const double r2 = x1 * x1 + x2 * x2;
      g[k] = tr.jet[k][2] * (x1 * nd.w1[k] + x2 * nd.w2[k]) / r2;
    }
  }
  out.correction = integrate_uniform(g, h);

  const double lhs = out.conn_integral - out.correction - out.tau_change;
  out.m = static_cast<int>(std::lround(lhs / (0.5 * M_PI)));
  out.m_residual = std::abs(lhs - 0.5 * M_PI * out.m);

  // Zero locations: near-zero nodes plus sign changes of the signed radius.
  std::vector<double> zeros;
  int prev_idx = -1;
  double prev_sign = 0.0;
  auto push_zero = [&](double t) {
    if (zeros.empty() || t - zeros.back() > 1.5 * h) {
      zeros.push_back(t);
    }
  };
  for (int k = 0; k <= n; ++k) {
    if (small[k]) {
      push_zero(tr.t[k]);
      continue;
    }
    const double s = rs[k] > 0.0 ? 1.0 : -1.0;
    if (prev_sign != 0.0 && s != prev_sign) {
      const double span = tr.t[k] - tr.t[prev_idx];
      push_zero(tr.t[prev_idx] + span * rs[prev_idx] / (rs[prev_idx] - rs[k]));
    }
    prev_sign = s;
    prev_idx = k;
  }
  std::sort(zeros.begin(), zeros.end());
  for (size_t i = 1; i < zeros.size(); ++i) {
    if (zeros[i] - zeros[i - 1] < 2.0 * h) {
      throw ZeroAtInteriorUnresolved(
          "edge_formula: two zeros of the field closer than the sample spacing");
    }
  }
  out.zeros = std::move(zeros);
  return out;
}

TriangleReport triangle_sum(const MetricChart& chart,
                            const std::array<const SampledCurve*, 3>& edges,
                            const std::array<Jet2, 3>& jets) {
  require_2d(chart, "triangle_sum");
  std::array<EdgeReport, 3> reps;
  for (int a = 0; a < 3; ++a) {
    reps[a] = edge_formula(chart, *edges[a], jets[a]);
  }
  return assemble_triangle(chart, edges, reps);
}

Triangulation torus_grid(const MetricChart& chart, int nu, int nv, int edge_steps) {
  require_2d(chart, "torus_grid");
  const Domain& dom = chart.domain();
  if (!dom.axes[0].periodic || !dom.axes[1].periodic) {
    throw SchemaError("torus_grid: both axes must be periodic");
  }
  if (nu < 2 || nv < 2) throw SchemaError("torus_grid: need at least 2x2 cells");

  const double du = dom.axes[0].period / nu;
  const double dv = dom.axes[1].period / nv;
  const double u0 = dom.axes[0].lo;
  const double v0 = dom.axes[1].lo;

  Triangulation tri;
  auto vid = [&](int i, int j) { return (i % nu) * nv + (j % nv); };
  auto vat = [&](int i, int j) {
    Vec p(2);
    p << u0 + i * du, v0 + j * dv;
    return p;
  };
  for (int i = 0; i < nu; ++i) {
    for (int j = 0; j < nv; ++j) tri.vertices.push_back(vat(i, j));
  }

  CurveOptions opts;
  opts.steps = edge_steps;
  auto add_edge = [&](int fi, int fj, int ti, int tj) {
    TriEdge e;
    e.from = vid(fi, fj);
    e.to = vid(ti, tj);
    e.curve = straight_segment(chart, vat(fi, fj), vat(ti, tj), opts);
    e.straight = true;
    tri.edges.push_back(std::move(e));
  };
  // Edge blocks: horizontal [0, nu nv), vertical [nu nv, 2 nu nv), diagonal
  // [2 nu nv, 3 nu nv); ids within a block are i * nv + j.
  for (int i = 0; i < nu; ++i) {
    for (int j = 0; j < nv; ++j) add_edge(i, j, i + 1, j);
  }
  for (int i = 0; i < nu; ++i) {
    for (int j = 0; j < nv; ++j) add_edge(i, j, i, j + 1);
  }
  for (int i = 0; i < nu; ++i) {
    for (int j = 0; j < nv; ++j) add_edge(i, j, i + 1, j + 1);
  }

  const int nh = nu * nv;
  auto eh = [&](int i, int j) { return (i % nu) * nv + (j % nv) + 1; };
  auto ev = [&](int i, int j) { return nh + (i % nu) * nv + (j % nv) + 1; };
  auto ed = [&](int i, int j) { return 2 * nh + (i % nu) * nv + (j % nv) + 1; };
  for (int i = 0; i < nu; ++i) {
    for (int j = 0; j < nv; ++j) {
      tri.triangles.push_back({eh(i, j), ev(i + 1, j), -ed(i, j)});
      tri.triangles.push_back({ed(i, j), -eh(i, j + 1), -ev(i, j)});
    }
  }
  return tri;
}

void save_triangulation(const std::string& path, const Triangulation& tri) {
  nlohmann::json j;
  j["vertices"] = nlohmann::json::array();
  for (const Vec& v : tri.vertices) j["vertices"].push_back({v[0], v[1]});
  j["edges"] = nlohmann::json::array();
  for (const TriEdge& e : tri.edges) {
    nlohmann::json samples = nlohmann::json::array();
    for (const Vec& p : e.curve.p) samples.push_back({p[0], p[1]});
    j["edges"].push_back({{"from", e.from}, {"to", e.to}, {"samples", samples}});
  }
  j["triangles"] = tri.triangles;
  std::ofstream f(path);
  if (!f) throw SchemaError("save_triangulation: cannot open " + path);
  f << j.dump(1) << "\n";
  if (!f) throw SchemaError("save_triangulation: write failed for " + path);
}

Triangulation load_triangulation(const MetricChart& chart, const std::string& path,
                                 int steps) {
  require_2d(chart, "load_triangulation");
  std::ifstream f(path);
  if (!f) throw SchemaError("load_triangulation: cannot open " + path);
  nlohmann::json j;
  try {
    f >> j;
  } catch (const std::exception& ex) {
    throw SchemaError("load_triangulation: " + std::string(ex.what()));
  }
  if (!j.contains("vertices") || !j.contains("edges") || !j.contains("triangles")) {
    throw SchemaError("load_triangulation: missing vertices/edges/triangles");
  }

  Triangulation tri;
  for (const auto& v : j["vertices"]) {
    if (!v.is_array() || v.size() != 2) {
      throw SchemaError("load_triangulation: vertex entries must be [u, v]");
    }
    Vec p(2);
    p << v[0].get<double>(), v[1].get<double>();
    tri.vertices.push_back(p);
  }

  CurveOptions opts;
  opts.steps = steps;
  for (const auto& e : j["edges"]) {
    if (!e.contains("from") || !e.contains("to") || !e.contains("samples")) {
      throw SchemaError("load_triangulation: edge entries need from/to/samples");
    }
    TriEdge te;
    te.from = e["from"].get<int>();
    te.to = e["to"].get<int>();
    if (te.from < 0 || te.from >= tri.vertex_count() || te.to < 0 ||
        te.to >= tri.vertex_count()) {
      throw SchemaError("load_triangulation: edge vertex id out of range");
    }
    std::vector<Vec> pts;
    for (const auto& s : e["samples"]) {
      if (!s.is_array() || s.size() != 2) {
        throw SchemaError("load_triangulation: samples must be [u, v] pairs");
      }
      Vec p(2);
      p << s[0].get<double>(), s[1].get<double>();
      pts.push_back(p);
    }
    if (pts.size() < 4) {
      throw SchemaError("load_triangulation: edges need at least 4 samples");
    }
    // Cubic interpolation through the stored polyline (uniform index
    // parameter), then arclength resampling.
    const int M = static_cast<int>(pts.size());
    const CurveFn fn = [pts, M](double x) -> Vec {
      int k = static_cast<int>(std::floor(x));
      k = std::max(1, std::min(k, M - 3));
      Vec acc(2);
      acc.setZero();
      for (int a = -1; a <= 2; ++a) {
        double w = 1.0;
        for (int b = -1; b <= 2; ++b) {
          if (b != a) w *= (x - (k + b)) / static_cast<double>(a - b);
        }
        acc += w * pts[k + a];
      }
      return acc;
    };
    te.curve = reparam_arclength(chart, fn, 0.0, M - 1.0, opts);
    te.straight = is_straight(te.curve);
    tri.edges.push_back(std::move(te));
  }

  for (const auto& t : j["triangles"]) {
    if (!t.is_array() || t.size() != 3) {
      throw SchemaError("load_triangulation: triangles must list 3 edge ids");
    }
    std::array<int, 3> ids{t[0].get<int>(), t[1].get<int>(), t[2].get<int>()};
    for (int id : ids) {
      if (id == 0 || std::abs(id) > tri.edge_count()) {
        throw SchemaError("load_triangulation: edge id out of range");
      }
    }
    tri.triangles.push_back(ids);
  }
  return tri;
}

SurfaceReport surface_sum(const MetricChart& chart, const Triangulation& tri) {
  require_2d(chart, "surface_sum");
  const int e = tri.edge_count();
  const int f = tri.face_count();
  if (e == 0 || f == 0) throw SchemaError("surface_sum: empty triangulation");

  std::vector<int> count(e, 0), net(e, 0);
  for (const auto& t : tri.triangles) {
    for (int id : t) {
      if (id == 0 || std::abs(id) > e) {
        throw SchemaError("surface_sum: edge id out of range");
      }
      count[std::abs(id) - 1] += 1;
      net[std::abs(id) - 1] += id > 0 ? 1 : -1;
    }
  }
  for (int k = 0; k < e; ++k) {
    if (count[k] != 2) {
      throw NotClosed("surface_sum: edge " + std::to_string(k + 1) + " used " +
                      std::to_string(count[k]) + " times (closed surfaces use 2)");
    }
    if (net[k] != 0) {
      throw InconsistentOrientation("surface_sum: edge " + std::to_string(k + 1) +
                                    " traversed twice in the same direction");
    }
  }
  if (3 * f != 2 * e) {
    throw NotClosed("surface_sum: 3f != 2e");
  }

  // Each directed use gets an independent transport and report; the shared
  // isometry is pinned by handing the far-end jet to the reversed traversal.
  struct DirectedEdge {
    SampledCurve rev;
    EdgeReport fwd, bwd;
  };
  std::vector<DirectedEdge> data(e);
  SurfaceReport out;
  for (int k = 0; k < e; ++k) {
    const SampledCurve& c = tri.edges[k].curve;
    const EdgeJetResult ej = edge_jet(chart, c);
    data[k].fwd = edge_formula(chart, c, ej.jet0);
    const Jet2 jetL = killing_transport(chart, c, ej.jet0).jet.back();
    data[k].rev = reversed_curve(c);
    data[k].bwd = edge_formula(chart, data[k].rev, jetL);
    out.max_pair_correction = std::max(
        out.max_pair_correction, std::abs(data[k].fwd.correction + data[k].bwd.correction));
    out.max_pair_m = std::max(out.max_pair_m, std::abs(data[k].fwd.m + data[k].bwd.m));
    out.max_edge_residual = std::max(
        out.max_edge_residual, std::max(data[k].fwd.m_residual, data[k].bwd.m_residual));
  }

  out.triangles.reserve(f);
  for (const auto& t : tri.triangles) {
    std::array<const SampledCurve*, 3> curves;
    std::array<EdgeReport, 3> reps;
    for (int a = 0; a < 3; ++a) {
      const int id = t[a];
      const int k = std::abs(id) - 1;
      curves[a] = id > 0 ? &tri.edges[k].curve : &data[k].rev;
      reps[a] = id > 0 ? data[k].fwd : data[k].bwd;
    }
    TriangleReport tr = assemble_triangle(chart, curves, reps);
    for (const EdgeReport& r : tr.edges) {
      out.total += r.tau_change + r.correction + 0.5 * M_PI * r.m;
    }
    if (!std::isnan(tr.stokes_residual)) {
      out.max_stokes_residual = std::max(out.max_stokes_residual, tr.stokes_residual);
    }
    out.triangles.push_back(std::move(tr));
  }

  out.euler = tri.euler_characteristic();
  out.expected = 2.0 * M_PI * out.euler;
  out.residual = std::abs(out.total - out.expected);
  return out;
}

}  // namespace kt
