#include "kt/chart.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <sstream>

#include "kt/numdiff.hpp"

namespace kt {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string point_text(const Vec& p) {
  std::ostringstream os;
  os << "(";
  for (int i = 0; i < p.size(); ++i) os << (i ? ", " : "") << p[i];
  os << ")";
  return os.str();
}

}  // namespace

MetricChart::MetricChart(std::string name, MetricFn fn, Domain domain,
                         double h_scale, int spd_grid)
    : name_(std::move(name)), fn_(std::move(fn)), domain_(std::move(domain)),
      h_scale_(h_scale) {
  if (domain_.dim() < 2 || domain_.dim() > 4)
    throw SchemaError("charts support dimension 2..4");
  validate_spd(spd_grid);
}

void MetricChart::validate_spd(int grid) const {
  const int n = dim();
  const int per_axis = n == 2 ? grid : std::max(3, grid / 3);
  std::vector<int> idx(n, 0);
  Vec p = Vec::Zero(n);
  Mat g = Mat::Zero(n, n);
  for (;;) {
    for (int i = 0; i < n; ++i) {
      const Axis& a = domain_.axes[i];
      const double span = a.periodic ? a.period : a.hi - a.lo;
      p[i] = a.lo + (idx[i] + 0.5) * span / per_axis;
    }
    fn_(p, g);
    Eigen::LLT<Mat> llt(g);
    if (llt.info() != Eigen::Success)
      throw DegenerateMetric("metric is not positive definite near " + point_text(p) +
                             " on chart '" + name_ + "'");
    int axis = 0;
    while (axis < n && ++idx[axis] == per_axis) idx[axis++] = 0;
    if (axis == n) break;
  }
}

Mat MetricChart::metric(const Vec& p) const {
  if (!domain_.contains(p))
    throw DomainExceeded("point " + point_text(p) + " outside chart '" + name_ + "'");
  Mat g = Mat::Zero(dim(), dim());
  fn_(domain_.wrap(p), g);
  return g;
}

Mat MetricChart::metric_inverse(const Vec& p) const {
  Mat g = metric(p);
  if (dim() == 2) {
    const double det = g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0);
    if (!(det > 0.0) || !(g(0, 0) > 0.0))
      throw DegenerateMetric("metric not positive definite at " + point_text(p));
    Mat inv(2, 2);
    inv << g(1, 1), -g(0, 1), -g(1, 0), g(0, 0);
    return Mat(inv / det);
  }
  return Mat(g.inverse());
}

double MetricChart::sqrt_det(const Vec& p) const {
  const double det = metric(p).determinant();
  if (!(det > 0.0))
    throw DegenerateMetric("metric determinant not positive at " + point_text(p));
  return std::sqrt(det);
}

std::array<Mat, 4> MetricChart::christoffel(const Vec& p) const {
  const int n = dim();
  // dg[k](i,j) = d_k g_ij by the 4th-order stencil.
  std::array<Mat, 4> dg;
  auto metric_at = [&](const Vec& q) {
    if (!domain_.contains(q))
      throw DomainExceeded("derivative stencil left chart '" + name_ + "' near " +
                           point_text(q));
    Mat g = Mat::Zero(n, n);
    fn_(domain_.wrap(q), g);
    return g;
  };
  for (int k = 0; k < n; ++k) {
    const double h = step(k);
    Vec q = p;
    q[k] = p[k] - 2.0 * h; const Mat m2 = metric_at(q);
    q[k] = p[k] - h;       const Mat m1 = metric_at(q);
    q[k] = p[k] + h;       const Mat p1 = metric_at(q);
    q[k] = p[k] + 2.0 * h; const Mat p2 = metric_at(q);
    dg[k] = (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h);
  }
  const Mat ginv = metric_inverse(p);
  std::array<Mat, 4> gamma;
  for (int l = 0; l < n; ++l) {
    gamma[l] = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        double s = 0.0;
        for (int m = 0; m < n; ++m)
          s += ginv(l, m) * (dg[i](m, j) + dg[j](m, i) - dg[m](i, j));
        gamma[l](i, j) = 0.5 * s;
        gamma[l](j, i) = gamma[l](i, j);
      }
  }
  return gamma;
}

Vec MetricChart::gamma(const Vec& p, const Vec& a, const Vec& b) const {
  const auto G = christoffel(p);
  const int n = dim();
  Vec out = Vec::Zero(n);
  for (int l = 0; l < n; ++l) out[l] = a.dot(G[l] * b);
  return out;
}

CurvatureTensor MetricChart::curvature_tensor(const Vec& p) const {
  const int n = dim();
  CurvatureTensor R;
  R.n = n;

  // dG[k][l](i,j) = d_k Gamma^l_{ij}.
  std::array<std::array<Mat, 4>, 4> dG;
  for (int k = 0; k < n; ++k) {
    const double h = step(k);
    Vec q = p;
    q[k] = p[k] - 2.0 * h; const auto m2 = christoffel(q);
    q[k] = p[k] - h;       const auto m1 = christoffel(q);
    q[k] = p[k] + h;       const auto p1 = christoffel(q);
    q[k] = p[k] + 2.0 * h; const auto p2 = christoffel(q);
    for (int l = 0; l < n; ++l)
      dG[k][l] = (m2[l] - 8.0 * m1[l] + 8.0 * p1[l] - p2[l]) / (12.0 * h);
  }
  const auto G = christoffel(p);

  // R^i_{jkl} = d_k Gamma^i_{lj} - d_l Gamma^i_{kj}
  //           + Gamma^i_{ks} Gamma^s_{lj} - Gamma^i_{ls} Gamma^s_{kj}
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          double s = dG[k][i](l, j) - dG[l][i](k, j);
          for (int m = 0; m < n; ++m)
            s += G[i](k, m) * G[m](l, j) - G[i](l, m) * G[m](k, j);
          R.R[i][j][k][l] = s;
        }
  return R;
}

// ---------------------------------------------------------------------------
// Construction helpers and builtin fixtures
// ---------------------------------------------------------------------------

MetricChart MetricChart::from_expressions(std::string name, const std::string& g11,
                                          const std::string& g12, const std::string& g22,
                                          Domain domain, double h_scale) {
  if (domain.dim() != 2)
    throw SchemaError("expression metrics are two-dimensional (g11,g12,g22)");
  Expr e11 = Expr::parse(g11);
  Expr e12 = Expr::parse(g12.empty() ? "0" : g12);
  Expr e22 = Expr::parse(g22);
  for (const Expr* e : {&e11, &e12, &e22})
    if (e->arity() > 2)
      throw SchemaError("metric component uses a coordinate beyond u,v");
  auto fn = [e11 = std::move(e11), e12 = std::move(e12),
             e22 = std::move(e22)](const Vec& p, Mat& g) {
    const std::span<const double> vars(p.data(), static_cast<std::size_t>(p.size()));
    g(0, 0) = e11.eval(vars);
    g(0, 1) = g(1, 0) = e12.eval(vars);
    g(1, 1) = e22.eval(vars);
  };
  return MetricChart(std::move(name), std::move(fn), std::move(domain), h_scale);
}

MetricChart MetricChart::plane(double half_width) {
  Domain dom{{Axis{-half_width, half_width}, Axis{-half_width, half_width}}};
  auto fn = [](const Vec&, Mat& g) { g.setIdentity(); };
  MetricChart chart("plane", fn, dom);
  chart.closed_k_ = [](const Vec&) { return 0.0; };
  return chart;
}

MetricChart MetricChart::sphere(double rho) {
  Domain dom{{Axis{0.1, 3.0}, Axis{-kPi, kPi, true, 2.0 * kPi}}};
  auto fn = [rho](const Vec& p, Mat& g) {
    g.setZero();
    g(0, 0) = rho * rho;
    const double s = std::sin(p[0]);
    g(1, 1) = rho * rho * s * s;
  };
  MetricChart chart("sphere", fn, dom);
  chart.closed_k_ = [rho](const Vec&) { return 1.0 / (rho * rho); };
  return chart;
}

MetricChart MetricChart::half_plane() {
  Domain dom{{Axis{-10.0, 10.0}, Axis{0.05, 10.0}}};
  auto fn = [](const Vec& p, Mat& g) {
    g.setZero();
    const double w = 1.0 / (p[1] * p[1]);
    g(0, 0) = w;
    g(1, 1) = w;
  };
  MetricChart chart("half-plane", fn, dom);
  chart.closed_k_ = [](const Vec&) { return -1.0; };
  return chart;
}

MetricChart MetricChart::torus(double R, double r) {
  Domain dom{{Axis{-kPi, kPi, true, 2.0 * kPi}, Axis{-kPi, kPi, true, 2.0 * kPi}}};
  auto fn = [R, r](const Vec& p, Mat& g) {
    g.setZero();
    g(0, 0) = r * r;
    const double w = R + r * std::cos(p[0]);
    g(1, 1) = w * w;
  };
  MetricChart chart("torus", fn, dom);
  chart.closed_k_ = [R, r](const Vec& p) {
    return std::cos(p[0]) / (r * (R + r * std::cos(p[0])));
  };
  return chart;
}

MetricChart MetricChart::flat_torus(double period) {
  Domain dom{{Axis{0.0, period, true, period}, Axis{0.0, period, true, period}}};
  auto fn = [](const Vec&, Mat& g) { g.setIdentity(); };
  MetricChart chart("flat-torus", fn, dom);
  chart.closed_k_ = [](const Vec&) { return 0.0; };
  return chart;
}

MetricChart MetricChart::flat_torus_3d(double period) {
  Domain dom{{Axis{0.0, period, true, period}, Axis{0.0, period, true, period},
              Axis{0.0, period, true, period}}};
  auto fn = [](const Vec&, Mat& g) { g.setIdentity(); };
  return MetricChart("flat-torus-3d", fn, dom);
}

}  // namespace kt
