#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "kt/geometry.hpp"
#include "kt/scalar_field.hpp"

namespace kt {

// Coordinate components of the (1,3) curvature tensor at a point, with the
// convention R(d_k, d_l) d_j = R^i_{jkl} d_i.
struct CurvatureTensor {
  int n = 0;
  double R[4][4][4][4] = {};

  // Matrix of the operator R(Y, Z): column j holds the components of
  // R(Y, Z) d_j.
  Mat op(const Vec& Y, const Vec& Z) const {
    Mat M = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) s += R[i][j][k][l] * Y[k] * Z[l];
        M(i, j) = s;
      }
    return M;
  }
};

// A single coordinate chart with a Riemannian metric. Immutable after
// construction; all evaluations are pure.
class MetricChart {
 public:
  using MetricFn = std::function<void(const Vec&, Mat&)>;

  MetricChart(std::string name, MetricFn fn, Domain domain,
              double h_scale = ScalarField::kDefaultHScale, int spd_grid = 16);

  // 2-D chart from expression-text components (g12 optional empty = "0").
  static MetricChart from_expressions(std::string name, const std::string& g11,
                                      const std::string& g12, const std::string& g22,
                                      Domain domain,
                                      double h_scale = ScalarField::kDefaultHScale);

  // Builtin fixtures.
  static MetricChart plane(double half_width = 10.0);
  static MetricChart sphere(double rho = 1.0);      // g = diag(rho^2, rho^2 sin^2 u)
  static MetricChart half_plane();                  // g = (du^2 + dv^2)/v^2, K = -1
  static MetricChart torus(double R = 2.0, double r = 1.0);
  static MetricChart flat_torus(double period = 2.0 * 3.14159265358979323846);
  static MetricChart flat_torus_3d(double period = 2.0 * 3.14159265358979323846);

  const std::string& name() const { return name_; }
  int dim() const { return domain_.dim(); }
  const Domain& domain() const { return domain_; }
  double h_scale() const { return h_scale_; }
  double step(int axis) const { return h_scale_ * domain_.axes[axis].extent(); }

  // Closed-form curvature when the fixture has one (used as a test oracle).
  bool has_closed_form_curvature() const { return static_cast<bool>(closed_k_); }
  double closed_form_curvature(const Vec& p) const { return closed_k_(p); }

  Mat metric(const Vec& p) const;          // wraps periodic axes, checks the box
  Mat metric_inverse(const Vec& p) const;
  double sqrt_det(const Vec& p) const;
  double inner(const Vec& p, const Vec& a, const Vec& b) const {
    return a.dot(metric(p) * b);
  }
  double norm(const Vec& p, const Vec& a) const { return std::sqrt(inner(p, a, a)); }

  // Christoffel symbols: result[l](i,j) = Gamma^l_{ij} (symmetric in i,j).
  std::array<Mat, 4> christoffel(const Vec& p) const;

  // Coordinate acceleration correction: (Gamma(a,b))^l = Gamma^l_{ij} a^i b^j.
  Vec gamma(const Vec& p, const Vec& a, const Vec& b) const;

  CurvatureTensor curvature_tensor(const Vec& p) const;

 private:
  friend class ChartBuilder;
  std::string name_;
  MetricFn fn_;
  Domain domain_;
  double h_scale_;
  std::function<double(const Vec&)> closed_k_;  // optional oracle

  void validate_spd(int grid) const;
};

}  // namespace kt
