#include <cmath>
#include <vector>

#include "doctest.h"
#include "kt/chart.hpp"
#include "kt/errors.hpp"
#include "kt/frame.hpp"
#include "kt/numdiff.hpp"

using kt::Frame2D;
using kt::MetricChart;
using kt::Vec;
using kt::Vector2d;

namespace {

Vec pt(double u, double v) {
  Vec p(2);
  p << u, v;
  return p;
}

struct ChartPoint {
  const char* label;
  MetricChart chart;
  Vec p;
};

std::vector<ChartPoint> sample_points() {
  std::vector<ChartPoint> out;
  out.push_back({"sphere", MetricChart::sphere(), pt(0.8, 0.4)});
  out.push_back({"sphere-polar", MetricChart::sphere(), pt(1.9, -2.6)});
  out.push_back({"torus", MetricChart::torus(), pt(1.2, 2.5)});
  out.push_back({"torus-inner", MetricChart::torus(), pt(2.8, -0.7)});
  out.push_back({"half-plane", MetricChart::half_plane(), pt(-0.4, 1.3)});
  out.push_back({"plane", MetricChart::plane(), pt(0.7, -2.1)});
  return out;
}

}  // namespace

TEST_SUITE("frame") {

TEST_CASE("frames are orthonormal, oriented, and dual to their coframes") {
  for (auto& cp : sample_points()) {
    INFO(cp.label);
    const Frame2D f = orthonormal_frame(cp.chart, cp.p);
    const kt::Mat g = cp.chart.metric(cp.p);
    const Vector2d g_e1 = Vector2d(g(0, 0) * f.e1[0] + g(0, 1) * f.e1[1],
                                   g(1, 0) * f.e1[0] + g(1, 1) * f.e1[1]);
    const Vector2d g_e2 = Vector2d(g(0, 0) * f.e2[0] + g(0, 1) * f.e2[1],
                                   g(1, 0) * f.e2[0] + g(1, 1) * f.e2[1]);
    CHECK(f.e1.dot(g_e1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(f.e2.dot(g_e2) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(f.e1.dot(g_e2) == doctest::Approx(0.0).epsilon(1e-12));
    // Orientation agrees with the coordinate orientation.
    CHECK(f.e1[0] * f.e2[1] - f.e1[1] * f.e2[0] > 0.0);
    // Coframe duality.
    CHECK(f.omega1(f.e1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(f.omega1(f.e2) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(f.omega2(f.e1) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(f.omega2(f.e2) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("connection coefficient matches closed forms") {
  // Orthogonal metrics diag(A^2, B^2) have conn = (A_v/B) du - (B_u/A) dv
  // in this orientation; the classic surfaces pin both components.
  const double u = 0.9;
  {
    const auto sphere = MetricChart::sphere();
    const Frame2D f = orthonormal_frame(sphere, pt(u, 0.3));
    CHECK(f.conn_cov[0] == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(f.conn_cov[1] == doctest::Approx(-std::cos(u)).epsilon(1e-9));
  }
  {
    const auto torus = MetricChart::torus(2.0, 1.0);
    const Frame2D f = orthonormal_frame(torus, pt(u, -1.0));
    CHECK(f.conn_cov[0] == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(f.conn_cov[1] == doctest::Approx(std::sin(u)).epsilon(1e-9));
  }
  {
    const auto hp = MetricChart::half_plane();
    const double v = 1.3;
    const Frame2D f = orthonormal_frame(hp, pt(0.2, v));
    CHECK(f.conn_cov[0] == doctest::Approx(-1.0 / v).epsilon(1e-7));
    CHECK(f.conn_cov[1] == doctest::Approx(0.0).epsilon(1e-7));
  }
}

TEST_CASE("structure equations hold with these signs") {
  // d w1 = w2 ^ conn, d w2 = -w1 ^ conn, d conn = K w1 ^ w2, evaluated on
  // (d_u, d_v) with finite differences of the frame field. This pins every
  // sign convention used downstream.
  for (auto& cp : sample_points()) {
    INFO(cp.label);
    const auto& chart = cp.chart;
    const Vec p = cp.p;

    auto comp = [&](const Vec& q, int which, int j) {
      const Frame2D f = orthonormal_frame(chart, q);
      const Vector2d cov = which == 0 ? f.w1 : which == 1 ? f.w2 : f.conn_cov;
      return cov[j];
    };
    // d(omega)(d_u, d_v) = d_u(omega(d_v)) - d_v(omega(d_u)).
    auto ext_d = [&](int which) {
      const double h0 = chart.step(0), h1 = chart.step(1);
      auto along_u = [&](double s) {
        Vec q(p);
        q[0] += s;
        return comp(q, which, 1);
      };
      auto along_v = [&](double s) {
        Vec q(p);
        q[1] += s;
        return comp(q, which, 0);
      };
      return kt::central4(along_u, h0) - kt::central4(along_v, h1);
    };

    const Frame2D f = orthonormal_frame(chart, p);
    const double K = gauss_curvature(chart, p);
    const Vector2d du(1.0, 0.0), dv(0.0, 1.0);
    auto wedge = [&](auto a, auto b) { return a(du) * b(dv) - a(dv) * b(du); };
    auto w1 = [&](const Vector2d& w) { return f.omega1(w); };
    auto w2 = [&](const Vector2d& w) { return f.omega2(w); };
    auto cn = [&](const Vector2d& w) { return f.conn(w); };

    CHECK(ext_d(0) == doctest::Approx(wedge(w2, cn)).epsilon(1e-6));
    CHECK(ext_d(1) == doctest::Approx(-wedge(w1, cn)).epsilon(1e-6));
    CHECK(ext_d(2) == doctest::Approx(K * wedge(w1, w2)).epsilon(1e-6));
  }
}

TEST_CASE("gaussian curvature matches closed forms") {
  const auto sphere = MetricChart::sphere();
  CHECK(gauss_curvature(sphere, pt(0.8, 0.0)) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(gauss_curvature(sphere, pt(2.2, 1.0)) == doctest::Approx(1.0).epsilon(1e-9));

  const auto sphere3 = MetricChart::sphere(3.0);
  CHECK(gauss_curvature(sphere3, pt(1.1, 0.5)) ==
        doctest::Approx(1.0 / 9.0).epsilon(1e-9));

  const auto torus = MetricChart::torus(2.0, 1.0);
  for (double u : {0.3, 1.4, M_PI / 4.0, 2.9}) {
    CAPTURE(u);
    CHECK(gauss_curvature(torus, pt(u, 0.7)) ==
          doctest::Approx(torus.closed_form_curvature(pt(u, 0.7))).epsilon(1e-8));
  }

  const auto hp = MetricChart::half_plane();
  CHECK(gauss_curvature(hp, pt(0.3, 1.0)) == doctest::Approx(-1.0).epsilon(1e-6));
  CHECK(gauss_curvature(hp, pt(-2.0, 2.5)) == doctest::Approx(-1.0).epsilon(1e-6));

  const auto plane = MetricChart::plane();
  CHECK(gauss_curvature(plane, pt(1.0, -3.0)) == doctest::Approx(0.0).epsilon(1e-12));
  const auto flat = MetricChart::flat_torus();
  CHECK(gauss_curvature(flat, pt(2.0, 4.0)) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("curvature tensor contraction agrees with the direct formula") {
  for (auto& cp : sample_points()) {
    INFO(cp.label);
    const auto fb = frame_basis(cp.chart, cp.p);
    const auto R = cp.chart.curvature_tensor(cp.p);
    const kt::Mat M = R.op(fb.e1, fb.e2);
    const double via_tensor = (M * fb.e2).dot(fb.g * fb.e1);
    CHECK(via_tensor ==
          doctest::Approx(gauss_curvature(cp.chart, cp.p)).epsilon(5e-6));
  }
}

TEST_CASE("rotation operator J") {
  const auto torus = MetricChart::torus();
  const Vec p = pt(1.0, 0.5);
  const Frame2D f = orthonormal_frame(torus, p);
  const kt::Matrix2d J = rotation_j(torus, p);
  CHECK((J * f.e1 - f.e2).norm() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK((J * f.e2 + f.e1).norm() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK((J * J + kt::Matrix2d::Identity()).norm() ==
        doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("nd frame generalizes the 2-D one") {
  const auto flat = MetricChart::flat_torus_3d();
  Vec p(3);
  p << 0.1, 0.2, 0.3;
  const kt::Mat F = orthonormal_frame_nd(flat, p);
  CHECK((F - kt::Mat::Identity(3, 3)).norm() == doctest::Approx(0.0).epsilon(1e-12));

  const auto torus = MetricChart::torus();
  const Vec q = pt(1.2, 2.5);
  const kt::Mat F2 = orthonormal_frame_nd(torus, q);
  const Frame2D f = orthonormal_frame(torus, q);
  CHECK((F2.col(0) - Vec(f.e1)).norm() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK((F2.col(1) - Vec(f.e2)).norm() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("curvature jet on the torus matches the analytic ladder") {
  // r = 1, R = 2: every frame derivative of K has a closed form in
  // c = cos u, s = sin u, B = 2 + c. These are derived independently of the
  // ladder implementation and pin value and sign of each jet entry.
  const auto torus = MetricChart::torus(2.0, 1.0);
  const double u = M_PI / 4.0;
  const double c = std::cos(u), s = std::sin(u), B = 2.0 + c;
  const double K = c / B;
  const double K1 = -2.0 * s / (B * B);
  const double K11 = (2.0 * c * c - 4.0 * c - 4.0) / (B * B * B);
  const double K22 = 2.0 * s * s / (B * B * B);
  const double K111 =
      -4.0 * s * (c - 1.0) / (B * B * B) + 3.0 * (2.0 * c * c - 4.0 * c - 4.0) * s / (B * B * B * B);
  const double K221 = 4.0 * s * c / (B * B * B) + 6.0 * s * s * s / (B * B * B * B);
  const double K122 = -(K11 - K22) * s / B;
  // The analytic values themselves satisfy the consistency identity.
  REQUIRE(K122 - K221 - K1 * K == doctest::Approx(0.0).epsilon(1e-15));

  const auto jet = curvature_jet(torus, pt(u, 0.4));
  CHECK(jet.K == doctest::Approx(K).epsilon(1e-9));
  CHECK(jet.K1 == doctest::Approx(K1).epsilon(1e-6));
  CHECK(jet.K2 == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(jet.K11 == doctest::Approx(K11).epsilon(1e-5));
  CHECK(jet.K12 == doctest::Approx(0.0).epsilon(1e-5));
  CHECK(jet.K22 == doctest::Approx(K22).epsilon(1e-5));
  CHECK(jet.K111 == doctest::Approx(K111).epsilon(2e-4));
  CHECK(jet.K112 == doctest::Approx(0.0).epsilon(2e-4));
  CHECK(jet.K121 == doctest::Approx(0.0).epsilon(2e-4));
  CHECK(jet.K122 == doctest::Approx(K122).epsilon(2e-4));
  CHECK(jet.K221 == doctest::Approx(K221).epsilon(2e-4));
  CHECK(jet.K222 == doctest::Approx(0.0).epsilon(2e-4));
  CHECK(jet.k12_mismatch <= 1e-5);
  CHECK(jet.identity_residual() <= 1e-4);
}

TEST_CASE("curvature jet on constant-curvature charts is flat to noise") {
  const auto sphere = MetricChart::sphere();
  const auto jet = curvature_jet(sphere, pt(1.1, 0.2));
  CHECK(jet.K == doctest::Approx(1.0).epsilon(1e-9));
  for (double d : {jet.K1, jet.K2, jet.K11, jet.K12, jet.K22}) {
    CHECK(std::abs(d) <= 1e-5);
  }
  for (double d : {jet.K111, jet.K112, jet.K121, jet.K122, jet.K221, jet.K222}) {
    CHECK(std::abs(d) <= 2e-4);
  }
}

TEST_CASE("killing residuals vanish for true isometry generators") {
  struct Case {
    const char* label;
    MetricChart chart;
    const char* xi1;
    const char* xi2;
    Vec p;
  };
  std::vector<Case> cases;
  cases.push_back({"sphere z-rotation", MetricChart::sphere(), "0", "sin(u)", pt(0.9, 0.4)});
  cases.push_back({"sphere x-rotation", MetricChart::sphere(), "-sin(v)",
                   "-cos(u)*cos(v)", pt(1.2, -0.8)});
  cases.push_back({"sphere y-rotation", MetricChart::sphere(), "cos(v)",
                   "-cos(u)*sin(v)", pt(0.7, 2.0)});
  cases.push_back({"torus rotation", MetricChart::torus(2.0, 1.0), "0", "2 + cos(u)",
                   pt(1.4, 1.0)});
  cases.push_back({"half-plane translation", MetricChart::half_plane(), "1/v", "0",
                   pt(0.4, 1.2)});
  cases.push_back({"half-plane dilation", MetricChart::half_plane(), "u/v", "1",
                   pt(-0.6, 1.5)});
  cases.push_back({"half-plane special conformal", MetricChart::half_plane(),
                   "(u^2 - v^2)/v", "2*u", pt(0.5, 1.1)});
  for (auto& c : cases) {
    INFO(c.label);
    const auto field = kt::VectorFieldJet::from_expressions(c.chart, c.xi1, c.xi2);
    const auto res = killing_residual(c.chart, field, c.p);
    CHECK(res.first_order <= 1e-6);
    CHECK(res.second_order <= 1e-6);
  }
}

TEST_CASE("killing residual flags a non-isometry") {
  const auto plane = MetricChart::plane();
  const auto field = kt::VectorFieldJet::from_expressions(plane, "u", "0");
  const auto res = killing_residual(plane, field, pt(0.3, 0.2));
  CHECK(res.first_order >= 0.5);
}

}  // TEST_SUITE
