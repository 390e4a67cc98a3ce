#include <cmath>

#include "doctest.h"
#include "kt/chart.hpp"
#include "kt/curve.hpp"
#include "kt/errors.hpp"
#include "kt/frame.hpp"
#include "kt/transport.hpp"
#include "kt/transport_nd.hpp"

using kt::Jet2;
using kt::JetND;
using kt::Mat;
using kt::MetricChart;
using kt::SampledCurve;
using kt::TransportMode;
using kt::Vec;

namespace {

Vec pt(double u, double v) {
  Vec p(2);
  p << u, v;
  return p;
}

Mat skew2(double xi12) {
  Mat A(2, 2);
  A << 0.0, xi12, -xi12, 0.0;  // A = -xi12 J in frame components
  return A;
}

}  // namespace

TEST_SUITE("transport_nd") {

TEST_CASE("n=2 coordinate form matches the 3x3 frame form") {
  const auto torus = MetricChart::torus(2.0, 1.0);
  const double u0 = M_PI / 4.0;
  const auto lat = reparam_arclength(torus, [u0](double t) { return pt(u0, t); },
                                     0.0, 2.0 * M_PI);
  const Jet2 j2(0.9, -0.2, 0.6);
  const auto tr2 = killing_transport(torus, lat, j2);

  JetND j0;
  const auto fr0 = orthonormal_frame(torus, lat.p[0]);
  j0.X = Vec(j2[0] * fr0.e1 + j2[1] * fr0.e2);
  j0.A = skew2(j2[2]);
  const auto trn = killing_transport_nd(torus, lat, j0);

  REQUIRE(trn.t.size() == tr2.t.size());
  for (std::size_t k = 0; k < trn.t.size(); ++k) {
    const auto fr = orthonormal_frame(torus, trn.p[k]);
    const Vec x2 = Vec(tr2.jet[k][0] * fr.e1 + tr2.jet[k][1] * fr.e2);
    CHECK((trn.jet[k].X - x2).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK(trn.jet[k].A(0, 1) == doctest::Approx(tr2.jet[k][2]).epsilon(1e-8));
  }
  CHECK(trn.skew_drift <= 1e-8);
}

TEST_CASE("skew mode rejects a non-skew start operator") {
  const auto torus = MetricChart::torus(2.0, 1.0);
  const auto arc = reparam_arclength(torus, [](double t) { return pt(0.8, t); }, 0.0, 1.0);
  JetND bad;
  bad.X = Vec::Zero(2);
  bad.A = Mat::Identity(2, 2);
  CHECK_THROWS_AS(killing_transport_nd(torus, arc, bad), kt::SchemaError);
}

TEST_CASE("affine mode: parallel-transported symmetric part is constant") {
  const auto torus = MetricChart::torus(2.0, 1.0);
  const auto arc = reparam_arclength(
      torus, [](double t) { return pt(0.8 + 0.3 * std::sin(t), t); }, 0.0, 2.0);
  JetND j0;
  j0.X = Vec::Zero(2);
  j0.X << 0.4, -0.1;
  Mat A(2, 2);
  A << 0.3, 0.35, -0.15, -0.2;
  j0.A = A;
  const auto trn = killing_transport_nd(torus, arc, j0, TransportMode::affine);
  const auto frames = kt::parallel_frames(torus, arc);

  Mat s0;
  for (std::size_t k = 0; k < trn.t.size(); ++k) {
    const Mat F = orthonormal_frame_nd(torus, trn.p[k]);
    const Mat acoord = F * trn.jet[k].A * F.inverse();
    const Mat g = torus.metric(trn.p[k]);
    const Mat s = frames[k].transpose() * g * acoord * frames[k];
    const Mat sym = 0.5 * (s + s.transpose());
    if (k == 0) {
      s0 = sym;
      continue;
    }
    CHECK((sym - s0).cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("parallel frames stay orthonormal and rotate by the classical angle") {
  const auto sphere = MetricChart::sphere();
  const double u0 = M_PI / 3.0;
  const auto lat = reparam_arclength(sphere, [u0](double t) { return pt(u0, t); },
                                     0.0, 2.0 * M_PI);
  const auto frames = kt::parallel_frames(sphere, lat);
  for (std::size_t k = 0; k < frames.size(); k += 50) {
    const Mat g = sphere.metric(lat.p[2 * k]);
    CHECK((frames[k].transpose() * g * frames[k] - Mat::Identity(2, 2))
              .cwiseAbs()
              .maxCoeff() <= 1e-9);
  }
  // Around a latitude at polar angle u0 the tangent plane turns by the solid
  // angle 2 pi (1 - cos u0); at u0 = pi/3 that is pi, so the frame returns
  // reversed.
  const Mat g = sphere.metric(lat.p[0]);
  const double c = (frames.back().col(0)).dot(g * frames.front().col(0));
  CHECK(c == doctest::Approx(-1.0).epsilon(1e-8));
}

TEST_CASE("flat 3-torus: contractible loops return every jet") {
  const auto ft = MetricChart::flat_torus_3d();
  Vec center(3);
  center << 3.0, 3.0, 1.5;
  const auto circle = reparam_arclength(
      ft,
      [center](double t) {
        Vec q = center;
        q[0] += 1.2 * std::cos(t);
        q[1] += 1.2 * std::sin(t);
        return q;
      },
      0.0, 2.0 * M_PI);
  REQUIRE(circle.closed);

  JetND j0;
  j0.X = Vec::Zero(3);
  j0.X << 0.5, -0.3, 0.8;
  Mat A = Mat::Zero(3, 3);
  A(0, 1) = 0.7;
  A(1, 0) = -0.7;
  A(0, 2) = -0.2;
  A(2, 0) = 0.2;
  A(1, 2) = 0.4;
  A(2, 1) = -0.4;
  j0.A = A;
  const auto trn = killing_transport_nd(ft, circle, j0);
  CHECK((trn.jet.back().X - j0.X).cwiseAbs().maxCoeff() <= 1e-9);
  CHECK((trn.jet.back().A - j0.A).cwiseAbs().maxCoeff() <= 1e-9);
  CHECK(trn.skew_drift <= 1e-9);
}

TEST_CASE("flat 3-torus: an essential loop shears the field part by A * dp") {
  // Flatness makes the jet connection's holonomy factor through the
  // fundamental group: going once around, the global affine field
  // X0 + A (x - p0) returns with its value displaced by A times the
  // coordinate travel. Translation jets (A = 0) are the ones that close up.
  const auto ft = MetricChart::flat_torus_3d();
  Vec a(3), dir(3);
  a << 0.3, 1.1, 2.0;
  dir << 1.0, 2.0, 1.0;
  const auto loop = reparam_arclength(
      ft, [a, dir](double t) { return Vec(a + t * dir); }, 0.0, 2.0 * M_PI);
  REQUIRE(loop.closed);

  JetND j0;
  j0.X = Vec::Zero(3);
  j0.X << 0.5, -0.3, 0.8;
  Mat A = Mat::Zero(3, 3);
  A(0, 1) = 0.7;
  A(1, 0) = -0.7;
  A(1, 2) = 0.4;
  A(2, 1) = -0.4;
  j0.A = A;
  const auto trn = killing_transport_nd(ft, loop, j0);

  const Vec dp = Vec(loop.p.back() - loop.p.front());
  const Vec expect = Vec(j0.X + A * dp);
  CHECK((trn.jet.back().X - expect).cwiseAbs().maxCoeff() <= 1e-9);
  CHECK((trn.jet.back().A - j0.A).cwiseAbs().maxCoeff() <= 1e-9);

  JetND translation;
  translation.X = j0.X;
  translation.A = Mat::Zero(3, 3);
  const auto trt = killing_transport_nd(ft, loop, translation);
  CHECK((trt.jet.back().X - j0.X).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("jet curvature operator: 2-D reduction, antisymmetry, flat case") {
  const auto torus = MetricChart::torus(2.0, 1.0);
  const Vec p = pt(M_PI / 4.0, 0.3);
  const auto jet = curvature_jet(torus, p);
  const auto fr = orthonormal_frame(torus, p);

  const double xi1 = 0.7, xi2 = -0.4, xi12 = 0.9;
  JetND j;
  j.X = Vec(xi1 * fr.e1 + xi2 * fr.e2);
  j.A = skew2(xi12);

  const JetND out = kt::tilde_curvature_nd(torus, p, Vec(fr.e1), Vec(fr.e2), j);
  CHECK(out.X.cwiseAbs().maxCoeff() == 0.0);

  // Operator slot reduces to -dK(X) J on surfaces.
  const double dkx = jet.K1 * xi1 + jet.K2 * xi2;
  Mat expect(2, 2);
  expect << 0.0, dkx, -dkx, 0.0;
  CHECK((out.A - expect).cwiseAbs().maxCoeff() <= 1e-4 * (1.0 + std::abs(dkx)));

  // Swapping the two tangent arguments negates the operator exactly.
  const JetND swapped = kt::tilde_curvature_nd(torus, p, Vec(fr.e2), Vec(fr.e1), j);
  CHECK((out.A + swapped.A).cwiseAbs().maxCoeff() == 0.0);

  // Scaling Y scales the answer linearly.
  const JetND scaled = kt::tilde_curvature_nd(torus, p, Vec(2.0 * fr.e1), Vec(fr.e2), j);
  CHECK((scaled.A - 2.0 * out.A).cwiseAbs().maxCoeff() <= 1e-12);

  const auto plane = MetricChart::plane();
  JetND jp;
  jp.X = Vec::Zero(2);
  jp.X << 0.3, 0.9;
  jp.A = skew2(1.3);
  const JetND flat = kt::tilde_curvature_nd(plane, pt(0.1, -0.4), pt(1.0, 0.0),
                                            pt(0.0, 1.0), jp);
  CHECK(flat.A.cwiseAbs().maxCoeff() <= 1e-12);
}

}  // TEST_SUITE
