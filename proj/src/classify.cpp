#include "kt/classify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/SVD>

#include "kt/errors.hpp"

namespace kt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double rel_residual(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

double min_extent(const MetricChart& chart) {
  double ell = kInf;
  for (const auto& ax : chart.domain().axes) ell = std::min(ell, ax.extent());
  return ell;
}

// Worst ladder inconsistency: the two third-level identities plus the mixed
// second-derivative mismatch, the latter normalised against the second level.
double gate_residual(const CurvatureJet& j) {
  const double level2 =
      std::max({1.0, std::abs(j.K11), std::abs(j.K12), std::abs(j.K22)});
  return std::max(j.identity_residual(), j.k12_mismatch / level2);
}

}  // namespace

double torsion_t(const CurvatureJet& K, const Jet2& jet) {
  return K.K1 * jet[0] + K.K2 * jet[1];
}

Eigen::Vector2d torsion_t12(const CurvatureJet& K, const Jet2& jet) {
  return {K.K11 * jet[0] + K.K12 * jet[1] - K.K2 * jet[2],
          K.K12 * jet[0] + K.K22 * jet[1] + K.K1 * jet[2]};
}

CurvatureJet rotate_jet(const CurvatureJet& K, double alpha) {
  const double c = std::cos(alpha), s = std::sin(alpha);
  CurvatureJet r = K;
  r.K1 = c * K.K1 + s * K.K2;
  r.K2 = -s * K.K1 + c * K.K2;
  r.K11 = c * c * K.K11 + 2 * s * c * K.K12 + s * s * K.K22;
  r.K12 = -s * c * K.K11 + (c * c - s * s) * K.K12 + s * c * K.K22;
  r.K22 = s * s * K.K11 - 2 * s * c * K.K12 + c * c * K.K22;
  // Third level: rotate the value pairs of dK_11, dK_12, dK_22 first, then
  // re-express the coframe.
  const double a1 = c * c * K.K111 + 2 * s * c * K.K121 + s * s * K.K221;
  const double b1 = c * c * K.K112 + 2 * s * c * K.K122 + s * s * K.K222;
  const double a2 =
      -s * c * K.K111 + (c * c - s * s) * K.K121 + s * c * K.K221;
  const double b2 =
      -s * c * K.K112 + (c * c - s * s) * K.K122 + s * c * K.K222;
  const double a3 = s * s * K.K111 - 2 * s * c * K.K121 + c * c * K.K221;
  const double b3 = s * s * K.K112 - 2 * s * c * K.K122 + c * c * K.K222;
  r.K111 = c * a1 + s * b1;
  r.K112 = -s * a1 + c * b1;
  r.K121 = c * a2 + s * b2;
  r.K122 = -s * a2 + c * b2;
  r.K221 = c * a3 + s * b3;
  r.K222 = -s * a3 + c * b3;
  r.identity_residual_1 = rel_residual(r.K112, r.K121 - r.K2 * r.K);
  r.identity_residual_2 = rel_residual(r.K122, r.K221 + r.K1 * r.K);
  return r;
}

int KMatrix::rank_at(double threshold) const {
  int rank = 0;
  for (double s : sigma) rank += (s > threshold) ? 1 : 0;
  return rank;
}

KMatrix k_matrix(const CurvatureJet& K, const Vec& p) {
  KMatrix m;
  m.p = p;
  m.rows << K.K1, K.K2, 0.0,                          //
      K.K11, K.K12, -K.K2,                            //
      K.K12, K.K22, K.K1,                             //
      K.K111, K.K112, -2.0 * K.K12,                   //
      K.K121, K.K122, K.K11 - K.K22,                  //
      K.K221, K.K222, 2.0 * K.K12;
  Eigen::JacobiSVD<Eigen::Matrix<double, 6, 3>> svd(m.rows);
  for (int i = 0; i < 3; ++i) m.sigma[i] = svd.singularValues()[i];
  return m;
}

KMatrix k_matrix(const MetricChart& chart, const Vec& p, const JetOptions& opts,
                 double frame_angle) {
  CurvatureJet jet = curvature_jet(chart, p, opts);
  if (frame_angle != 0.0) jet = rotate_jet(jet, frame_angle);
  return k_matrix(jet, p);
}

const char* to_string(IsometryClass c) {
  switch (c) {
    case IsometryClass::ThreeParam:
      return "ThreeParam";
    case IsometryClass::OneParam:
      return "OneParam";
    case IsometryClass::Trivial:
      return "Trivial";
    default:
      return "Indeterminate";
  }
}

Classification classify_point(const MetricChart& chart, const Vec& p,
                              const ClassifyOptions& opts) {
  JetOptions jo = opts.jet;
  jo.enforce_identities = false;
  const CurvatureJet jet = curvature_jet(chart, p, jo);

  Classification out;
  out.grad_norm = std::hypot(jet.K1, jet.K2);
  out.identity_residual = gate_residual(jet);
  out.identities_ok = out.identity_residual <= opts.identity_gate;
  if (!out.identities_ok) {
    out.note = "derivative ladder inconsistent (residual " +
               std::to_string(out.identity_residual) + " above gate " +
               std::to_string(opts.identity_gate) + ")";
    return out;
  }

  const KMatrix m = k_matrix(jet, p);
  out.sigma = m.sigma;
  const double theta = std::max(opts.rank_tol * m.sigma[0],
                                opts.sigma_floor * (1.0 + std::abs(jet.K)));
  out.rank = m.rank_at(theta);

  if (out.rank == 0) {
    out.gap = (m.sigma[0] > 0.0) ? theta / m.sigma[0] : kInf;
  } else if (out.rank == 3) {
    out.gap = m.sigma[2] / theta;
  } else {
    const double below = m.sigma[static_cast<size_t>(out.rank)];
    out.gap = (below > 0.0) ? m.sigma[static_cast<size_t>(out.rank - 1)] / below
                            : kInf;
  }

  if (out.gap < opts.gap_min) {
    out.note = "singular values too close to the rank threshold (separation " +
               std::to_string(out.gap) + ")";
    return out;
  }

  switch (out.rank) {
    case 0:
      out.cls = IsometryClass::ThreeParam;
      break;
    case 3:
      out.cls = IsometryClass::Trivial;
      break;
    case 2: {
      const double gthr =
          opts.grad_tol * (1.0 + std::abs(jet.K)) / min_extent(chart);
      if (out.grad_norm > gthr) {
        out.cls = IsometryClass::OneParam;
      } else {
        out.note = "rank two with stationary curvature";
      }
      break;
    }
    default:
      out.note = "apparent rank one";
      break;
  }
  return out;
}

GridSpec safe_grid(const MetricChart& chart, int nu, int nv,
                   const JetOptions& opts) {
  if (nu < 2 || nv < 2) throw SchemaError("scan grid needs at least 2x2 points");
  const auto& axes = chart.domain().axes;
  if (axes.size() != 2) throw SchemaError("scan grids are two-dimensional");

  GridSpec spec;
  spec.nu = nu;
  spec.nv = nv;
  std::array<double, 2> lo{axes[0].lo, axes[1].lo};
  std::array<double, 2> hi{axes[0].lo + axes[0].extent(),
                           axes[1].lo + axes[1].extent()};
  const bool open0 = !axes[0].periodic;
  const bool open1 = !axes[1].periodic;
  if (!open0 && !open1) {
    spec.u0 = lo[0], spec.u1 = hi[0], spec.v0 = lo[1], spec.v1 = hi[1];
    return spec;
  }

  JetOptions jo = opts;
  jo.enforce_identities = false;
  for (double f = 0.032; f <= 0.35; f *= 2.0) {
    const double mu = open0 ? f * axes[0].extent() : 0.0;
    const double mv = open1 ? f * axes[1].extent() : 0.0;
    bool ok = true;
    for (double cu : {lo[0] + mu, hi[0] - mu}) {
      for (double cv : {lo[1] + mv, hi[1] - mv}) {
        Vec corner(2);
        corner << cu, cv;
        try {
          curvature_jet(chart, corner, jo);
        } catch (const DomainExceeded&) {
          ok = false;
        }
        if (!ok) break;
      }
      if (!ok) break;
    }
    if (ok) {
      spec.u0 = lo[0] + mu, spec.u1 = hi[0] - mu;
      spec.v0 = lo[1] + mv, spec.v1 = hi[1] - mv;
      return spec;
    }
  }
  throw DomainExceeded("chart '" + chart.name() +
                       "' has no differentiation-safe interior to scan");
}

ScanResult scan_region(const MetricChart& chart, const GridSpec& spec,
                       const ClassifyOptions& opts) {
  if (spec.nu < 2 || spec.nv < 2)
    throw SchemaError("scan grid needs at least 2x2 points");
  const auto& axes = chart.domain().axes;
  if (axes.size() != 2) throw SchemaError("scan grids are two-dimensional");

  const auto coords = [](double a, double b, int n, bool periodic, int i) {
    return periodic ? a + (b - a) * i / n : a + (b - a) * i / (n - 1);
  };

  ScanResult res;
  res.entries.reserve(static_cast<size_t>(spec.nu) * spec.nv);
  for (int i = 0; i < spec.nu; ++i) {
    for (int k = 0; k < spec.nv; ++k) {
      Vec p(2);
      p << coords(spec.u0, spec.u1, spec.nu, axes[0].periodic, i),
          coords(spec.v0, spec.v1, spec.nv, axes[1].periodic, k);
      ScanEntry entry;
      entry.p = p;
      try {
        entry.c = classify_point(chart, p, opts);
        if (!entry.c.identities_ok) ++res.skipped;
      } catch (const GeometryError& err) {
        entry.c.note = err.what();
        ++res.skipped;
      }
      res.max_identity_residual =
          std::max(res.max_identity_residual, entry.c.identity_residual);
      if (entry.c.rank == 1) res.rank_one_points.push_back(p);
      ++res.histogram[static_cast<size_t>(entry.c.cls)];
      res.entries.push_back(std::move(entry));
    }
  }
  return res;
}

}  // namespace kt
