#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "kt/chart.hpp"
#include "kt/frame.hpp"
#include "kt/transport.hpp"

namespace kt {

/**
 * Obstruction against a candidate Killing jet (xi1, xi2, xi12): the derivative
 * of curvature along the field.  A field with T = 0 everywhere preserves
 * curvature; the higher torsions below are the coefficients obtained by
 * differentiating T in the frame directions.
 */
double torsion_t(const CurvatureJet& K, const Jet2& jet);

/** First frame derivatives (T_1, T_2) of the torsion for the same jet. */
Eigen::Vector2d torsion_t12(const CurvatureJet& K, const Jet2& jet);

/**
 * Re-express a curvature jet in a frame rotated by `alpha` (e1' = cos a e1 +
 * sin a e2).  Exact component transformation; the consistency residuals are
 * recomputed and the K12 mismatch, being the rotation-invariant antisymmetric
 * part, carries over unchanged.
 */
CurvatureJet rotate_jet(const CurvatureJet& K, double alpha);

/**
 * The 6x3 coefficient matrix whose rows express T, T_1, T_2, T_11, T_12, T_22
 * in the jet basis (xi1, xi2, xi12).  Killing jets at the point are exactly
 * its kernel; the dimension of the local isometry algebra is 3 - rank.
 */
struct KMatrix {
  Eigen::Matrix<double, 6, 3> rows;
  Vec p;
  /** Singular values in descending order. */
  std::array<double, 3> sigma{};

  /** Number of singular values strictly above `threshold`. */
  int rank_at(double threshold) const;
};

/** Assemble the matrix from an already-computed curvature jet. */
KMatrix k_matrix(const CurvatureJet& K, const Vec& p);

/**
 * Compute the curvature jet at `p` and assemble the matrix.  `frame_angle`
 * rotates the orthonormal frame before assembly (used to check that the
 * classification does not depend on the frame choice).
 */
KMatrix k_matrix(const MetricChart& chart, const Vec& p,
                 const JetOptions& opts = {}, double frame_angle = 0.0);

/** Dimension of the local isometry family detected at a point. */
enum class IsometryClass { ThreeParam, OneParam, Trivial, Indeterminate };

const char* to_string(IsometryClass c);

struct Classification {
  IsometryClass cls = IsometryClass::Indeterminate;
  /** Numerical rank of the 6x3 matrix; -1 when the point was not assessed. */
  int rank = -1;
  /** Separation ratio guarding the rank decision (see classify_point). */
  double gap = 0.0;
  std::array<double, 3> sigma{};
  /** |(K_1, K_2)|, the frame gradient of curvature. */
  double grad_norm = 0.0;
  /** Worst self-consistency residual of the derivative ladder. */
  double identity_residual = 0.0;
  bool identities_ok = false;
  /** Human-readable reason whenever cls is Indeterminate. */
  std::string note;
};

struct ClassifyOptions {
  /** Relative singular-value threshold for the rank decision. */
  double rank_tol = 1e-6;
  /**
   * Absolute singular-value floor, scaled by (1 + |K|).  Finite differencing
   * leaves noise of order 1e-5 * (1 + |K|) in the matrix entries even on a
   * surface of constant curvature, so values below the floor are treated as
   * zero.
   */
  double sigma_floor = 3e-4;
  /** Threshold on |(K_1, K_2)|, scaled by (1 + |K|) / min axis extent. */
  double grad_tol = 1e-6;
  /** Minimum separation ratio; anything closer is reported Indeterminate. */
  double gap_min = 10.0;
  /**
   * Ladder self-consistency gate.  Points whose jet fails the gate are never
   * classified; they come back Indeterminate with a diagnostic note.
   */
  double identity_gate = 2e-2;
  /** Differentiation options for the jet (identity enforcement is bypassed;
   *  the gate above decides instead). */
  JetOptions jet{};
};

/**
 * Decide which isometry family the surface admits near `p`: rank 0 of the
 * obstruction matrix means a three-parameter family (constant curvature),
 * rank 2 with non-stationary curvature a one-parameter family, rank 3 no
 * continuous symmetry at all.  Rank 1, stationary-curvature rank 2, gate
 * failures and borderline separations are reported Indeterminate rather than
 * silently forced into a class.
 */
Classification classify_point(const MetricChart& chart, const Vec& p,
                              const ClassifyOptions& opts = {});

/** Rectangular scan lattice.  Periodic axes use an end-exclusive lattice so a
 *  full period is covered without duplicating the seam; non-periodic axes use
 *  an inclusive linspace. */
struct GridSpec {
  int nu = 20;
  int nv = 20;
  double u0 = 0.0, u1 = 0.0;
  double v0 = 0.0, v1 = 0.0;
};

/**
 * Grid over the differentiation-safe interior of the chart: periodic axes get
 * their full period, non-periodic axes are inset by the smallest margin (in
 * doubling steps of 3.2% of the extent) at which the jet stencils stay inside
 * the domain at all corners.
 */
GridSpec safe_grid(const MetricChart& chart, int nu, int nv,
                   const JetOptions& opts = {});

struct ScanEntry {
  Vec p;
  Classification c;
};

struct ScanResult {
  std::vector<ScanEntry> entries;
  /** Counts indexed by IsometryClass order. */
  std::array<int, 4> histogram{};
  /** Points whose matrix came back with numerical rank exactly 1. */
  std::vector<Vec> rank_one_points;
  /** Points skipped by the identity gate or a geometry failure. */
  int skipped = 0;
  double max_identity_residual = 0.0;
};

/** Classify every lattice point of `spec`; geometry failures at single points
 *  are recorded as skips instead of aborting the scan. */
ScanResult scan_region(const MetricChart& chart, const GridSpec& spec,
                       const ClassifyOptions& opts = {});

}  // namespace kt
