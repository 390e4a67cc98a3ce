#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "kt/errors.hpp"

namespace kt {

// Charts have dimension 2..4; bounded dynamic sizes keep everything on the
// stack while sharing one code path across dimensions.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 4, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 4, 4>;
using Eigen::Matrix2d;
using Eigen::Matrix3d;
using Eigen::Vector2d;
using Eigen::Vector3d;

struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  bool periodic = false;
  double period = 0.0;  // ignored unless periodic

  double extent() const { return periodic ? period : hi - lo; }
};

// A coordinate box, possibly periodic per axis. Points on periodic axes are
// stored unwrapped by the rest of the library; wrapping happens only when a
// chart evaluates its metric.
struct Domain {
  std::vector<Axis> axes;

  int dim() const { return static_cast<int>(axes.size()); }

  bool contains(const Vec& p, double slack = 1e-12) const {
    for (int i = 0; i < dim(); ++i) {
      if (axes[i].periodic) continue;
      const double pad = slack * (1.0 + std::abs(axes[i].extent()));
      if (p[i] < axes[i].lo - pad || p[i] > axes[i].hi + pad) return false;
    }
    return true;
  }

  // Wrap periodic coordinates into [lo, lo + period); identity elsewhere.
  Vec wrap(const Vec& p) const {
    Vec q = p;
    for (int i = 0; i < dim(); ++i) {
      if (!axes[i].periodic) continue;
      const double per = axes[i].period;
      q[i] = axes[i].lo + std::fmod(q[i] - axes[i].lo, per);
      if (q[i] < axes[i].lo) q[i] += per;
    }
    return q;
  }

  // Shift each periodic coordinate of p by whole periods so it lands as close
  // as possible to ref. Used to keep sampled point sequences unwrapped.
  Vec unwrap_near(const Vec& p, const Vec& ref) const {
    Vec q = p;
    for (int i = 0; i < dim(); ++i) {
      if (!axes[i].periodic) continue;
      const double per = axes[i].period;
      q[i] -= per * std::round((q[i] - ref[i]) / per);
    }
    return q;
  }
};

}  // namespace kt
