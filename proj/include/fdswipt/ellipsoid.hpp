#pragma once

// Central-cut ellipsoid method over a low-dimensional dual space. The
// ellipsoid is { x : (x - center)^T shape^{-1} (x - center) <= 1 }; a cut
// with direction w keeps the half { x : w^T (x - center) <= 0 }.

#include <cmath>

#include <Eigen/Dense>

namespace fdswipt {

struct Ellipsoid {
  Eigen::VectorXd center;
  Eigen::MatrixXd shape;  // positive definite

  int dim() const { return int(center.size()); }

  // Half-width of the ellipsoid along direction w; also the gap bound the
  // stopping rule checks on objective cuts.
  double width(const Eigen::VectorXd& w) const {
    const double s = w.dot(shape * w);
    return s > 0.0 ? std::sqrt(s) : 0.0;
  }
};

// Applies one central cut. Returns false when the shape matrix has collapsed
// so far that the cut direction carries no extent even after jitter.
inline bool ellipsoid_step(Ellipsoid& e, const Eigen::VectorXd& w) {
  const int n = e.dim();
  double s = w.dot(e.shape * w);
  if (s <= 0.0) {
    e.shape += 1e-12 * Eigen::MatrixXd::Identity(n, n);
    s = w.dot(e.shape * w);
    if (s <= 0.0) return false;
  }
  const Eigen::VectorXd pg = (e.shape * w) / std::sqrt(s);
  const double nn = double(n);
  e.center -= pg / (nn + 1.0);
  e.shape = (nn * nn / (nn * nn - 1.0)) *
            (e.shape - (2.0 / (nn + 1.0)) * (pg * pg.transpose()));
  e.shape = 0.5 * (e.shape + e.shape.transpose());
  return true;
}

// Exact per-cut volume shrink factor of the update above.
inline double central_cut_volume_ratio(int n) {
  const double nn = double(n);
  return (nn / (nn + 1.0)) * std::pow(nn * nn / (nn * nn - 1.0), (nn - 1.0) / 2.0);
}

}  // namespace fdswipt
