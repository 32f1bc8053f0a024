#pragma once

// Shared test helpers. The numeric maximizer and the matrix-form rate and
// power evaluators are written from scratch here so the library's scalar
// pipeline is checked against an independent formulation.

#include <cmath>
#include <functional>
#include <random>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "fdswipt/fdswipt.hpp"

namespace testsupport {

using fdswipt::MatrixC;
using fdswipt::MatrixR;
using fdswipt::VectorR;

// Dense scan followed by golden-ratio refinement around the best sample.
// Exact for unimodal objectives, robust for anything with a dominant peak.
inline double numeric_argmax(const std::function<double(double)>& f, double lo,
                             double hi, int scan_points = 2001) {
  double best_x = lo;
  double best_v = -std::numeric_limits<double>::infinity();
  int best_i = 0;
  for (int i = 0; i < scan_points; ++i) {
    const double x = lo + (hi - lo) * double(i) / double(scan_points - 1);
    const double v = f(x);
    if (v > best_v) {
      best_v = v;
      best_x = x;
      best_i = i;
    }
  }
  double a = lo + (hi - lo) * double(std::max(best_i - 1, 0)) / double(scan_points - 1);
  double b = lo +
             (hi - lo) * double(std::min(best_i + 1, scan_points - 1)) /
                 double(scan_points - 1);
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 200 && (b - a) > 1e-13 * (1.0 + std::abs(best_x)); ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = f(x1);
    }
  }
  return 0.5 * (a + b);
}

// log2 det(I + C C^*) through the singular values of the half factor C. Going
// through C instead of the assembled Gram matrix keeps rank-deficient modes at
// exactly zero and preserves the small singular values.
inline double log2_det_i_plus_gram(const MatrixC& c) {
  Eigen::JacobiSVD<MatrixC> svd(c);
  double r = 0.0;
  for (int i = 0; i < svd.singularValues().size(); ++i) {
    const double s = svd.singularValues()(i);
    r += std::log1p(s * s);
  }
  return r / std::log(2.0);
}

inline MatrixC psd_sqrt(const MatrixC& a) {
  Eigen::SelfAdjointEigenSolver<MatrixC> es(0.5 * (a + a.adjoint()));
  VectorR d(es.eigenvalues().size());
  for (int i = 0; i < d.size(); ++i) d(i) = std::sqrt(std::max(es.eigenvalues()(i), 0.0));
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().adjoint();
}

// First-hop rate straight from the matrix model: receive combiner u_h^*,
// per-antenna splitting diag(1 - rho), source covariance w_s.
inline double rate1_matrix(const MatrixC& h, const MatrixC& u_h, const MatrixC& w_s,
                           const VectorR& rho, double sigma1) {
  const int nr = int(u_h.rows());
  MatrixC d_sqrt = MatrixC::Zero(nr, nr);
  for (int k = 0; k < nr; ++k) d_sqrt(k, k) = std::sqrt(1.0 - rho(k));
  const MatrixC c = d_sqrt * u_h.adjoint() * h * psd_sqrt(w_s) / std::sqrt(sigma1);
  return log2_det_i_plus_gram(c);
}

inline double rate2_matrix(const MatrixC& g, const MatrixC& w_r, double sigma_d2) {
  return log2_det_i_plus_gram(g * psd_sqrt(w_r) / std::sqrt(sigma_d2));
}

// Relay power budget from traces over the received covariances.
inline double relay_power_matrix(const MatrixC& h, const MatrixC& f, const MatrixC& u_h,
                                 const MatrixC& w_s, const MatrixC& w_r,
                                 const VectorR& rho, double eta, double p_ic) {
  const int nr = int(u_h.rows());
  MatrixC lam_rho = MatrixC::Zero(nr, nr);
  for (int k = 0; k < nr; ++k) lam_rho(k, k) = rho(k);
  const MatrixC q = u_h.adjoint();
  const MatrixC from_source = q * h * w_s * h.adjoint() * q.adjoint();
  const MatrixC from_loop = q * f * w_r * f.adjoint() * q.adjoint();
  const double harvested =
      eta * ((lam_rho * from_source).trace().real() + (lam_rho * from_loop).trace().real());
  return harvested - p_ic;
}

// Small synthetic scalar problems at friendly scales for update probes.
inline fdswipt::ProblemData synthetic_problem(std::mt19937_64& rng, int k1, int k2,
                                              int nr) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  fdswipt::ProblemData pd;
  pd.ns = k1;
  pd.nr = nr;
  pd.k1 = k1;
  pd.k2 = k2;
  pd.lambda_h = VectorR::Zero(nr);
  for (int i = 0; i < k1; ++i) pd.lambda_h(i) = 0.3 + 2.0 * uni(rng);
  pd.lambda_g.resize(k2);
  for (int j = 0; j < k2; ++j) pd.lambda_g(j) = 0.3 + 2.0 * uni(rng);
  pd.eta = 0.6 + 0.4 * uni(rng);
  pd.hl = pd.eta * pd.lambda_h;
  pd.hf2.resize(nr, nr);
  for (int r = 0; r < nr; ++r)
    for (int c = 0; c < nr; ++c) pd.hf2(r, c) = 0.3 * uni(rng) / double(nr);
  pd.f2_raw = pd.hf2 / pd.eta;
  pd.ps = 1.0 + 4.0 * uni(rng);
  pd.sigma1 = 0.05 + 0.5 * uni(rng);
  pd.sigma_d2 = 0.05 + 0.5 * uni(rng);
  pd.p_ic = 0.02 * uni(rng);
  pd.eh_sensitivity = 0.0;
  pd.eps = 1e-3;
  return pd;
}

// A dual point safely inside the admissible region of a synthetic problem.
inline fdswipt::DualPoint admissible_dual(std::mt19937_64& rng,
                                          const fdswipt::ProblemData& pd) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  fdswipt::DualPoint d;
  d.alpha = 0.05 + 0.9 * uni(rng);
  d.mu = 0.2 + 2.0 * uni(rng);
  double hl_max = 0.0;
  for (int i = 0; i < pd.k1; ++i) hl_max = std::max(hl_max, pd.hl(i));
  d.nu = d.mu * (1.0 - pd.eps) * hl_max * (1.05 + uni(rng)) + 0.1 + uni(rng);
  return d;
}

inline VectorR random_rho(std::mt19937_64& rng, int nr, double eps) {
  std::uniform_real_distribution<double> uni(eps, 1.0 - eps);
  VectorR rho(nr);
  for (int k = 0; k < nr; ++k) rho(k) = uni(rng);
  return rho;
}

}  // namespace testsupport
