#pragma once

// Channel sampling and the eigen-domain reduction that turns the matrix
// problem into per-mode scalars.

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "fdswipt/config.hpp"

namespace fdswipt {

using MatrixC = Eigen::MatrixXcd;
using MatrixR = Eigen::MatrixXd;
using VectorR = Eigen::VectorXd;

struct ChannelRealization {
  MatrixC h;  // source -> relay, nr x ns
  MatrixC g;  // relay -> destination, nd x nr
  MatrixC f;  // relay transmit -> relay receive loopback, nr x nr
  std::uint64_t seed = 0;
};

namespace detail {

// Fills a matrix row by row with unit-variance circularly symmetric
// Gaussian entries scaled by `amp`.
inline void fill_rayleigh(MatrixC& m, double amp, std::mt19937_64& rng) {
  std::normal_distribution<double> comp(0.0, 1.0 / std::sqrt(2.0));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const double re = comp(rng);
      const double im = comp(rng);
      m(i, j) = amp * std::complex<double>(re, im);
    }
  }
}

}  // namespace detail

// Draws one channel realization. The loopback channel is Rician: a fixed
// full-rank phase-ramp component plus a scattered component, both scaled to
// the configured isolation level.
inline ChannelRealization generate_channels(const SystemConfig& cfg, std::uint64_t seed) {
  std::mt19937_64 rng(seed);

  ChannelRealization ch;
  ch.seed = seed;
  ch.h.resize(cfg.nr, cfg.ns);
  ch.g.resize(cfg.nd, cfg.nr);
  ch.f.resize(cfg.nr, cfg.nr);

  const double amp_h = std::pow(cfg.d_sr, -cfg.gamma);
  const double amp_g = std::pow(cfg.d_rd(), -cfg.gamma);
  detail::fill_rayleigh(ch.h, amp_h, rng);
  detail::fill_rayleigh(ch.g, amp_g, rng);

  MatrixC f_w(cfg.nr, cfg.nr);
  detail::fill_rayleigh(f_w, 1.0, rng);

  const double k = db_to_linear(cfg.rician_k_db);
  const double omega = db_to_linear(cfg.omega_db);
  const double w_los = std::sqrt(omega * k / (k + 1.0));
  const double w_nlos = std::sqrt(omega / (k + 1.0));

  for (int r = 0; r < cfg.nr; ++r) {
    for (int c = 0; c < cfg.nr; ++c) {
      const double phase = M_PI * double(r) * double(c) / double(cfg.nr);
      const std::complex<double> los(std::cos(phase), std::sin(phase));
      ch.f(r, c) = w_los * los + w_nlos * f_w(r, c);
    }
  }
  return ch;
}

// Eigen-domain view of one realization. lambda_h is padded to length nr so
// the splitting-ratio update can run over every relay antenna; entries past
// k1 are zero. f_tilde_sq keeps all nr columns because the isotropic-relay
// scheme needs full row sums, while the full-CSI path only reads the first
// k2 columns.
struct EffectiveChannel {
  VectorR lambda_h;    // nr, squared singular values of h
  VectorR lambda_g;    // k2, squared singular values of g
  MatrixR f_tilde_sq;  // nr x nr, |u_h^* f v_g|^2 entrywise
  int k1 = 0;
  int k2 = 0;
  bool degenerate = false;  // no usable mode on one of the hops

  MatrixC u_h, v_h;  // full unitaries of h
  MatrixC u_g, v_g;  // full unitaries of g
  VectorR sv_h, sv_g;
};

inline EffectiveChannel decompose(const ChannelRealization& ch) {
  const int nr = int(ch.h.rows());

  Eigen::JacobiSVD<MatrixC> svd_h(ch.h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::JacobiSVD<MatrixC> svd_g(ch.g, Eigen::ComputeFullU | Eigen::ComputeFullV);

  EffectiveChannel eff;
  eff.u_h = svd_h.matrixU();
  eff.v_h = svd_h.matrixV();
  eff.u_g = svd_g.matrixU();
  eff.v_g = svd_g.matrixV();
  eff.sv_h = svd_h.singularValues();
  eff.sv_g = svd_g.singularValues();

  auto count_modes = [](const VectorR& sv) {
    if (sv.size() == 0 || sv(0) <= 0.0) return 0;
    const double cut = 1e-12 * sv(0);
    int k = 0;
    while (k < sv.size() && sv(k) >= cut) ++k;
    return k;
  };
  eff.k1 = count_modes(eff.sv_h);
  eff.k2 = count_modes(eff.sv_g);
  eff.degenerate = (eff.k1 == 0 || eff.k2 == 0);

  eff.lambda_h = VectorR::Zero(nr);
  for (int i = 0; i < eff.k1; ++i) eff.lambda_h(i) = eff.sv_h(i) * eff.sv_h(i);
  eff.lambda_g.resize(eff.k2);
  for (int j = 0; j < eff.k2; ++j) eff.lambda_g(j) = eff.sv_g(j) * eff.sv_g(j);

  const MatrixC f_tilde = eff.u_h.adjoint() * ch.f * eff.v_g;
  eff.f_tilde_sq = f_tilde.cwiseAbs2();
  return eff;
}

// Lifts a per-mode solution back to transmit covariances and the relay
// receive combiner. Used to cross-check the scalar pipeline against the
// matrix-form rate and power expressions.
struct CovarianceSolution {
  MatrixC w_s;  // ns x ns source covariance
  MatrixC w_r;  // nr x nr relay covariance
  MatrixC q_r;  // nr x nr relay receive combiner (u_h^*)
};

inline CovarianceSolution reconstruct_covariances(const EffectiveChannel& eff,
                                                  const VectorR& p, const VectorR& q) {
  const int ns = int(eff.v_h.rows());
  const int nr = int(eff.v_g.rows());

  VectorR ps_full = VectorR::Zero(ns);
  for (int i = 0; i < p.size() && i < ns; ++i) ps_full(i) = p(i);
  VectorR qr_full = VectorR::Zero(nr);
  for (int j = 0; j < q.size() && j < nr; ++j) qr_full(j) = q(j);

  CovarianceSolution cov;
  cov.w_s = eff.v_h * ps_full.asDiagonal() * eff.v_h.adjoint();
  cov.w_r = eff.v_g * qr_full.asDiagonal() * eff.v_g.adjoint();
  cov.q_r = eff.u_h.adjoint();
  return cov;
}

}  // namespace fdswipt
