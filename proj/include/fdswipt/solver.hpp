#pragma once

// Scalarized problem data and the closed-form coordinate updates driving the
// primal-dual solver. All Lagrangian bookkeeping is in natural-log units;
// conversion to bits happens at the reporting boundary.

#include <algorithm>
#include <cmath>
#include <optional>

#include <Eigen/Dense>

#include "fdswipt/channel.hpp"

namespace fdswipt {

struct DualPoint {
  double alpha = 0.5;  // weight between the two hop rates
  double nu = 1.0;     // source power price
  double mu = 1.0;     // relay energy price
};

struct PrimalSolution {
  VectorR p;    // source mode powers, k1 entries
  VectorR q;    // relay mode powers, k2 entries (nr when isotropic)
  VectorR rho;  // power splitting ratios, nr entries
  double r1_bits = 0.0;
  double r2_bits = 0.0;
  double rate_bits = 0.0;
  double pr_watts = 0.0;  // harvested power net of cancellation cost
  bool feasible = false;
};

// Per-mode coefficients of the scalarized problem. Harvester efficiency is
// folded into hl and hf2 so harvest-side terms use them directly; rate-side
// terms keep the raw gains. f2_raw keeps the physical loopback gains for the
// harvester sensitivity check even when recycling is disabled.
struct ProblemData {
  int ns = 0;
  int nr = 0;
  int k1 = 0;
  int k2 = 0;
  VectorR lambda_h;  // nr, zero past k1
  VectorR lambda_g;  // k2
  VectorR hl;        // nr, eta * lambda_h
  MatrixR hf2;       // nr x nr, eta * |f_tilde|^2, zero when not harvested
  MatrixR f2_raw;    // nr x nr, |f_tilde|^2 at the antennas
  double ps = 0.0;
  double sigma1 = 0.0;  // processing noise plus residual self-interference
  double sigma_d2 = 0.0;
  double p_ic = 0.0;
  double eh_sensitivity = 0.0;
  double eta = 1.0;
  double eps = 1e-3;        // box for the splitting ratios
  double rate_scale = 1.0;  // 0.5 for the two-slot baseline
};

struct LinkOptions {
  double sigma_f2 = 0.0;
  double p_ic = 0.0;
  bool si_harvest = true;
  bool loopback = true;  // false removes the self-interference path entirely
  double rate_scale = 1.0;
};

inline ProblemData make_problem_data(const EffectiveChannel& eff, const SystemConfig& cfg,
                                     const LinkOptions& opt) {
  ProblemData pd;
  pd.ns = cfg.ns;
  pd.nr = int(eff.lambda_h.size());
  pd.k1 = eff.k1;
  pd.k2 = eff.k2;
  pd.lambda_h = eff.lambda_h;
  pd.lambda_g = eff.lambda_g;
  pd.hl = cfg.eta * eff.lambda_h;
  if (opt.loopback) {
    pd.f2_raw = eff.f_tilde_sq;
    pd.hf2 = opt.si_harvest ? MatrixR(cfg.eta * eff.f_tilde_sq)
                            : MatrixR(MatrixR::Zero(pd.nr, pd.nr));
    pd.sigma1 = cfg.sigma_p2 + opt.sigma_f2;
    pd.p_ic = opt.p_ic;
  } else {
    pd.f2_raw = MatrixR::Zero(pd.nr, pd.nr);
    pd.hf2 = MatrixR::Zero(pd.nr, pd.nr);
    pd.sigma1 = cfg.sigma_p2;
    pd.p_ic = 0.0;
  }
  pd.ps = cfg.ps_watts;
  pd.sigma_d2 = cfg.sigma_d2;
  pd.eh_sensitivity = cfg.eh_sensitivity_watts;
  pd.eta = cfg.eta;
  pd.eps = cfg.epsilon_boundary;
  pd.rate_scale = opt.rate_scale;
  return pd;
}

struct RateBreakdown {
  double r1_nats = 0.0;
  double r2_nats = 0.0;
  double harvest = 0.0;  // total harvested power
  double pr = 0.0;       // harvest minus cancellation cost
};

// Rates and relay power budget for any power profile. q may carry k2 entries
// (eigen-aligned relay covariance) or nr entries (isotropic); only the first
// k2 reach the destination, all of them feed the loopback harvest.
inline RateBreakdown rates_and_power(const ProblemData& pd, const VectorR& p,
                                     const VectorR& q, const VectorR& rho) {
  RateBreakdown rb;
  for (int i = 0; i < pd.k1 && i < p.size(); ++i) {
    rb.r1_nats += std::log1p((1.0 - rho(i)) * p(i) * pd.lambda_h(i) / pd.sigma1);
  }
  for (int j = 0; j < pd.k2 && j < q.size(); ++j) {
    rb.r2_nats += std::log1p(q(j) * pd.lambda_g(j) / pd.sigma_d2);
  }
  double harvest = 0.0;
  for (int i = 0; i < pd.k1 && i < p.size(); ++i) harvest += pd.hl(i) * p(i) * rho(i);
  for (int k = 0; k < pd.nr; ++k) {
    double row = 0.0;
    for (int j = 0; j < q.size(); ++j) row += q(j) * pd.hf2(k, j);
    harvest += rho(k) * row;
  }
  rb.harvest = harvest;
  rb.pr = harvest - pd.p_ic;
  return rb;
}

// Relay energy prices see the recycled loopback power through these
// effective costs: spending q_j costs q_j * D_j of the harvested budget.
inline double energy_cost_d(const ProblemData& pd, const VectorR& rho, int j) {
  double col = 0.0;
  for (int k = 0; k < pd.nr; ++k) col += rho(k) * pd.hf2(k, j);
  return 1.0 - col;
}

inline double lagrangian(const ProblemData& pd, const DualPoint& d, const VectorR& p,
                         const VectorR& q, const VectorR& rho) {
  const RateBreakdown rb = rates_and_power(pd, p, q, rho);
  return d.alpha * rb.r1_nats + (1.0 - d.alpha) * rb.r2_nats -
         d.nu * (p.sum() - pd.ps) - d.mu * (q.sum() - rb.pr);
}

struct Subgradients {
  double d_alpha = 0.0;  // r1 - r2
  double d_nu = 0.0;     // source power overshoot
  double d_mu = 0.0;     // relay energy overshoot
};

inline Subgradients subgradients(const ProblemData& pd, const VectorR& p, const VectorR& q,
                                 const VectorR& rho) {
  const RateBreakdown rb = rates_and_power(pd, p, q, rho);
  Subgradients s;
  s.d_alpha = rb.r1_nats - rb.r2_nats;
  s.d_nu = p.sum() - pd.ps;
  s.d_mu = q.sum() - rb.pr;
  return s;
}

// Outcome of one block-coordinate pass at a fixed dual point. When the dual
// point admits no bounded maximizer the pass reports a separating direction
// in (alpha, nu, mu) instead of touching the primal.
struct PassResult {
  bool admissible = true;
  Eigen::Vector3d cut = Eigen::Vector3d::Zero();
};

// The dual maximum stays finite only while nu exceeds mu * rho * hl_i for
// every feasible splitting ratio; the binding case is rho = 1 - eps on the
// strongest harvesting mode.
inline std::optional<Eigen::Vector3d> source_price_cut(const ProblemData& pd,
                                                       const DualPoint& d) {
  const double r = 1.0 - pd.eps;
  int worst = -1;
  double worst_v = 0.0;
  for (int i = 0; i < pd.k1; ++i) {
    const double v = d.mu * r * pd.hl(i) - d.nu;
    if (v >= 0.0 && (worst < 0 || v > worst_v)) {
      worst = i;
      worst_v = v;
    }
  }
  if (worst < 0) return std::nullopt;
  return Eigen::Vector3d(0.0, -1.0, r * pd.hl(worst));
}

namespace detail {

inline void update_p_block(const ProblemData& pd, const DualPoint& d, const VectorR& rho,
                           VectorR& p) {
  for (int i = 0; i < pd.k1; ++i) {
    const double denom = d.nu - d.mu * rho(i) * pd.hl(i);
    const double lam = pd.lambda_h(i);
    p(i) = positive_part(d.alpha / denom - pd.sigma1 / (lam * (1.0 - rho(i))));
  }
}

// Returns false when some effective energy cost is nonpositive, which only
// happens on structurally degenerate recycling instances.
inline bool update_q_block(const ProblemData& pd, const DualPoint& d, const VectorR& rho,
                           VectorR& q) {
  for (int j = 0; j < pd.k2; ++j) {
    const double dj = energy_cost_d(pd, rho, j);
    if (dj <= 0.0) return false;
    q(j) = positive_part((1.0 - d.alpha) / (d.mu * dj) - pd.sigma_d2 / pd.lambda_g(j));
  }
  return true;
}

inline void update_rho_block(const ProblemData& pd, const DualPoint& d, const VectorR& p,
                             const VectorR& q, VectorR& rho) {
  const double eps = pd.eps;
  for (int k = 0; k < pd.nr; ++k) {
    double si = 0.0;
    for (int j = 0; j < q.size(); ++j) si += q(j) * pd.hf2(k, j);
    const double lam_p = (k < p.size()) ? pd.lambda_h(k) * p(k) : 0.0;
    if (lam_p <= 0.0) {
      rho(k) = (d.mu * si > 0.0) ? 1.0 - eps : eps;
      continue;
    }
    const double a = pd.hl(k) * p(k) + si;
    const double val = 1.0 + pd.sigma1 / lam_p - d.alpha / (d.mu * a);
    rho(k) = std::clamp(val, eps, 1.0 - eps);
  }
}

}  // namespace detail

// Per-antenna splitting: rho from the previous powers, then source powers,
// then relay powers. Each block lands on its exact box-constrained
// Lagrangian maximizer, so the Lagrangian cannot decrease along the pass.
// Requires mu > 0 and alpha in [0, 1].
inline PassResult update_nonuniform(const ProblemData& pd, const DualPoint& d, VectorR& p,
                                    VectorR& q, VectorR& rho) {
  PassResult res;
  if (auto cut = source_price_cut(pd, d)) {
    res.admissible = false;
    res.cut = *cut;
    return res;
  }
  detail::update_rho_block(pd, d, p, q, rho);
  detail::update_p_block(pd, d, rho, p);
  if (!detail::update_q_block(pd, d, rho, q)) {
    res.admissible = false;
    res.cut = Eigen::Vector3d(0.0, 0.0, 1.0);
    return res;
  }
  return res;
}

// Shared splitting ratio: the stationary condition balances the weighted
// rate loss against the energy price. The balance function is increasing in
// rho, so an interior root is found by bisection; otherwise both endpoints
// are evaluated with their matching power profiles and the better achieved
// min-rate wins.
inline PassResult update_uniform(const ProblemData& pd, const DualPoint& d, VectorR& p,
                                 VectorR& q, VectorR& rho) {
  PassResult res;
  if (auto cut = source_price_cut(pd, d)) {
    res.admissible = false;
    res.cut = *cut;
    return res;
  }
  const double eps = pd.eps;

  double c = 0.0;
  for (int i = 0; i < pd.k1; ++i) c += pd.hl(i) * p(i);
  for (int j = 0; j < q.size(); ++j) {
    double col = 0.0;
    for (int k = 0; k < pd.nr; ++k) col += pd.hf2(k, j);
    c += q(j) * col;
  }
  c *= d.mu;

  auto balance = [&](double r) {
    double s = 0.0;
    for (int i = 0; i < pd.k1; ++i) {
      const double plam = p(i) * pd.lambda_h(i);
      s += d.alpha * plam / (pd.sigma1 + (1.0 - r) * plam);
    }
    return s;
  };

  const double b_lo = balance(eps);
  const double b_hi = balance(1.0 - eps);
  if (b_lo <= c && c <= b_hi && b_lo < b_hi) {
    const double r = bisect_increasing(balance, eps, 1.0 - eps, c, 1e-10);
    rho.setConstant(r);
    detail::update_p_block(pd, d, rho, p);
    if (!detail::update_q_block(pd, d, rho, q)) {
      res.admissible = false;
      res.cut = Eigen::Vector3d(0.0, 0.0, 1.0);
    }
    return res;
  }

  double best_min = -1.0;
  VectorR best_p = p, best_q = q, best_rho = rho;
  for (const double r : {eps, 1.0 - eps}) {
    VectorR pc = p, qc = q;
    VectorR rc = VectorR::Constant(pd.nr, r);
    detail::update_p_block(pd, d, rc, pc);
    if (!detail::update_q_block(pd, d, rc, qc)) {
      res.admissible = false;
      res.cut = Eigen::Vector3d(0.0, 0.0, 1.0);
      return res;
    }
    const RateBreakdown rb = rates_and_power(pd, pc, qc, rc);
    const double mr = std::min(rb.r1_nats, rb.r2_nats);
    if (mr > best_min) {
      best_min = mr;
      best_p = pc;
      best_q = qc;
      best_rho = rc;
    }
  }
  p = best_p;
  q = best_q;
  rho = best_rho;
  return res;
}

// Receive-side-CSI state: isotropic covariances leave the splitting ratios
// and the scalar relay budget as the only live variables.
struct CsirState {
  VectorR rho;
  double pr = 0.0;
};

struct CsirStep {
  double h_lagged = 0.0;  // energy overshoot at the previous relay budget
  bool structural = false;
};

// One receive-CSI pass at dual (alpha, mu): splitting ratios from the
// previous relay budget, then the budget pinned by the energy balance. The
// energy subgradient is evaluated at the previous budget, otherwise the
// pinned balance reports zero and the price never moves.
inline CsirStep update_csir(const ProblemData& pd, double alpha, double mu, CsirState& st) {
  const double eps = pd.eps;
  const double sp = pd.ps / double(pd.ns);
  const double pr_prev = st.pr;

  for (int k = 0; k < pd.nr; ++k) {
    const double row = pd.hf2.row(k).sum();
    const double si = (pr_prev / double(pd.nr)) * row;
    const double b = pd.lambda_h(k) * sp;
    if (b <= 0.0) {
      st.rho(k) = (mu * si > 0.0) ? 1.0 - eps : eps;
      continue;
    }
    const double a = pd.hl(k) * sp + si;
    st.rho(k) = std::clamp(1.0 + pd.sigma1 / b - alpha / (mu * a), eps, 1.0 - eps);
  }

  double t = 0.0;  // recycled fraction per unit of relay power
  double harvest_src = 0.0;
  for (int k = 0; k < pd.nr; ++k) {
    t += st.rho(k) * pd.hf2.row(k).sum();
    harvest_src += st.rho(k) * pd.hl(k);
  }
  harvest_src *= sp;

  CsirStep step;
  step.h_lagged = pr_prev + pd.p_ic - harvest_src - (pr_prev / double(pd.nr)) * t;

  const double den = 1.0 - t / double(pd.nr);
  const double num = harvest_src - pd.p_ic;
  if (den <= 0.0) {
    step.structural = true;
    st.pr = 0.0;
  } else {
    st.pr = num > 0.0 ? num / den : 0.0;
  }
  return step;
}

// Expands receive-CSI state into the generic power-profile form: per-mode
// source power on the coupled modes, the relay budget spread over all nr
// directions.
inline void csir_profile(const ProblemData& pd, const CsirState& st, VectorR& p, VectorR& q) {
  p = VectorR::Constant(pd.k1, pd.ps / double(pd.ns));
  q = VectorR::Constant(pd.nr, st.pr / double(pd.nr));
}

}  // namespace fdswipt
