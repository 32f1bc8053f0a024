#pragma once

// Exhaustive reference solver: a shrinking grid over the splitting ratios
// with an exact inner power solve per grid point. Deliberately independent
// of the dual machinery; used to certify the fast solver on small systems.

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "fdswipt/solver.hpp"

namespace fdswipt {

struct OracleOptions {
  int grid_points = 25;
  int refine_rounds = 3;
  int max_dims = 6;  // refuse when k1 + k2 + nr exceeds this
};

struct OracleResult {
  PrimalSolution sol;
  bool ok = false;
};

namespace oracle_detail {

struct InnerSolution {
  double r1_nats = 0.0;
  double r2_nats = 0.0;
  double rate_nats = 0.0;
  VectorR p;
  VectorR q;
};

// Destination-side waterfilling against the effective energy costs:
// maximizes the second-hop rate subject to sum_j q_j d_j = budget. A
// nonpositive cost means recycling repays the spend, making the second hop
// unbounded; the caller treats that as an infinite rate.
inline bool waterfill_q(const ProblemData& pd, const VectorR& rho, double budget,
                        VectorR& q, double& r2_nats) {
  q = VectorR::Zero(pd.k2);
  r2_nats = 0.0;
  if (budget <= 0.0) return true;

  VectorR d(pd.k2);
  for (int j = 0; j < pd.k2; ++j) {
    d(j) = energy_cost_d(pd, rho, j);
    if (d(j) <= 0.0) return false;
  }

  double w_hi = 0.0;
  for (int j = 0; j < pd.k2; ++j)
    w_hi = std::max(w_hi, pd.lambda_g(j) / (pd.sigma_d2 * d(j)));
  auto spend = [&](double w) {
    double s = 0.0;
    for (int j = 0; j < pd.k2; ++j)
      s += d(j) * positive_part(1.0 / (w * d(j)) - pd.sigma_d2 / pd.lambda_g(j));
    return s;
  };
  double lo = w_hi * 1e-18, hi = w_hi;
  if (spend(lo) < budget) {
    // budget beyond this bracket only happens at absurd scales; widen once
    lo = w_hi * 1e-60;
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (spend(mid) > budget) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double w = 0.5 * (lo + hi);
  for (int j = 0; j < pd.k2; ++j) {
    q(j) = positive_part(1.0 / (w * d(j)) - pd.sigma_d2 / pd.lambda_g(j));
    r2_nats += std::log1p(q(j) * pd.lambda_g(j) / pd.sigma_d2);
  }
  return true;
}

// Source allocations on the first-hop/harvest Pareto frontier at trade-off
// m >= 0, with the full source budget spent.
inline void source_family(const ProblemData& pd, const VectorR& rho, double m,
                          VectorR& p, double& r1_nats, double& harvest) {
  const int k1 = pd.k1;
  VectorR a(k1), c(k1);
  double a_max = 0.0;
  for (int i = 0; i < k1; ++i) {
    a(i) = pd.hl(i) * rho(i);
    c(i) = pd.sigma1 / ((1.0 - rho(i)) * pd.lambda_h(i));
    a_max = std::max(a_max, a(i));
  }
  double u_hi = 0.0;
  for (int i = 0; i < k1; ++i)
    u_hi = std::max(u_hi, 1.0 / c(i) + m * (a(i) - a_max));
  auto total = [&](double u) {
    double s = 0.0;
    for (int i = 0; i < k1; ++i)
      s += positive_part(1.0 / (u + m * (a_max - a(i))) - c(i));
    return s;
  };
  double lo = u_hi * 1e-18, hi = u_hi;
  if (total(lo) < pd.ps) lo = u_hi * 1e-60;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (total(mid) > pd.ps) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double u = 0.5 * (lo + hi);
  p.resize(k1);
  r1_nats = 0.0;
  harvest = 0.0;
  for (int i = 0; i < k1; ++i) {
    p(i) = positive_part(1.0 / (u + m * (a_max - a(i))) - c(i));
    r1_nats += std::log1p(p(i) / c(i));
    harvest += a(i) * p(i);
  }
}

// Best achievable min-rate for a fixed splitting profile. The trade-off
// between feeding the first hop and feeding the harvester is scanned over
// m, where the min of a decreasing and an increasing branch is unimodal.
inline InnerSolution inner_solve(const ProblemData& pd, const VectorR& rho) {
  InnerSolution best;
  best.p = VectorR::Zero(pd.k1);
  best.q = VectorR::Zero(pd.k2);
  best.rate_nats = -1.0;

  double hl_rho_max = 0.0;
  for (int i = 0; i < pd.k1; ++i) hl_rho_max = std::max(hl_rho_max, pd.hl(i) * rho(i));
  const double budget_cap = hl_rho_max * pd.ps - pd.p_ic;
  const double m_scale =
      double(pd.k2) / std::max(budget_cap > 0.0 ? budget_cap : 1e-6 * hl_rho_max * pd.ps,
                               1e-300);

  auto evaluate = [&](double m) {
    InnerSolution cand;
    double harvest = 0.0;
    source_family(pd, rho, m, cand.p, cand.r1_nats, harvest);
    double r2 = 0.0;
    if (!waterfill_q(pd, rho, harvest - pd.p_ic, cand.q, r2)) {
      cand.q = VectorR::Zero(pd.k2);
      cand.r2_nats = std::numeric_limits<double>::infinity();
      cand.rate_nats = cand.r1_nats;
      return cand;
    }
    cand.r2_nats = r2;
    cand.rate_nats = std::min(cand.r1_nats, cand.r2_nats);
    return cand;
  };

  auto consider = [&](const InnerSolution& cand) {
    if (cand.rate_nats > best.rate_nats) best = cand;
  };

  constexpr int kCoarse = 32;
  auto m_of_t = [&](double t) { return m_scale * std::tan(0.5 * M_PI * t); };
  int best_k = 0;
  for (int k = 0; k < kCoarse; ++k) {
    const double t = double(k) / double(kCoarse);
    const InnerSolution cand = evaluate(m_of_t(t));
    if (cand.rate_nats > best.rate_nats) best_k = k;
    consider(cand);
  }

  // full-budget corner: everything on the strongest harvesting mode
  {
    InnerSolution corner;
    corner.p = VectorR::Zero(pd.k1);
    int amax = 0;
    for (int i = 1; i < pd.k1; ++i)
      if (pd.hl(i) * rho(i) > pd.hl(amax) * rho(amax)) amax = i;
    corner.p(amax) = pd.ps;
    corner.r1_nats = std::log1p((1.0 - rho(amax)) * pd.ps * pd.lambda_h(amax) / pd.sigma1);
    const double harvest = pd.hl(amax) * rho(amax) * pd.ps;
    double r2 = 0.0;
    if (!waterfill_q(pd, rho, harvest - pd.p_ic, corner.q, r2)) {
      corner.q = VectorR::Zero(pd.k2);
      corner.r2_nats = std::numeric_limits<double>::infinity();
      corner.rate_nats = corner.r1_nats;
    } else {
      corner.r2_nats = r2;
      corner.rate_nats = std::min(corner.r1_nats, corner.r2_nats);
    }
    consider(corner);
  }

  const double t_lo = double(std::max(best_k - 1, 0)) / double(kCoarse);
  const double t_hi = std::min(double(best_k + 1) / double(kCoarse), 1.0 - 1e-12);
  const double t_star = golden_section_max(
      [&](double t) { return evaluate(m_of_t(t)).rate_nats; }, t_lo, t_hi, 1e-9);
  consider(evaluate(m_of_t(t_star)));

  if (best.rate_nats < 0.0) {
    best.rate_nats = 0.0;
    best.r1_nats = 0.0;
    best.r2_nats = 0.0;
  }
  if (std::isinf(best.r2_nats)) best.r2_nats = best.r1_nats;
  return best;
}

// Visits every point of an axis-aligned grid; dims up to max_dims.
template <typename F>
void for_each_grid_point(const std::vector<std::pair<double, double>>& ranges,
                         int points, F&& body) {
  const int dims = int(ranges.size());
  std::vector<int> idx(dims, 0);
  VectorR x(dims);
  while (true) {
    for (int d = 0; d < dims; ++d) {
      const auto [lo, hi] = ranges[d];
      x(d) = points > 1 ? lo + (hi - lo) * double(idx[d]) / double(points - 1) : lo;
    }
    body(x);
    int d = 0;
    while (d < dims && ++idx[d] == points) {
      idx[d] = 0;
      ++d;
    }
    if (d == dims) break;
  }
}

}  // namespace oracle_detail

inline OracleResult oracle_solve(const EffectiveChannel& eff, const SystemConfig& cfg,
                                 Scheme scheme, const OracleOptions& opt = {}) {
  OracleResult out;
  if (scheme != Scheme::FdNonuniform && scheme != Scheme::FdUniform &&
      scheme != Scheme::FdCsir) {
    return out;
  }

  LinkOptions lo;
  lo.sigma_f2 = cfg.sigma_f2_active();
  lo.p_ic = cfg.p_ic_watts;
  lo.si_harvest = cfg.si_harvest;
  const ProblemData pd = make_problem_data(eff, cfg, lo);

  const int nr = pd.nr;
  if (pd.k1 + pd.k2 + nr > opt.max_dims) return out;

  auto zero = [&](int q_len) {
    PrimalSolution s;
    s.p = VectorR::Zero(pd.k1);
    s.q = VectorR::Zero(q_len);
    s.rho = VectorR::Constant(nr, pd.eps);
    s.feasible = false;
    out.sol = s;
    out.ok = true;
    return out;
  };
  if (pd.k1 == 0 || pd.k2 == 0) return zero(pd.k2);

  const double eps = pd.eps;
  const double full_lo = eps, full_hi = 1.0 - eps;
  const int grid_dims = (scheme == Scheme::FdUniform) ? 1 : nr;

  double best_rate = -1.0;
  VectorR best_rho = VectorR::Constant(nr, eps);
  oracle_detail::InnerSolution best_inner;
  best_inner.p = VectorR::Zero(pd.k1);
  best_inner.q = VectorR::Zero(pd.k2);

  const double sp = pd.ps / double(pd.ns);
  auto eval_rho = [&](const VectorR& grid_x) {
    VectorR rho(nr);
    if (scheme == Scheme::FdUniform) {
      rho.setConstant(grid_x(0));
    } else {
      rho = grid_x;
    }
    if (scheme == Scheme::FdCsir) {
      double t = 0.0, harvest_src = 0.0;
      for (int k = 0; k < nr; ++k) {
        t += rho(k) * pd.hf2.row(k).sum();
        harvest_src += rho(k) * pd.hl(k) * sp;
      }
      const double den = 1.0 - t / double(nr);
      const double num = harvest_src - pd.p_ic;
      const double pr = (den > 0.0 && num > 0.0) ? num / den : 0.0;
      oracle_detail::InnerSolution inner;
      inner.p = VectorR::Constant(pd.k1, sp);
      inner.q = VectorR::Constant(nr, pr / double(nr));
      const RateBreakdown rb = rates_and_power(pd, inner.p, inner.q, rho);
      inner.r1_nats = rb.r1_nats;
      inner.r2_nats = rb.r2_nats;
      inner.rate_nats = pr > 0.0 ? std::min(rb.r1_nats, rb.r2_nats) : 0.0;
      if (inner.rate_nats > best_rate) {
        best_rate = inner.rate_nats;
        best_rho = rho;
        best_inner = inner;
      }
      return;
    }
    const oracle_detail::InnerSolution inner = oracle_detail::inner_solve(pd, rho);
    if (inner.rate_nats > best_rate) {
      best_rate = inner.rate_nats;
      best_rho = rho;
      best_inner = inner;
    }
  };

  std::vector<std::pair<double, double>> ranges(grid_dims, {full_lo, full_hi});
  oracle_detail::for_each_grid_point(ranges, opt.grid_points, eval_rho);
  for (int round = 0; round < opt.refine_rounds; ++round) {
    const double span = (ranges[0].second - ranges[0].first) * 0.2;
    for (int d = 0; d < grid_dims; ++d) {
      const double center =
          (scheme == Scheme::FdUniform) ? best_rho(0) : best_rho(d);
      double lo2 = std::max(full_lo, center - 0.5 * span);
      double hi2 = std::min(full_hi, lo2 + span);
      lo2 = std::max(full_lo, hi2 - span);
      ranges[d] = {lo2, hi2};
    }
    oracle_detail::for_each_grid_point(ranges, opt.grid_points, eval_rho);
  }

  if (best_rate <= 0.0) return zero(scheme == Scheme::FdCsir ? nr : pd.k2);

  PrimalSolution sol;
  sol.p = best_inner.p;
  sol.q = best_inner.q;
  sol.rho = best_rho;
  sol.r1_bits = pd.rate_scale * nats_to_bits(best_inner.r1_nats);
  sol.r2_bits = pd.rate_scale * nats_to_bits(best_inner.r2_nats);
  sol.rate_bits = std::min(sol.r1_bits, sol.r2_bits);
  const RateBreakdown rb = rates_and_power(pd, sol.p, sol.q, sol.rho);
  sol.pr_watts = rb.pr;
  sol.feasible = true;

  double rf = 0.0;
  for (int i = 0; i < pd.k1; ++i) rf += pd.lambda_h(i) * sol.p(i);
  for (int j = 0; j < sol.q.size(); ++j) {
    double col = 0.0;
    for (int k = 0; k < nr; ++k) col += pd.f2_raw(k, j);
    rf += sol.q(j) * col;
  }
  if (rf < pd.eh_sensitivity) return zero(int(sol.q.size()));

  out.sol = sol;
  out.ok = true;
  return out;
}

}  // namespace fdswipt
