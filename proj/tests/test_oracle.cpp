#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "fdswipt/fdswipt.hpp"

using namespace fdswipt;

namespace {

// The certification tolerance used throughout: absolute floor for dead or
// tiny links, relative band otherwise.
bool rates_agree(double solver_rate, double oracle_rate) {
  return std::abs(solver_rate - oracle_rate) <=
         std::max(1e-3, 0.01 * oracle_rate);
}

ProblemData active_problem(const EffectiveChannel& eff, const SystemConfig& cfg) {
  LinkOptions lo;
  lo.sigma_f2 = cfg.sigma_f2_active();
  lo.p_ic = cfg.p_ic_watts;
  return make_problem_data(eff, cfg, lo);
}

}  // namespace

TEST_CASE("grid search certifies the per-antenna solver", "[oracle]") {
  SystemConfig cfg;
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    const auto eff = decompose(generate_channels(cfg, seed));
    const auto fast = solve(eff, cfg, Scheme::FdNonuniform);
    const auto slow = oracle_solve(eff, cfg, Scheme::FdNonuniform);
    REQUIRE(slow.ok);
    INFO("seed " << seed << " solver " << fast.sol.rate_bits << " oracle "
                 << slow.sol.rate_bits);
    REQUIRE(rates_agree(fast.sol.rate_bits, slow.sol.rate_bits));
  }
}

TEST_CASE("grid search certifies the shared-ratio solver", "[oracle]") {
  SystemConfig cfg;
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    const auto eff = decompose(generate_channels(cfg, seed));
    const auto fast = solve(eff, cfg, Scheme::FdUniform);
    const auto slow = oracle_solve(eff, cfg, Scheme::FdUniform);
    REQUIRE(slow.ok);
    INFO("seed " << seed << " solver " << fast.sol.rate_bits << " oracle "
                 << slow.sol.rate_bits);
    REQUIRE(rates_agree(fast.sol.rate_bits, slow.sol.rate_bits));
  }
}

TEST_CASE("grid search certifies the receive-CSI solver", "[oracle]") {
  SystemConfig cfg;
  cfg.ps_watts = dbm_to_watts(45.0);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto eff = decompose(generate_channels(cfg, seed));
    const auto fast = solve(eff, cfg, Scheme::FdCsir);
    const auto slow = oracle_solve(eff, cfg, Scheme::FdCsir);
    REQUIRE(slow.ok);
    INFO("seed " << seed << " solver " << fast.sol.rate_bits << " oracle "
                 << slow.sol.rate_bits);
    REQUIRE(rates_agree(fast.sol.rate_bits, slow.sol.rate_bits));
  }
}

TEST_CASE("the reference solution respects every constraint", "[oracle]") {
  SystemConfig cfg;
  cfg.ps_watts = dbm_to_watts(25.0);
  for (std::uint64_t seed = 11; seed <= 14; ++seed) {
    const auto eff = decompose(generate_channels(cfg, seed));
    const auto slow = oracle_solve(eff, cfg, Scheme::FdNonuniform);
    REQUIRE(slow.ok);
    if (!slow.sol.feasible) continue;
    const ProblemData pd = active_problem(eff, cfg);
    REQUIRE(slow.sol.p.sum() <= pd.ps * (1.0 + 1e-6));
    double spent = 0.0;
    for (int j = 0; j < slow.sol.q.size(); ++j)
      spent += slow.sol.q(j) * energy_cost_d(pd, slow.sol.rho, j);
    double earned = -pd.p_ic;
    for (int i = 0; i < pd.k1; ++i)
      earned += pd.hl(i) * slow.sol.p(i) * slow.sol.rho(i);
    REQUIRE(spent <= earned * (1.0 + 1e-6) + 1e-15);
    REQUIRE(slow.sol.rho.minCoeff() >= pd.eps);
    REQUIRE(slow.sol.rho.maxCoeff() <= 1.0 - pd.eps);
  }
}

TEST_CASE("the reference never loses to the fast solver", "[oracle]") {
  SystemConfig cfg;
  for (std::uint64_t seed = 21; seed <= 26; ++seed) {
    const auto eff = decompose(generate_channels(cfg, seed));
    const auto fast = solve(eff, cfg, Scheme::FdNonuniform);
    const auto slow = oracle_solve(eff, cfg, Scheme::FdNonuniform);
    REQUIRE(slow.ok);
    REQUIRE(slow.sol.rate_bits >=
            fast.sol.rate_bits - std::max(1e-3, 0.005 * fast.sol.rate_bits));
  }
}

TEST_CASE("oracle refuses systems beyond its exhaustive budget", "[oracle]") {
  SystemConfig cfg;
  cfg.ns = cfg.nr = cfg.nd = 4;
  const auto eff = decompose(generate_channels(cfg, 1));
  const auto slow = oracle_solve(eff, cfg, Scheme::FdNonuniform);
  REQUIRE_FALSE(slow.ok);
}

TEST_CASE("oracle covers only the schemes it can verify", "[oracle]") {
  SystemConfig cfg;
  const auto eff = decompose(generate_channels(cfg, 1));
  REQUIRE_FALSE(oracle_solve(eff, cfg, Scheme::HalfDuplex).ok);
  REQUIRE_FALSE(oracle_solve(eff, cfg, Scheme::FdHybrid).ok);
  REQUIRE_FALSE(oracle_solve(eff, cfg, Scheme::FdPassive).ok);
}

TEST_CASE("oracle reports a dead link below the power-up threshold", "[oracle]") {
  SystemConfig cfg;
  cfg.ps_watts = dbm_to_watts(10.0);
  const auto eff = decompose(generate_channels(cfg, 2));
  const auto slow = oracle_solve(eff, cfg, Scheme::FdNonuniform);
  REQUIRE(slow.ok);
  REQUIRE(slow.sol.rate_bits == 0.0);
  REQUIRE_FALSE(slow.sol.feasible);
  const auto fast = solve(eff, cfg, Scheme::FdNonuniform);
  REQUIRE(fast.sol.rate_bits == 0.0);
}
