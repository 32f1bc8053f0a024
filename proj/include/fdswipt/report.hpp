#pragma once

// Serialization of solve results, sweep tables, and convergence traces.
// Doubles are printed in shortest round-trip form so repeated runs produce
// byte-identical files.

#include <ostream>
#include <string>

#include <json.hpp>

#include "fdswipt/experiments.hpp"

namespace fdswipt {

inline nlohmann::json solution_to_json(const PrimalSolution& sol) {
  nlohmann::json j;
  j["rate"] = sol.rate_bits;
  j["r1"] = sol.r1_bits;
  j["r2"] = sol.r2_bits;
  j["pr"] = sol.pr_watts;
  j["p"] = std::vector<double>(sol.p.data(), sol.p.data() + sol.p.size());
  j["q"] = std::vector<double>(sol.q.data(), sol.q.data() + sol.q.size());
  j["rho"] = std::vector<double>(sol.rho.data(), sol.rho.data() + sol.rho.size());
  return j;
}

inline nlohmann::json solve_to_json(const SolveResult& res) {
  nlohmann::json j = solution_to_json(res.sol);
  j["iterations"] = res.rep.iterations;
  j["converged"] = res.rep.converged;
  j["dual_point"] = {{"alpha", res.rep.best_dual.alpha},
                     {"nu", res.rep.best_dual.nu},
                     {"mu", res.rep.best_dual.mu}};
  j["duality_gap_estimate"] = res.rep.gap_bits;
  return j;
}

inline void write_raw_csv(std::ostream& os, const std::vector<RunRecord>& rows) {
  os << "seed,scheme,ns,nr,nd,ps_dbm,d_sr_m,rate_bps_hz,pr_watts,iterations,converged\n";
  for (const RunRecord& r : rows) {
    os << r.seed << ',' << scheme_name(r.scheme) << ',' << r.ns << ',' << r.nr << ','
       << r.nd << ',' << format_double(r.ps_dbm) << ',' << format_double(r.d_sr_m)
       << ',' << format_double(r.rate_bps_hz) << ',' << format_double(r.pr_watts)
       << ',' << r.iterations << ',' << (r.converged ? 1 : 0) << '\n';
  }
}

inline void write_agg_csv(std::ostream& os, const std::vector<AggRecord>& rows) {
  os << "axis_value,scheme,mean_rate,std_error,zero_rate_fraction,n\n";
  for (const AggRecord& r : rows) {
    os << format_double(r.axis_value) << ',' << scheme_name(r.scheme) << ','
       << format_double(r.mean_rate) << ',' << format_double(r.std_error) << ','
       << format_double(r.zero_rate_fraction) << ',' << r.n << '\n';
  }
}

inline void write_trace_csv(std::ostream& os, const std::vector<TracePoint>& rows) {
  os << "iteration,best_dual_value,current_primal_rate\n";
  for (const TracePoint& t : rows) {
    os << t.iteration << ',' << format_double(t.best_dual_bits) << ','
       << format_double(t.primal_rate_bits) << '\n';
  }
}

}  // namespace fdswipt
