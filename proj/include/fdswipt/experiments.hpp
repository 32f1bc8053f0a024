#pragma once

// Monte Carlo driver: per-realization runs, comparative sweeps over one
// system axis, and the aggregation used by the plots.

#include <atomic>
#include <cmath>
#include <cstdint>
#include <string>
#include <thread>
#include <vector>

#include "fdswipt/solve.hpp"

namespace fdswipt {

struct RunRecord {
  std::uint64_t seed = 0;
  Scheme scheme = Scheme::FdNonuniform;
  int ns = 0, nr = 0, nd = 0;
  double ps_dbm = 0.0;
  double d_sr_m = 0.0;
  double rate_bps_hz = 0.0;
  double pr_watts = 0.0;
  int iterations = 0;
  bool converged = false;
  bool aborted = false;
};

inline RunRecord run_scheme(const SystemConfig& cfg, Scheme scheme, std::uint64_t seed) {
  const ChannelRealization ch = generate_channels(cfg, seed);
  const EffectiveChannel eff = decompose(ch);
  const SolveResult res = solve(eff, cfg, scheme);

  RunRecord rec;
  rec.seed = seed;
  rec.scheme = scheme;
  rec.ns = cfg.ns;
  rec.nr = cfg.nr;
  rec.nd = cfg.nd;
  rec.ps_dbm = watts_to_dbm(cfg.ps_watts);
  rec.d_sr_m = cfg.d_sr;
  rec.rate_bps_hz = res.sol.rate_bits;
  rec.pr_watts = res.sol.pr_watts;
  rec.iterations = res.rep.iterations;
  rec.converged = res.rep.converged;
  rec.aborted = res.rep.aborted;
  return rec;
}

enum class SweepAxis { PsDbm, Nr, DsrM };

inline const char* sweep_axis_name(SweepAxis a) {
  switch (a) {
    case SweepAxis::PsDbm: return "ps_dbm";
    case SweepAxis::Nr: return "nr";
    case SweepAxis::DsrM: return "d_sr";
  }
  return "unknown";
}

inline bool sweep_axis_from_string(const std::string& s, SweepAxis& out) {
  if (s == "ps_dbm") {
    out = SweepAxis::PsDbm;
    return true;
  }
  if (s == "nr") {
    out = SweepAxis::Nr;
    return true;
  }
  if (s == "d_sr") {
    out = SweepAxis::DsrM;
    return true;
  }
  return false;
}

inline SystemConfig apply_axis(const SystemConfig& base, SweepAxis axis, double v) {
  SystemConfig cfg = base;
  switch (axis) {
    case SweepAxis::PsDbm:
      cfg.ps_watts = dbm_to_watts(v);
      break;
    case SweepAxis::Nr:
      cfg.nr = int(std::lround(v));
      break;
    case SweepAxis::DsrM:
      cfg.d_sr = v;
      break;
  }
  return cfg;
}

struct SweepSpec {
  SweepAxis axis = SweepAxis::PsDbm;
  std::vector<double> values;
  std::vector<Scheme> schemes;
  int realizations = 100;
  std::uint64_t base_seed = 1;
  int threads = 1;
};

struct AggRecord {
  double axis_value = 0.0;
  Scheme scheme = Scheme::FdNonuniform;
  double mean_rate = 0.0;
  double std_error = 0.0;
  double zero_rate_fraction = 0.0;
  int n = 0;
};

struct SweepResult {
  std::vector<RunRecord> raw;  // axis-major, then scheme, then realization
  std::vector<AggRecord> agg;
};

// Realization r reuses the same channel draw across every axis value and
// scheme, so curves differ only through the system parameter under test.
inline std::uint64_t realization_seed(std::uint64_t base_seed, int r) {
  return base_seed ^ std::uint64_t(r);
}

inline SweepResult run_sweep(const SystemConfig& base, const SweepSpec& spec) {
  const int nv = int(spec.values.size());
  const int ns = int(spec.schemes.size());
  const int nr = spec.realizations;
  const std::size_t total = std::size_t(nv) * ns * nr;

  SweepResult out;
  out.raw.resize(total);

  auto run_job = [&](std::size_t k) {
    const int ri = int(k % nr);
    const int si = int((k / nr) % ns);
    const int vi = int(k / (std::size_t(nr) * ns));
    const SystemConfig cfg = apply_axis(base, spec.axis, spec.values[vi]);
    out.raw[k] = run_scheme(cfg, spec.schemes[si], realization_seed(spec.base_seed, ri));
  };

  const int workers = std::max(1, spec.threads);
  if (workers == 1 || total <= 1) {
    for (std::size_t k = 0; k < total; ++k) run_job(k);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&]() {
        for (std::size_t k = next.fetch_add(1); k < total; k = next.fetch_add(1))
          run_job(k);
      });
    }
    for (auto& t : pool) t.join();
  }

  for (int vi = 0; vi < nv; ++vi) {
    for (int si = 0; si < ns; ++si) {
      AggRecord agg;
      agg.axis_value = spec.values[vi];
      agg.scheme = spec.schemes[si];
      agg.n = nr;
      double sum = 0.0;
      int zeros = 0;
      for (int ri = 0; ri < nr; ++ri) {
        const double rate =
            out.raw[(std::size_t(vi) * ns + si) * nr + ri].rate_bps_hz;
        sum += rate;
        if (rate <= 1e-12) ++zeros;
      }
      agg.mean_rate = nr > 0 ? sum / nr : 0.0;
      double ss = 0.0;
      for (int ri = 0; ri < nr; ++ri) {
        const double d =
            out.raw[(std::size_t(vi) * ns + si) * nr + ri].rate_bps_hz - agg.mean_rate;
        ss += d * d;
      }
      agg.std_error = nr > 1 ? std::sqrt(ss / (nr - 1) / nr) : 0.0;
      agg.zero_rate_fraction = nr > 0 ? double(zeros) / nr : 0.0;
      out.agg.push_back(agg);
    }
  }
  return out;
}

}  // namespace fdswipt
