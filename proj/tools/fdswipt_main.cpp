// Command line front end: single solves, Monte Carlo sweeps, the reference
// oracle, and convergence traces.
//
// Exit codes: 0 success, 2 configuration or usage error, 3 solver abort.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "fdswipt/fdswipt.hpp"

namespace {

struct CliState {
  fdswipt::SystemConfig cfg;
  fdswipt::RunSettings run;
  std::string config_path;
  std::string output_path;
  std::string scheme_flag;
  std::uint64_t seed_flag = 0;
  int realizations_flag = 0;
  int threads_flag = 0;
};

void load_config(CliState& st) {
  if (st.config_path.empty()) return;
  std::ifstream in(st.config_path);
  if (!in) throw fdswipt::ConfigError(0, "cannot open '" + st.config_path + "'");
  fdswipt::apply_config_stream(in, st.cfg, st.run);
}

void apply_flag_overrides(CliState& st, const CLI::App* sub) {
  if (sub->count("--scheme") > 0) {
    if (!fdswipt::scheme_from_string(st.scheme_flag, st.run.scheme))
      throw fdswipt::ConfigError(0, "unknown scheme '" + st.scheme_flag + "'");
  }
  if (sub->count("--seed") > 0) st.run.seed = st.seed_flag;
  if (sub->count("--realizations") > 0) st.run.realizations = st.realizations_flag;
  if (sub->count("--threads") > 0) st.run.threads = st.threads_flag;
}

int thread_default() {
  if (const char* env = std::getenv("FDSWIPT_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 1;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw fdswipt::ConfigError(0, "cannot write '" + path + "'");
  out << text;
}

std::string agg_path(const std::string& raw_path) {
  const std::string suffix = ".csv";
  if (raw_path.size() > suffix.size() &&
      raw_path.compare(raw_path.size() - suffix.size(), suffix.size(), suffix) == 0) {
    return raw_path.substr(0, raw_path.size() - suffix.size()) + "_agg.csv";
  }
  return raw_path + "_agg.csv";
}

int run_solve(CliState& st) {
  st.cfg.validate();
  const auto ch = fdswipt::generate_channels(st.cfg, st.run.seed);
  const auto eff = fdswipt::decompose(ch);
  const auto res = fdswipt::solve(eff, st.cfg, st.run.scheme);
  if (res.rep.aborted) {
    std::cerr << "solver abort: " << res.rep.abort_reason << "\n";
    return 3;
  }
  emit(st.output_path, fdswipt::solve_to_json(res).dump(2) + "\n");
  return 0;
}

int run_oracle(CliState& st) {
  st.cfg.validate();
  const auto ch = fdswipt::generate_channels(st.cfg, st.run.seed);
  const auto eff = fdswipt::decompose(ch);
  const auto res = fdswipt::oracle_solve(eff, st.cfg, st.run.scheme);
  if (!res.ok) {
    std::cerr << "oracle refused: scheme unsupported or system too large\n";
    return 2;
  }
  emit(st.output_path, fdswipt::solution_to_json(res.sol).dump(2) + "\n");
  return 0;
}

int run_sweep(CliState& st) {
  st.cfg.validate();
  if (st.run.sweep_values.empty())
    throw fdswipt::ConfigError(0, "sweep requires sweep_values");
  if (st.run.sweep_schemes.empty())
    throw fdswipt::ConfigError(0, "sweep requires sweep_schemes");
  if (st.output_path.empty())
    throw fdswipt::ConfigError(0, "sweep requires --output");

  fdswipt::SweepSpec spec;
  spec.axis = st.run.sweep_axis;
  spec.values = st.run.sweep_values;
  spec.schemes = st.run.sweep_schemes;
  spec.realizations = st.run.realizations;
  spec.base_seed = st.run.seed;
  spec.threads = st.run.threads;

  const auto result = fdswipt::run_sweep(st.cfg, spec);
  for (const auto& rec : result.raw) {
    if (rec.aborted) {
      std::cerr << "solver abort during sweep (seed " << rec.seed << ")\n";
      return 3;
    }
  }

  std::ostringstream raw_os;
  fdswipt::write_raw_csv(raw_os, result.raw);
  emit(st.output_path, raw_os.str());

  std::ostringstream agg_os;
  fdswipt::write_agg_csv(agg_os, result.agg);
  emit(agg_path(st.output_path), agg_os.str());
  return 0;
}

int run_convergence(CliState& st) {
  st.cfg.validate();
  const auto ch = fdswipt::generate_channels(st.cfg, st.run.seed);
  const auto eff = fdswipt::decompose(ch);
  fdswipt::SolveOptions opt;
  opt.record_trace = true;
  const auto res = fdswipt::solve(eff, st.cfg, st.run.scheme, opt);
  if (res.rep.aborted) {
    std::cerr << "solver abort: " << res.rep.abort_reason << "\n";
    return 3;
  }
  std::ostringstream os;
  fdswipt::write_trace_csv(os, res.rep.trace);
  emit(st.output_path, os.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint power allocation and power splitting for a self-powered "
               "full-duplex relay link"};
  app.require_subcommand(1);

  CliState st;
  st.run.threads = thread_default();

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", st.config_path, "key=value configuration file");
    sub->add_option("--scheme", st.scheme_flag, "scheme name");
    sub->add_option("--seed", st.seed_flag, "channel seed");
    sub->add_option("--output", st.output_path, "output file (default stdout)");
    sub->add_option("--realizations", st.realizations_flag, "Monte Carlo draws");
    sub->add_option("--threads", st.threads_flag, "worker threads");
  };

  CLI::App* solve = app.add_subcommand("solve", "solve one channel realization");
  CLI::App* sweep = app.add_subcommand("sweep", "Monte Carlo sweep over one axis");
  CLI::App* oracle = app.add_subcommand("oracle", "grid reference solve");
  CLI::App* conv = app.add_subcommand("convergence", "dual convergence trace");
  for (CLI::App* sub : {solve, sweep, oracle, conv}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  CLI::App* sub = app.get_subcommands().front();
  try {
    load_config(st);
    apply_flag_overrides(st, sub);
    if (sub == solve) return run_solve(st);
    if (sub == sweep) return run_sweep(st);
    if (sub == oracle) return run_oracle(st);
    return run_convergence(st);
  } catch (const fdswipt::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
