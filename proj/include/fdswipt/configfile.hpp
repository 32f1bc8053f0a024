#pragma once

// Flat key=value run configuration. '#' starts a comment, blank lines are
// skipped, unknown keys are hard errors carrying the offending line number.

#include <cstdint>
#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fdswipt/experiments.hpp"

namespace fdswipt {

struct ConfigError : std::runtime_error {
  int line;
  ConfigError(int line_, const std::string& msg)
      : std::runtime_error("config line " + std::to_string(line_) + ": " + msg),
        line(line_) {}
};

struct ConfigEntry {
  std::string key;
  std::string value;
  int line = 0;
};

namespace detail {

inline std::string strip(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_double(const ConfigEntry& e) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(e.value, &pos);
  } catch (const std::exception&) {
    throw ConfigError(e.line, "expected a number for '" + e.key + "'");
  }
  if (pos != e.value.size())
    throw ConfigError(e.line, "trailing characters in value for '" + e.key + "'");
  return v;
}

inline long long parse_int(const ConfigEntry& e) {
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(e.value, &pos);
  } catch (const std::exception&) {
    throw ConfigError(e.line, "expected an integer for '" + e.key + "'");
  }
  if (pos != e.value.size())
    throw ConfigError(e.line, "trailing characters in value for '" + e.key + "'");
  return v;
}

inline bool parse_bool(const ConfigEntry& e) {
  if (e.value == "1" || e.value == "true" || e.value == "on" || e.value == "yes")
    return true;
  if (e.value == "0" || e.value == "false" || e.value == "off" || e.value == "no")
    return false;
  throw ConfigError(e.line, "expected a boolean for '" + e.key + "'");
}

inline std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (start <= s.size()) {
    const std::size_t comma = s.find(',', start);
    const std::size_t end = (comma == std::string::npos) ? s.size() : comma;
    parts.push_back(strip(s.substr(start, end - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return parts;
}

}  // namespace detail

inline std::vector<ConfigEntry> parse_kv_stream(std::istream& in) {
  std::vector<ConfigEntry> entries;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const std::string body = detail::strip(line);
    if (body.empty()) continue;
    const std::size_t eq = body.find('=');
    if (eq == std::string::npos)
      throw ConfigError(lineno, "expected key=value");
    ConfigEntry e;
    e.key = detail::strip(body.substr(0, eq));
    e.value = detail::strip(body.substr(eq + 1));
    e.line = lineno;
    if (e.key.empty()) throw ConfigError(lineno, "empty key");
    entries.push_back(e);
  }
  return entries;
}

// What to run, as opposed to the physics in SystemConfig.
struct RunSettings {
  Scheme scheme = Scheme::FdNonuniform;
  std::uint64_t seed = 1;
  int realizations = 100;
  int threads = 1;
  SweepAxis sweep_axis = SweepAxis::PsDbm;
  std::vector<double> sweep_values;
  std::vector<Scheme> sweep_schemes;
};

inline void apply_entry(SystemConfig& cfg, RunSettings& run, const ConfigEntry& e) {
  using detail::parse_bool;
  using detail::parse_double;
  using detail::parse_int;

  if (e.key == "ns") {
    cfg.ns = int(parse_int(e));
  } else if (e.key == "nr") {
    cfg.nr = int(parse_int(e));
  } else if (e.key == "nd") {
    cfg.nd = int(parse_int(e));
  } else if (e.key == "ps_dbm") {
    cfg.ps_watts = dbm_to_watts(parse_double(e));
  } else if (e.key == "noise_relay_dbm") {
    cfg.sigma_p2 = dbm_to_watts(parse_double(e));
  } else if (e.key == "noise_dest_dbm") {
    cfg.sigma_d2 = dbm_to_watts(parse_double(e));
  } else if (e.key == "rsi_snr_loss_db") {
    cfg.rsi_snr_loss_db = parse_double(e);
  } else if (e.key == "d_sr") {
    cfg.d_sr = parse_double(e);
  } else if (e.key == "d_sd") {
    cfg.d_sd = parse_double(e);
  } else if (e.key == "gamma") {
    cfg.gamma = parse_double(e);
  } else if (e.key == "k_factor_db") {
    cfg.rician_k_db = parse_double(e);
  } else if (e.key == "omega_db") {
    cfg.omega_db = parse_double(e);
  } else if (e.key == "p_ic_mw") {
    cfg.p_ic_watts = parse_double(e) * 1e-3;
  } else if (e.key == "eh_sensitivity_dbm") {
    cfg.eh_sensitivity_watts = dbm_to_watts(parse_double(e));
  } else if (e.key == "eta") {
    cfg.eta = parse_double(e);
  } else if (e.key == "cancellation_mode") {
    if (e.value == "active") {
      cfg.cancellation_mode = CancellationMode::Active;
    } else if (e.value == "passive") {
      cfg.cancellation_mode = CancellationMode::Passive;
    } else if (e.value == "hybrid") {
      cfg.cancellation_mode = CancellationMode::Hybrid;
    } else {
      throw ConfigError(e.line, "unknown cancellation_mode '" + e.value + "'");
    }
  } else if (e.key == "si_harvest") {
    cfg.si_harvest = parse_bool(e);
  } else if (e.key == "rsi_mode") {
    if (e.value == "constant") {
      cfg.rsi_mode = RsiMode::Constant;
    } else if (e.value == "proportional") {
      cfg.rsi_mode = RsiMode::Proportional;
    } else {
      throw ConfigError(e.line, "unknown rsi_mode '" + e.value + "'");
    }
  } else if (e.key == "rsi_alpha") {
    cfg.rsi_alpha = parse_double(e);
  } else if (e.key == "rsi_beta") {
    cfg.rsi_beta = parse_double(e);
  } else if (e.key == "epsilon_boundary") {
    cfg.epsilon_boundary = parse_double(e);
  } else if (e.key == "epsilon_precision") {
    cfg.epsilon_precision = parse_double(e);
  } else if (e.key == "max_iterations") {
    cfg.max_iterations = int(parse_int(e));
  } else if (e.key == "scheme") {
    if (!scheme_from_string(e.value, run.scheme))
      throw ConfigError(e.line, "unknown scheme '" + e.value + "'");
  } else if (e.key == "seed") {
    run.seed = std::uint64_t(parse_int(e));
  } else if (e.key == "realizations") {
    run.realizations = int(parse_int(e));
  } else if (e.key == "threads") {
    run.threads = int(parse_int(e));
  } else if (e.key == "sweep_axis") {
    if (!sweep_axis_from_string(e.value, run.sweep_axis))
      throw ConfigError(e.line, "unknown sweep_axis '" + e.value + "'");
  } else if (e.key == "sweep_values") {
    run.sweep_values.clear();
    for (const auto& part : detail::split_csv(e.value)) {
      ConfigEntry pe{e.key, part, e.line};
      run.sweep_values.push_back(parse_double(pe));
    }
  } else if (e.key == "sweep_schemes") {
    run.sweep_schemes.clear();
    for (const auto& part : detail::split_csv(e.value)) {
      Scheme s;
      if (!scheme_from_string(part, s))
        throw ConfigError(e.line, "unknown scheme '" + part + "'");
      run.sweep_schemes.push_back(s);
    }
  } else {
    throw ConfigError(e.line, "unknown key '" + e.key + "'");
  }
}

inline void apply_config_stream(std::istream& in, SystemConfig& cfg, RunSettings& run) {
  for (const ConfigEntry& e : parse_kv_stream(in)) apply_entry(cfg, run, e);
}

}  // namespace fdswipt
