#pragma once

// Small numeric helpers shared across the library: unit conversions,
// one-dimensional root finding and maximization, float-to-text formatting.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <string>
#include <system_error>

namespace fdswipt {

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

inline double dbm_to_watts(double dbm) { return std::pow(10.0, dbm / 10.0) * 1e-3; }

inline double watts_to_dbm(double w) { return 10.0 * std::log10(w * 1e3); }

inline double positive_part(double x) { return x > 0.0 ? x : 0.0; }

constexpr double kLn2 = 0.6931471805599453;

inline double nats_to_bits(double nats) { return nats / kLn2; }

// Shortest round-trip decimal text for a double. Keeps CSV/JSON output
// byte-stable across runs and platforms with the same libc++.
inline std::string format_double(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// Solves f(x) = target on [lo, hi] for nondecreasing f by bisection.
// Caller must ensure f(lo) <= target <= f(hi).
template <typename F>
double bisect_increasing(F&& f, double lo, double hi, double target, double xtol,
                         int max_iter = 200) {
  for (int it = 0; it < max_iter && (hi - lo) > xtol; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Golden-section search for the maximum of a unimodal f on [lo, hi].
template <typename F>
double golden_section_max(F&& f, double lo, double hi, double xtol, int max_iter = 300) {
  constexpr double invphi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < max_iter && (b - a) > xtol; ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = f(x1);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace fdswipt
