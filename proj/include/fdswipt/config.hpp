#pragma once

// System model parameters. All powers are stored in linear units (watts);
// helpers derive them from dBm/dB inputs at the configuration boundary.

#include <stdexcept>
#include <string>

#include "fdswipt/common.hpp"

namespace fdswipt {

// How the relay suppresses its own transmit signal on the receive side.
// Active cancellation burns a fixed circuit power and leaves a small
// constant residual; passive isolation is free but the residual scales
// with relay transmit power. Hybrid picks the better of the two per
// channel realization.
enum class CancellationMode { Active, Passive, Hybrid };

// Residual self-interference model used on the passive path.
enum class RsiMode { Constant, Proportional };

enum class Scheme {
  FdNonuniform,   // per-antenna power splitting, full CSI
  FdUniform,      // one shared splitting ratio, full CSI
  FdNoSiHarvest,  // loopback energy discarded by the harvester
  FdCsir,         // receive-side CSI only: isotropic covariances
  FdPassive,      // passive cancellation regardless of configured mode
  FdHybrid,       // max of active and passive solves
  HalfDuplex,     // two-slot relaying baseline, no loopback at all
};

inline const char* scheme_name(Scheme s) {
  switch (s) {
    case Scheme::FdNonuniform: return "fd_nonuniform";
    case Scheme::FdUniform: return "fd_uniform";
    case Scheme::FdNoSiHarvest: return "fd_no_si_harvest";
    case Scheme::FdCsir: return "fd_csir";
    case Scheme::FdPassive: return "fd_passive";
    case Scheme::FdHybrid: return "fd_hybrid";
    case Scheme::HalfDuplex: return "half_duplex";
  }
  return "unknown";
}

inline bool scheme_from_string(const std::string& name, Scheme& out) {
  const Scheme all[] = {Scheme::FdNonuniform, Scheme::FdUniform, Scheme::FdNoSiHarvest,
                        Scheme::FdCsir,       Scheme::FdPassive, Scheme::FdHybrid,
                        Scheme::HalfDuplex};
  for (Scheme s : all) {
    if (name == scheme_name(s)) {
      out = s;
      return true;
    }
  }
  // short aliases without the duplex prefix
  if (name == "nonuniform") return scheme_from_string("fd_nonuniform", out);
  if (name == "uniform") return scheme_from_string("fd_uniform", out);
  if (name == "no_si_harvest") return scheme_from_string("fd_no_si_harvest", out);
  if (name == "csir") return scheme_from_string("fd_csir", out);
  if (name == "passive") return scheme_from_string("fd_passive", out);
  if (name == "hybrid") return scheme_from_string("fd_hybrid", out);
  return false;
}

struct SystemConfig {
  int ns = 2;  // source antennas
  int nr = 2;  // relay antennas (each side of the full-duplex pair)
  int nd = 2;  // destination antennas

  double ps_watts = dbm_to_watts(35.0);
  double sigma_p2 = dbm_to_watts(-100.0);  // relay processing noise
  double sigma_d2 = dbm_to_watts(-100.0);  // destination noise

  // Residual self-interference after active cancellation, expressed as the
  // SNR loss it causes at the relay: sigma_f2 = sigma_p2 * (10^(loss/10) - 1).
  double rsi_snr_loss_db = 1.0;

  double d_sr = 2.0;   // source-relay distance, meters
  double d_sd = 10.0;  // source-destination distance; relay sits on the line
  double gamma = 3.2;  // path loss exponent

  double rician_k_db = 30.0;  // loopback channel K-factor
  double omega_db = -20.0;    // loopback channel power after isolation

  double p_ic_watts = 13e-3;  // active cancellation circuit power
  double eh_sensitivity_watts = dbm_to_watts(-40.0);
  double eta = 1.0;  // harvester efficiency

  CancellationMode cancellation_mode = CancellationMode::Active;
  bool si_harvest = true;  // recycle loopback power into the harvester

  RsiMode rsi_mode = RsiMode::Constant;
  double rsi_alpha = 1e-4;  // passive residual: alpha * Pr^beta (watts)
  double rsi_beta = 1.0;

  double epsilon_boundary = 1e-3;   // splitting ratios live in [eps, 1-eps]
  double epsilon_precision = 1e-5;  // dual convergence threshold
  int max_iterations = 5000;

  double d_rd() const { return d_sd - d_sr; }

  double sigma_f2_active() const {
    return sigma_p2 * (db_to_linear(rsi_snr_loss_db) - 1.0);
  }

  void validate() const {
    auto fail = [](const std::string& msg) { throw std::invalid_argument(msg); };
    if (ns < 1 || nr < 1 || nd < 1) fail("antenna counts must be positive");
    if (ps_watts <= 0.0) fail("source power must be positive");
    if (sigma_p2 <= 0.0 || sigma_d2 <= 0.0) fail("noise powers must be positive");
    if (rsi_snr_loss_db < 0.0) fail("rsi_snr_loss_db must be nonnegative");
    if (d_sr <= 0.0 || d_sd <= d_sr) fail("need 0 < d_sr < d_sd");
    if (gamma <= 0.0) fail("path loss exponent must be positive");
    if (p_ic_watts < 0.0) fail("cancellation power must be nonnegative");
    if (eh_sensitivity_watts < 0.0) fail("harvester sensitivity must be nonnegative");
    if (eta <= 0.0 || eta > 1.0) fail("harvester efficiency must be in (0, 1]");
    if (rsi_alpha < 0.0 || rsi_beta <= 0.0) fail("bad passive residual parameters");
    if (epsilon_boundary <= 0.0 || epsilon_boundary >= 0.5)
      fail("epsilon_boundary must be in (0, 0.5)");
    if (epsilon_precision <= 0.0) fail("epsilon_precision must be positive");
    if (max_iterations < 1) fail("max_iterations must be positive");
  }
};

}  // namespace fdswipt
