#pragma once

#include <span>
#include <vector>

namespace dbsplace {

/// Spectral efficiency log2(1 + snr) in bit/s/Hz. Rates are bit/s throughout
/// the public API (base-2 applied uniformly).
double cap_bits(double snr);

struct LinkBudget {
  double bandwidth_hz = 0.0;
  double power_w = 0.0;
  double gain = 0.0;       // linear |.|^2
  double noise_psd = 0.0;  // W/Hz
};

/// b * cap(gain * p / (b * N0)); defined as 0 at b = 0 by continuity.
double direct_rate_bps(const LinkBudget& budget);

/// Per-terminal rate breakdown under the cooperative multi-DBS DF protocol.
struct RateReport {
  double direct_bps = 0.0;
  std::vector<double> relay_bps;          // tau_kj * b * cap(g2_kj p / (b N0))
  double total_bps = 0.0;                 // direct + sum of relay parts
  std::vector<double> backhaul_caps_bps;  // b_k0 * cap(h2_j p_k0 / (b_k0 N0))
};

/// Cooperative DF rate for one terminal. tau values must lie in [0,1];
/// backhaul_caps is filled only when h2 is non-empty.
RateReport df_rate(double b_k0, double p_k0, double a2_k, std::span<const double> g2_k,
                   std::span<const double> tau_k, double dbs_bandwidth_hz,
                   double dbs_power_w, double noise_psd, std::span<const double> h2 = {});

/// Decodability of terminal k's message at every DBS that relays it: for each
/// j with tau_k[j] > tol, requires r_k <= backhaul cap + tol * target_rate.
bool backhaul_ok(double rate_bps, double b_k0, double p_k0, std::span<const double> h2,
                 std::span<const double> tau_k, double noise_psd, double target_rate_bps,
                 double tol = 1e-6);

}  // namespace dbsplace
