#include "dbsplace/rates.hpp"

#include <cmath>

namespace dbsplace {

double cap_bits(double snr) { return std::log2(1.0 + snr); }

double direct_rate_bps(const LinkBudget& budget) {
  if (budget.bandwidth_hz <= 0.0 || budget.power_w <= 0.0 || budget.gain <= 0.0) return 0.0;
  const double snr = budget.gain * budget.power_w / (budget.bandwidth_hz * budget.noise_psd);
  return budget.bandwidth_hz * cap_bits(snr);
}

RateReport df_rate(double b_k0, double p_k0, double a2_k, std::span<const double> g2_k,
                   std::span<const double> tau_k, double dbs_bandwidth_hz,
                   double dbs_power_w, double noise_psd, std::span<const double> h2) {
  RateReport report;
  report.direct_bps = direct_rate_bps({b_k0, p_k0, a2_k, noise_psd});
  report.relay_bps.reserve(tau_k.size());
  double relay_total = 0.0;
  for (std::size_t j = 0; j < tau_k.size(); ++j) {
    const double full_time =
        direct_rate_bps({dbs_bandwidth_hz, dbs_power_w, g2_k[j], noise_psd});
    report.relay_bps.push_back(tau_k[j] * full_time);
    relay_total += tau_k[j] * full_time;
  }
  report.total_bps = report.direct_bps + relay_total;
  report.backhaul_caps_bps.reserve(h2.size());
  for (double h2_j : h2) {
    report.backhaul_caps_bps.push_back(direct_rate_bps({b_k0, p_k0, h2_j, noise_psd}));
  }
  return report;
}

bool backhaul_ok(double rate_bps, double b_k0, double p_k0, std::span<const double> h2,
                 std::span<const double> tau_k, double noise_psd, double target_rate_bps,
                 double tol) {
  for (std::size_t j = 0; j < tau_k.size(); ++j) {
    if (tau_k[j] <= tol) continue;
    const double cap = direct_rate_bps({b_k0, p_k0, h2[j], noise_psd});
    if (rate_bps > cap + tol * target_rate_bps) return false;
  }
  return true;
}

}  // namespace dbsplace
