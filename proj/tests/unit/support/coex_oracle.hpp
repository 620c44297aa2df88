#pragma once

// Test-side oracle for the unlicensed-band fixed point, written independently
// of the library solver: the four equations are reduced to the single unknown
// delta_w by substitution and bisected. Kept deliberately separate from
// dbsplace/coexistence.hpp so the two paths share no code.

#include <cmath>

namespace coex_oracle {

struct Point {
  double delta_w = 0.0;
  double delta_d = 0.0;
  double c_w = 0.0;
  double c_d = 0.0;
  double airtime = 0.0;
};

inline double wifi_access(double c, int omega, int m) {
  const double w = omega;
  if (std::abs(1.0 - 2.0 * c) < 1e-9) return 4.0 / (2.0 * (w + 1.0) + m * w);
  return 2.0 * (1.0 - 2.0 * c) /
         ((1.0 - 2.0 * c) * (w + 1.0) + c * w * (1.0 - std::pow(2.0 * c, m)));
}

inline double dbs_access(double c, int gamma) {
  if (c < 1e-9) return 2.0 / (gamma + 1.0);
  double geom = 0.0;  // sum_{i=1..gamma} (1-c)^(i-1), evaluated term by term
  double term = 1.0;
  for (int i = 0; i < gamma; ++i) {
    geom += term;
    term *= 1.0 - c;
  }
  return (c * geom / gamma) / (1.0 - (1.0 - c) * geom / gamma);
}

inline Point solve(int omega, int m, int num_aps, int gamma) {
  auto image = [&](double dw) {
    const double cd = 1.0 - std::pow(1.0 - dw, num_aps);
    const double dd = dbs_access(cd, gamma);
    const double cw = 1.0 - std::pow(1.0 - dw, num_aps - 1) * (1.0 - dd);
    return wifi_access(cw, omega, m);
  };
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid - image(mid) < 0.0) lo = mid; else hi = mid;
  }
  Point p;
  p.delta_w = 0.5 * (lo + hi);
  p.c_d = 1.0 - std::pow(1.0 - p.delta_w, num_aps);
  p.delta_d = dbs_access(p.c_d, gamma);
  p.c_w = 1.0 - std::pow(1.0 - p.delta_w, num_aps - 1) * (1.0 - p.delta_d);
  p.airtime = p.delta_d * std::pow(1.0 - p.delta_w, num_aps);
  return p;
}

/// Smallest gamma in [1, hi] whose Wi-Fi collision probability meets the cap,
/// by linear sweep (no monotonicity assumption).
inline int sweep_min_gamma(int omega, int m, int num_aps, double cap, int hi) {
  for (int g = 1; g <= hi; ++g) {
    if (solve(omega, m, num_aps, g).c_w <= cap) return g;
  }
  return -1;
}

}  // namespace coex_oracle
