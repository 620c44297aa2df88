#include "dbsplace/coexistence.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dbsplace/errors.hpp"

namespace dbsplace {

namespace {

constexpr double kResidualTarget = 1e-12;
constexpr double kResidualAccept = 1e-10;
constexpr int kMaxIterations = 20000;

void check_params(const WifiParams& p) {
  std::ostringstream bad;
  if (p.omega < 2) bad << "omega must be >= 2; ";
  if (p.max_stage < 0) bad << "max_stage must be >= 0; ";
  if (p.num_aps < 1) bad << "num_aps must be >= 1; ";
  if (p.cw_dbs < 1) bad << "cw_dbs must be >= 1; ";
  if (!bad.str().empty()) throw SolverError("invalid coexistence parameters: " + bad.str());
}

}  // namespace

double wifi_access_probability(double c_w, int omega, int max_stage) {
  const double w = static_cast<double>(omega);
  const double one_minus_2c = 1.0 - 2.0 * c_w;
  // Both numerator and denominator vanish at c_w = 1/2; switch to the limit
  // value 4 / (2(omega+1) + m*omega) inside a small window.
  if (std::abs(one_minus_2c) < 1e-9) {
    return 4.0 / (2.0 * (w + 1.0) + static_cast<double>(max_stage) * w);
  }
  const double denom =
      one_minus_2c * (w + 1.0) + c_w * w * (1.0 - std::pow(2.0 * c_w, max_stage));
  return 2.0 * one_minus_2c / denom;
}

double dbs_access_probability(double c_d, int gamma) {
  const double g = static_cast<double>(gamma);
  if (c_d < 1e-9) return 2.0 / (g + 1.0);
  // sum_{i=1..gamma} (1-c)^(i-1) = (1 - (1-c)^gamma) / c
  const double geom = (1.0 - std::pow(1.0 - c_d, gamma)) / c_d;
  return (c_d * geom / g) / (1.0 - (1.0 - c_d) * geom / g);
}

std::array<double, 4> coexistence_residuals(const WifiParams& params, double delta_w,
                                            double delta_d, double c_w, double c_d) {
  return {
      delta_w - wifi_access_probability(c_w, params.omega, params.max_stage),
      delta_d - dbs_access_probability(c_d, params.cw_dbs),
      c_w - (1.0 - std::pow(1.0 - delta_w, params.num_aps - 1) * (1.0 - delta_d)),
      c_d - (1.0 - std::pow(1.0 - delta_w, params.num_aps)),
  };
}

namespace {

double max_residual(const WifiParams& params, double dw, double dd, double cw, double cd) {
  const auto r = coexistence_residuals(params, dw, dd, cw, cd);
  double m = 0.0;
  for (double v : r) m = std::max(m, std::abs(v));
  return m;
}

CoexistenceSolution assemble(const WifiParams& params, double dw, double dd, int iterations) {
  CoexistenceSolution s;
  s.delta_w = dw;
  s.delta_d = dd;
  s.c_w = 1.0 - std::pow(1.0 - dw, params.num_aps - 1) * (1.0 - dd);
  s.c_d = 1.0 - std::pow(1.0 - dw, params.num_aps);
  s.airtime = dd * std::pow(1.0 - dw, params.num_aps);
  s.iterations = iterations;
  s.max_residual = max_residual(params, s.delta_w, s.delta_d, s.c_w, s.c_d);
  return s;
}

// Reduce the system to the single unknown delta_w by substitution and bisect
// on F(delta_w) = delta_w - f(delta_w). F(0) < 0 and F(1) > 0.
CoexistenceSolution solve_by_bisection(const WifiParams& params, int iterations_so_far) {
  auto substituted = [&](double dw) {
    const double cd = 1.0 - std::pow(1.0 - dw, params.num_aps);
    const double dd = dbs_access_probability(cd, params.cw_dbs);
    const double cw = 1.0 - std::pow(1.0 - dw, params.num_aps - 1) * (1.0 - dd);
    return wifi_access_probability(cw, params.omega, params.max_stage);
  };
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid - substituted(mid) < 0.0) lo = mid; else hi = mid;
  }
  const double dw = 0.5 * (lo + hi);
  return assemble(params, dw, dbs_access_probability(
                              1.0 - std::pow(1.0 - dw, params.num_aps), params.cw_dbs),
                  iterations_so_far + 200);
}

}  // namespace

CoexistenceSolution solve_fixed_point(const WifiParams& params) {
  check_params(params);
  double dw = 2.0 / (params.omega + 1.0);
  double dd = 2.0 / (params.cw_dbs + 1.0);
  int iter = 0;
  for (; iter < kMaxIterations; ++iter) {
    const double cw = 1.0 - std::pow(1.0 - dw, params.num_aps - 1) * (1.0 - dd);
    const double cd = 1.0 - std::pow(1.0 - dw, params.num_aps);
    const double next_dw = wifi_access_probability(cw, params.omega, params.max_stage);
    const double next_dd = dbs_access_probability(cd, params.cw_dbs);
    const double new_dw = 0.5 * dw + 0.5 * next_dw;
    const double new_dd = 0.5 * dd + 0.5 * next_dd;
    const double movement = std::abs(new_dw - dw) + std::abs(new_dd - dd);
    dw = new_dw;
    dd = new_dd;
    if (movement < kResidualTarget) break;
  }
  CoexistenceSolution s = assemble(params, dw, dd, iter);
  if (s.max_residual >= kResidualAccept) {
    s = solve_by_bisection(params, iter);
  }
  if (s.max_residual >= kResidualAccept) {
    std::ostringstream msg;
    msg << "coexistence fixed point did not converge; best residual " << s.max_residual;
    throw SolverError(msg.str());
  }
  return s;
}

double airtime(const CoexistenceSolution& solution) { return solution.airtime; }

int optimize_cw(int omega, int max_stage, int num_aps, double collision_cap, int gamma_max) {
  auto c_w_at = [&](int gamma) {
    WifiParams p;
    p.omega = omega;
    p.max_stage = max_stage;
    p.num_aps = num_aps;
    p.cw_dbs = gamma;
    return solve_fixed_point(p).c_w;
  };
  if (c_w_at(gamma_max) > collision_cap) {
    std::ostringstream msg;
    msg << "collision cap " << collision_cap << " infeasible even at gamma = " << gamma_max;
    throw SolverError(msg.str());
  }
  // c_w is nonincreasing in gamma: binary search for the first satisfying value.
  int lo = 1, hi = gamma_max;
  while (lo < hi) {
    const int mid = lo + (hi - lo) / 2;
    if (c_w_at(mid) <= collision_cap) hi = mid; else lo = mid + 1;
  }
  return lo;
}

}  // namespace dbsplace
