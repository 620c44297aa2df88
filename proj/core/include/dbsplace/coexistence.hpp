#pragma once

#include <array>

namespace dbsplace {

/// One unlicensed band: a listen-before-talk DBS with a fixed contention
/// window of cw_dbs slots competing against num_aps saturated Wi-Fi APs.
struct WifiParams {
  int omega = 16;            // min CW size of the Wi-Fi APs, >= 2
  int max_stage = 3;         // m, >= 0
  int num_aps = 10;          // M, >= 1
  int cw_dbs = 16;           // Gamma, >= 1
  double collision_cap = 0.5;  // C in (0,1); used by optimize_cw only
};

/// Simultaneous solution of the four access/collision equations, plus the
/// resulting DBS airtime share S_D = delta_d * (1 - delta_w)^M.
struct CoexistenceSolution {
  double delta_w = 0.0;
  double delta_d = 0.0;
  double c_w = 0.0;
  double c_d = 0.0;
  double airtime = 0.0;
  int iterations = 0;
  double max_residual = 0.0;
};

/// Wi-Fi access probability as a function of its collision probability.
///
/// The printed form of this relation drops an addition in the denominator and
/// diverges as c_w -> 0; we use the standard DCF saturation expression
///   delta_w = 2(1-2c) / ((1-2c)(omega+1) + c*omega*(1-(2c)^m)),
/// which stays in (0,1] and reduces to 2/(omega+1) at c = 0.
double wifi_access_probability(double c_w, int omega, int max_stage);

/// DBS access probability for a fixed contention window of gamma slots; the
/// geometric sums are evaluated in closed form with the c -> 0 limit handled.
double dbs_access_probability(double c_d, int gamma);

/// Residuals of the four coexistence equations at the given point, in order
/// (delta_w, delta_d, c_w, c_d).
std::array<double, 4> coexistence_residuals(const WifiParams& params, double delta_w,
                                            double delta_d, double c_w, double c_d);

/// Solve the four-unknown fixed point by damped iteration (damping 0.5) from
/// delta_w = 2/(omega+1), delta_d = 2/(gamma+1), with a bisection reduction as
/// fallback. Throws SolverError when the residual cannot be brought below
/// 1e-10, reporting the best residual reached.
CoexistenceSolution solve_fixed_point(const WifiParams& params);

double airtime(const CoexistenceSolution& solution);

/// Smallest integer gamma in [1, gamma_max] with c_w(gamma) <= collision_cap,
/// using the monotonicity of c_w in gamma. Throws SolverError when even
/// gamma_max violates the cap.
int optimize_cw(int omega, int max_stage, int num_aps, double collision_cap,
                int gamma_max = 1024);

}  // namespace dbsplace
