#pragma once

#include <span>
#include <vector>

#include "dbsplace/channel.hpp"
#include "dbsplace/scenario.hpp"

namespace dbsplace {

/// Feasible point of the resource-allocation problem for fixed DBS positions.
/// Invariants on every solver return, converged or not:
///   sum_k bandwidth <= B0, sum_k power <= P0, sum_k tau[k][j] <= S_D[j],
///   0 <= rate_bps[k] <= target + eps, and every relayed terminal decodable at
///   its DBSs (backhaul_ok), with eps = 1e-6 relative.
struct ResourceAllocation {
  std::vector<double> bandwidth_hz;       // b_k0
  std::vector<double> power_w;            // p_k0
  std::vector<std::vector<double>> tau;   // tau[k][j]
  std::vector<double> rate_bps;           // r_k
};

/// Lagrange multipliers of the dual ascent. Stationarity is written with the
/// natural-log capacity, so lambda and theta carry nat/s-based units; nu and
/// rho are dimensionless.
struct DualState {
  double lambda = 0.0;                  // total bandwidth
  double mu = 0.0;                      // total power
  std::vector<std::vector<double>> nu;  // backhaul, per (k, j)
  std::vector<double> rho;              // rate cap, per terminal
  std::vector<double> theta;            // airtime column sums, per DBS
};

struct SolverReport {
  double objective_bps = 0.0;  // sum_k (r_T - r_k), nonnegative
  int iterations = 0;
  double max_kkt_residual = 0.0;
  double duality_gap_estimate_bps = 0.0;  // multiplier-weighted slack total
  bool converged = false;
};

struct RapSolution {
  ResourceAllocation allocation;
  SolverReport report;
  DualState duals;
};

/// Solve the inner resource-allocation problem by Lagrangian dual ascent:
/// per-terminal bandwidth/power ratios from the stationarity system, time
/// fractions from the closed-form multiplier expression with its [.]+ clamp,
/// projected-gradient multiplier updates with per-constraint-scaled steps, and
/// a final feasibility projection (bandwidth, power, tau columns, rate cap, in
/// that order). An active-set Newton polish tightens the KKT point when the
/// converged structure is regular. Throws SolverError when B0, P0 or all
/// gains are zero; non-convergence returns the best feasible point found with
/// converged = false.
RapSolution solve_rap(const Scenario& scenario, const ChannelGains& gains,
                      std::span<const double> airtime_shares);

struct OracleResult {
  ResourceAllocation allocation;
  double objective_bps = 0.0;
};

/// Exhaustive grid oracle used to cross-check solve_rap on small instances
/// (K <= 3, N <= 2). The grid has grid_res+1 values per axis; grid_res == 1
/// degenerates to the single equal-split point. Candidates exceeding the rate
/// cap are scaled down the ray to meet it exactly; candidates violating a
/// backhaul constraint are discarded. Grids nest under integer refinement.
/// Throws SolverError when the instance is too large.
OracleResult brute_force_rap(const Scenario& scenario, const ChannelGains& gains,
                             std::span<const double> airtime_shares, int grid_res);

/// Normalized KKT diagnostics at an allocation/multiplier pair, plus the raw
/// complementary-slackness products (multiplier x constraint slack).
struct KktResiduals {
  double stationarity_bandwidth = 0.0;  // eq for b, per served terminal
  double stationarity_power = 0.0;      // eq for p
  double stationarity_tau = 0.0;        // eq for tau, per active pair
  double complementarity = 0.0;         // normalized by r_T
  double raw_lambda_slack = 0.0;        // lambda * (sum b - B0)
  double raw_mu_slack = 0.0;            // mu * (sum p - P0)
  double raw_stationarity_bandwidth = 0.0;  // un-normalized, nat/s/Hz
  double raw_stationarity_power = 0.0;      // un-normalized, nat/s/W

  double max() const {
    double m = stationarity_bandwidth;
    if (stationarity_power > m) m = stationarity_power;
    if (stationarity_tau > m) m = stationarity_tau;
    if (complementarity > m) m = complementarity;
    return m;
  }
};

KktResiduals kkt_residuals(const ResourceAllocation& alloc, const DualState& duals,
                           const ChannelGains& gains, const Scenario& scenario,
                           std::span<const double> airtime_shares);

/// PSO particle cost: optimum objective of the resource allocation at the
/// given DBS positions. Deterministic given inputs.
double rap_cost_bps(std::span<const Vec3> dbs_pos, const Scenario& scenario,
                    std::span<const Vec3> terminal_pos,
                    std::span<const double> airtime_shares);

}  // namespace dbsplace
