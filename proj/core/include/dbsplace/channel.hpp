#pragma once

#include <span>
#include <vector>

#include "dbsplace/geometry.hpp"
#include "dbsplace/scenario.hpp"

namespace dbsplace {

inline constexpr double kSpeedOfLightMps = 2.998e8;

/// Modified Hata urban path loss for MBS-terminal ground links:
/// 122 + 38*log10(d_km), clamped below 0.05 km to its 0.05 km value.
double hata_path_loss_db(double distance_km);

/// Probability of a line-of-sight air-to-ground link. The elevation angle is
/// arctan(altitude / horizontal); a zero horizontal distance counts as 90 deg.
double los_probability(double altitude_km, double horizontal_km, const EnvParams& env);

/// LoS/NLoS-averaged excess loss (dB) added on top of free space.
double atg_excess_loss_db(double p_los, const EnvParams& env);

/// Air-to-ground path loss: free-space term over the 3D distance in meters
/// plus the LoS-probability-weighted excess. Throws SolverError when the two
/// positions coincide.
double atg_path_loss_db(const Vec3& ground_km, const Vec3& dbs_km, double carrier_hz,
                        const EnvParams& env);

/// Linear power gains of every link for one DBS placement.
///   a2[k]    |a_{k,0}|^2  MBS -> terminal k   (modified Hata, licensed band)
///   h2[j]    |h_{j,0}|^2  MBS -> DBS j        (air-to-ground, licensed band)
///   g2[k][j] |g_{k,j}|^2  DBS j -> terminal k (air-to-ground, unlicensed band)
struct ChannelGains {
  std::vector<double> a2;
  std::vector<double> h2;
  std::vector<std::vector<double>> g2;
};

ChannelGains gains(const Scenario& scenario, std::span<const Vec3> terminal_pos,
                   std::span<const Vec3> dbs_pos);

}  // namespace dbsplace
