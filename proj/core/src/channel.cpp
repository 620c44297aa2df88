#include "dbsplace/channel.hpp"

#include <cmath>
#include <numbers>

#include "dbsplace/errors.hpp"

namespace dbsplace {

namespace {
constexpr double kHataClampKm = 0.05;
}

double hata_path_loss_db(double distance_km) {
  const double d = std::max(distance_km, kHataClampKm);
  return 122.0 + 38.0 * std::log10(d);
}

double los_probability(double altitude_km, double horizontal_km, const EnvParams& env) {
  double elevation_deg;
  if (horizontal_km <= 0.0) {
    elevation_deg = 90.0;
  } else {
    elevation_deg = (180.0 / std::numbers::pi) * std::atan(altitude_km / horizontal_km);
  }
  return 1.0 / (1.0 + env.alpha * std::exp(-env.beta * (elevation_deg - env.alpha)));
}

double atg_excess_loss_db(double p_los, const EnvParams& env) {
  return p_los * env.loss_los_db + (1.0 - p_los) * env.loss_nlos_db;
}

double atg_path_loss_db(const Vec3& ground_km, const Vec3& dbs_km, double carrier_hz,
                        const EnvParams& env) {
  const double d_m = distance_km(ground_km, dbs_km) * 1000.0;
  if (d_m <= 0.0) throw SolverError("air-to-ground path loss undefined at zero distance");
  const double free_space =
      20.0 * std::log10(4.0 * std::numbers::pi * carrier_hz * d_m / kSpeedOfLightMps);
  const double p_los = los_probability(dbs_km.z - ground_km.z,
                                       horizontal_distance_km(ground_km, dbs_km), env);
  return free_space + atg_excess_loss_db(p_los, env);
}

namespace {
double db_to_linear_gain(double loss_db) { return std::pow(10.0, -loss_db / 10.0); }
}

ChannelGains gains(const Scenario& scenario, std::span<const Vec3> terminal_pos,
                   std::span<const Vec3> dbs_pos) {
  ChannelGains out;
  out.a2.reserve(terminal_pos.size());
  for (const Vec3& psi : terminal_pos) {
    out.a2.push_back(db_to_linear_gain(hata_path_loss_db(distance_km(scenario.mbs_pos, psi))));
  }
  out.h2.reserve(dbs_pos.size());
  for (const Vec3& phi : dbs_pos) {
    out.h2.push_back(db_to_linear_gain(
        atg_path_loss_db(scenario.mbs_pos, phi, scenario.radio.carrier_licensed_hz, scenario.env)));
  }
  out.g2.resize(terminal_pos.size());
  for (std::size_t k = 0; k < terminal_pos.size(); ++k) {
    out.g2[k].reserve(dbs_pos.size());
    for (const Vec3& phi : dbs_pos) {
      out.g2[k].push_back(db_to_linear_gain(atg_path_loss_db(
          terminal_pos[k], phi, scenario.radio.carrier_unlicensed_hz, scenario.env)));
    }
  }
  return out;
}

}  // namespace dbsplace
