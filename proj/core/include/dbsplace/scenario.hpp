#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dbsplace/geometry.hpp"
#include "dbsplace/rng.hpp"

namespace dbsplace {

/// Licensed-band and unlicensed-band radio constants.
/// Defaults are the Table-1 simulation values; the noise floor and carrier
/// frequencies are artifact-level choices (−174 dBm/Hz, 2 GHz / 5 GHz) and
/// stay configurable so experiments remain comparable under any choice.
struct RadioParams {
  double total_bandwidth_hz = 20e6;     // B0, shared by all MBS transmissions
  double total_power_w = 20.0;          // P0
  double dbs_bandwidth_hz = 5e6;        // b, per-DBS unlicensed band
  double dbs_power_w = 5.0;             // p
  double noise_psd_w_per_hz = 4.0e-21;  // N0
  double carrier_licensed_hz = 2e9;
  double carrier_unlicensed_hz = 5e9;
  double target_rate_bps = 3e7;         // r_T

  friend bool operator==(const RadioParams&, const RadioParams&) = default;
};

/// Urban air-to-ground environment coefficients.
struct EnvParams {
  double alpha = 9.61;
  double beta = 0.16;
  double loss_los_db = 1.0;
  double loss_nlos_db = 20.0;

  friend bool operator==(const EnvParams&, const EnvParams&) = default;
};

/// Unlicensed-band contention configuration. The DBS airtime share is
/// resolved in this order: an explicit airtime_share wins; otherwise a fixed
/// DBS contention window cw_dbs_slots >= 1 is solved through the coexistence
/// fixed point; otherwise the smallest window honoring collision_cap is
/// searched first and then solved. The share is computed once per band and
/// held fixed for the rest of the pipeline.
struct WifiConfig {
  int omega_slots = 16;       // min CW size of the Wi-Fi APs
  int max_backoff_stage = 3;  // m
  int num_aps = 10;           // M, Wi-Fi APs sharing the band
  int cw_dbs_slots = 0;       // Gamma; 0 means "derive from collision_cap"
  double collision_cap = 0.5; // C, cap on the Wi-Fi collision probability
  double airtime_share = 0.6; // S_D; negative means "derive from coexistence"

  friend bool operator==(const WifiConfig&, const WifiConfig&) = default;
};

struct PsoParams {
  int num_particles = 20;          // L
  double inertia = 0.7298;         // eta
  double accel_personal = 1.4962;  // a1
  double accel_social = 1.4962;    // a2
  int max_iterations = 150;
  int stall_window = 20;
  double stall_rel_tol = 1e-4;

  friend bool operator==(const PsoParams&, const PsoParams&) = default;
};

struct SolverParams {
  double step_base = 1e-3;    // zeta_1..zeta_5 before per-constraint scaling
  int max_iterations = 1500;
  double tolerance = 1e-7;    // relative multiplier movement + violation target
  bool polish = true;         // active-set Newton refinement after dual ascent

  friend bool operator==(const SolverParams&, const SolverParams&) = default;
};

struct ExperimentParams {
  int replications = 10;
  std::vector<double> target_rates_bps = {1e7, 2e7, 3e7, 4e7};
  std::vector<int> dbs_counts = {1, 2, 3, 4, 5};

  friend bool operator==(const ExperimentParams&, const ExperimentParams&) = default;
};

/// The full immutable description of one network instance. Safe to share
/// across concurrent workers once constructed.
struct Scenario {
  std::uint64_t rng_seed = 1;
  int num_terminals = 10;  // K
  int num_dbs = 3;         // N; 0 means direct transmission only

  Vec3 mbs_pos{0.0, 0.0, 0.0};
  Region3D mbs_region{-1.0, 1.0, -1.0, 1.0, 0.0, 0.0};
  Region3D terminal_region{-1.0, 1.0, -1.0, 1.0, 0.0, 0.0};
  Region3D dbs_region{-1.0, 1.0, -1.0, 1.0, 0.1, 0.4};

  /// Explicit terminal positions. Empty means "sample uniformly from
  /// terminal_region with the scenario seed".
  std::vector<Vec3> terminal_pos;

  RadioParams radio;
  EnvParams env;
  WifiConfig wifi;
  PsoParams pso;
  SolverParams solver;
  ExperimentParams experiments;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Parse and validate a JSON config file. Omitted fields take the documented
/// defaults; unknown keys and any invariant violation raise ConfigError with
/// every offending field named.
Scenario load_config(const std::string& path);

/// Parse a config from a JSON string (same contract as load_config).
Scenario parse_config(const std::string& json_text);

/// Serialize every field; load_config(save_config(s)) == s.
void save_config(const Scenario& scenario, const std::string& path);
std::string config_to_json(const Scenario& scenario);

/// Check all scenario invariants. Returns every violation, not just the first.
std::vector<std::string> validate(const Scenario& scenario);

/// K i.i.d. uniform positions over the region with z = z_min (ground plane).
/// Deterministic given the stream state.
std::vector<Vec3> sample_terminals(RngStream& rng, int count, const Region3D& region);

/// Terminal positions for this scenario: explicit ones if configured, else
/// sampled from the stream labeled "terminals" of the scenario seed.
std::vector<Vec3> scenario_terminals(const Scenario& scenario);

/// Per-DBS unlicensed airtime shares S_D, resolved per the WifiConfig rules.
std::vector<double> resolve_airtime(const Scenario& scenario);

/// FNV-1a hash over the canonical JSON form; used to tag experiment outputs.
std::uint64_t scenario_hash(const Scenario& scenario);

}  // namespace dbsplace
