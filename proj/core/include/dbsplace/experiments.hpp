#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dbsplace/pso.hpp"
#include "dbsplace/rap.hpp"
#include "dbsplace/scenario.hpp"

namespace dbsplace {

/// Replicated objective values for one scheme. Seeds are rng_seed + i for
/// i in [0, replications); each replication resamples terminal positions
/// unless the scenario pins them explicitly.
struct ExperimentResult {
  std::string scheme;
  std::vector<std::uint64_t> seeds;
  std::vector<double> objective_bps;  // aggregate gap per seed
  double mean_bps = 0.0;
  double stddev_bps = 0.0;            // sample std, 0 for a single seed
  std::uint64_t scenario_fingerprint = 0;
};

/// Full pipeline: PSO placement with the RAP optimum as particle cost.
ExperimentResult run_proposed(const Scenario& scenario, int workers = 1);

/// DBS positions drawn uniformly over the DBS region, never updated; a single
/// RAP solve per seed.
ExperimentResult run_random_placement(const Scenario& scenario, int workers = 1);

/// Radio resources of the MBS only (no DBSs, tau forced to zero).
ExperimentResult run_no_dbs(const Scenario& scenario, int workers = 1);

struct TargetRateRow {
  double target_rate_bps = 0.0;
  std::string scheme;
  double mean_gap_bps = 0.0;
  double stddev_bps = 0.0;
};

/// All three schemes across a target-rate sweep.
std::vector<TargetRateRow> sweep_target_rate(const Scenario& scenario,
                                             std::span<const double> target_rates_bps,
                                             int workers = 1);

struct DbsCountRow {
  int num_dbs = 0;
  double mean_gap_bps = 0.0;
  double stddev_bps = 0.0;
};

/// Proposed scheme across DBS counts; run the entries in parallel to locate
/// the smallest fleet that drives the aggregate gap to zero.
std::vector<DbsCountRow> sweep_num_dbs(const Scenario& scenario, std::span<const int> dbs_counts,
                                       int workers = 1);

struct Association {
  int terminal = 0;
  std::vector<int> serving_dbs;  // j with tau[k][j] > 1e-6, ascending
};

std::vector<Association> association_snapshot(const ResourceAllocation& allocation,
                                              double tau_threshold = 1e-6);

}  // namespace dbsplace
