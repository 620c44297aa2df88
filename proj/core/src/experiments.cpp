#include "dbsplace/experiments.hpp"

#include <algorithm>
#include <cmath>

#include "dbsplace/channel.hpp"
#include "dbsplace/parallel.hpp"

namespace dbsplace {

namespace {

void finish_stats(ExperimentResult& r) {
  double sum = 0.0;
  for (double v : r.objective_bps) sum += v;
  const double n = static_cast<double>(r.objective_bps.size());
  r.mean_bps = n > 0.0 ? sum / n : 0.0;
  if (r.objective_bps.size() > 1) {
    double ss = 0.0;
    for (double v : r.objective_bps) ss += (v - r.mean_bps) * (v - r.mean_bps);
    r.stddev_bps = std::sqrt(ss / (n - 1.0));
  }
}

Scenario seeded(const Scenario& base, std::uint64_t seed) {
  Scenario s = base;
  s.rng_seed = seed;
  return s;
}

/// One replication of one scheme; returns the aggregate gap in bit/s.
double run_seed(const Scenario& scenario, const std::string& scheme, int pso_workers) {
  const std::vector<Vec3> terminals = scenario_terminals(scenario);
  const std::vector<double> shares = resolve_airtime(scenario);
  if (scheme == "no_dbs" || scenario.num_dbs == 0) {
    Scenario direct_only = scenario;
    direct_only.num_dbs = 0;
    return rap_cost_bps({}, direct_only, terminals, {});
  }
  if (scheme == "random_placement") {
    RngStream rng(scenario.rng_seed, "random_placement");
    std::vector<Vec3> pos(static_cast<std::size_t>(scenario.num_dbs));
    for (Vec3& p : pos) {
      p.x = rng.uniform(scenario.dbs_region.x_min, scenario.dbs_region.x_max);
      p.y = rng.uniform(scenario.dbs_region.y_min, scenario.dbs_region.y_max);
      p.z = rng.uniform(scenario.dbs_region.z_min, scenario.dbs_region.z_max);
    }
    return rap_cost_bps(pos, scenario, terminals, shares);
  }
  const CostFn cost = [&](const std::vector<Vec3>& w) {
    return rap_cost_bps(w, scenario, terminals, shares);
  };
  const PsoResult r = pso_run(scenario.rng_seed, scenario.pso, scenario.num_dbs,
                              scenario.dbs_region, cost, pso_workers);
  return r.best_cost;
}

ExperimentResult run_scheme(const Scenario& scenario, const std::string& scheme, int workers) {
  ExperimentResult result;
  result.scheme = scheme;
  result.scenario_fingerprint = scenario_hash(scenario);
  const int reps = scenario.experiments.replications;
  result.seeds.resize(static_cast<std::size_t>(reps));
  result.objective_bps.assign(static_cast<std::size_t>(reps), 0.0);
  for (int i = 0; i < reps; ++i) result.seeds[static_cast<std::size_t>(i)] = scenario.rng_seed + i;
  // Replications are independent; parallelize across seeds and keep each
  // seed's pipeline single-threaded so results are worker-count invariant.
  parallel_for(reps, workers, [&](int i) {
    result.objective_bps[static_cast<std::size_t>(i)] =
        run_seed(seeded(scenario, result.seeds[static_cast<std::size_t>(i)]), scheme, 1);
  });
  finish_stats(result);
  return result;
}

}  // namespace

ExperimentResult run_proposed(const Scenario& scenario, int workers) {
  return run_scheme(scenario, "proposed", workers);
}

ExperimentResult run_random_placement(const Scenario& scenario, int workers) {
  return run_scheme(scenario, "random_placement", workers);
}

ExperimentResult run_no_dbs(const Scenario& scenario, int workers) {
  return run_scheme(scenario, "no_dbs", workers);
}

std::vector<TargetRateRow> sweep_target_rate(const Scenario& scenario,
                                             std::span<const double> target_rates_bps,
                                             int workers) {
  std::vector<TargetRateRow> rows;
  for (double rT : target_rates_bps) {
    Scenario s = scenario;
    s.radio.target_rate_bps = rT;
    for (const char* scheme : {"proposed", "random_placement", "no_dbs"}) {
      const ExperimentResult r = run_scheme(s, scheme, workers);
      rows.push_back({rT, scheme, r.mean_bps, r.stddev_bps});
    }
  }
  return rows;
}

std::vector<DbsCountRow> sweep_num_dbs(const Scenario& scenario, std::span<const int> dbs_counts,
                                       int workers) {
  std::vector<DbsCountRow> rows;
  for (int n : dbs_counts) {
    Scenario s = scenario;
    s.num_dbs = n;
    const ExperimentResult r = run_scheme(s, "proposed", workers);
    rows.push_back({n, r.mean_bps, r.stddev_bps});
  }
  return rows;
}

std::vector<Association> association_snapshot(const ResourceAllocation& allocation,
                                              double tau_threshold) {
  std::vector<Association> out;
  for (std::size_t k = 0; k < allocation.tau.size(); ++k) {
    Association a;
    a.terminal = static_cast<int>(k);
    for (std::size_t j = 0; j < allocation.tau[k].size(); ++j) {
      if (allocation.tau[k][j] > tau_threshold) a.serving_dbs.push_back(static_cast<int>(j));
    }
    if (!a.serving_dbs.empty()) out.push_back(std::move(a));
  }
  return out;
}

}  // namespace dbsplace
