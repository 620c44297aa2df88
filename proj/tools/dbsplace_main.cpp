// Command-line front end: binds scenario configs to the coexistence solver,
// the resource-allocation solver, the PSO placement loop, and the experiment
// sweeps, emitting CSV result sets.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dbsplace/channel.hpp"
#include "dbsplace/coexistence.hpp"
#include "dbsplace/csv.hpp"
#include "dbsplace/errors.hpp"
#include "dbsplace/experiments.hpp"
#include "dbsplace/parallel.hpp"
#include "dbsplace/pso.hpp"
#include "dbsplace/rap.hpp"
#include "dbsplace/scenario.hpp"

namespace {

using namespace dbsplace;

std::string resolve_out_dir(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("DBSPLACE_OUT_DIR"); env && *env) return env;
  return ".";
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

Scenario load_scenario(const std::string& path, std::optional<std::uint64_t> seed) {
  Scenario sc = load_config(path);
  if (seed) sc.rng_seed = *seed;
  return sc;
}

std::vector<Vec3> read_positions_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open positions file " + path);
  std::vector<Vec3> out;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first && line.find("x_km") != std::string::npos) {
      first = false;
      continue;
    }
    first = false;
    Vec3 p;
    int index = 0;
    if (std::sscanf(line.c_str(), "%d,%lf,%lf,%lf", &index, &p.x, &p.y, &p.z) != 4) {
      throw ConfigError("positions file " + path + ": expected 'dbs,x_km,y_km,z_km' rows");
    }
    out.push_back(p);
  }
  if (out.empty()) throw ConfigError("positions file " + path + " holds no rows");
  return out;
}

CsvWriter allocation_csv(const ResourceAllocation& alloc, double target_rate_bps, int num_dbs) {
  std::vector<std::string> header = {"terminal", "b_hz", "p_w"};
  for (int j = 0; j < num_dbs; ++j) header.push_back("tau_" + std::to_string(j + 1));
  header.push_back("rate_bps");
  header.push_back("gap_bps");
  CsvWriter csv(std::move(header));
  for (std::size_t k = 0; k < alloc.bandwidth_hz.size(); ++k) {
    std::vector<std::string> row = {std::to_string(k), format_double(alloc.bandwidth_hz[k]),
                                    format_double(alloc.power_w[k])};
    for (int j = 0; j < num_dbs; ++j) row.push_back(format_double(alloc.tau[k][j]));
    row.push_back(format_double(alloc.rate_bps[k]));
    row.push_back(format_double(std::max(0.0, target_rate_bps - alloc.rate_bps[k])));
    csv.add_row(std::move(row));
  }
  return csv;
}

CsvWriter cost_trace_csv(const PsoResult& result) {
  CsvWriter csv({"iter", "best_cost_bps"});
  for (std::size_t t = 0; t < result.cost_trace.size(); ++t) {
    csv.add_row({std::to_string(t), format_double(result.cost_trace[t])});
  }
  return csv;
}

CsvWriter position_trace_csv(const PsoResult& result) {
  CsvWriter csv({"iter", "particle", "dbs", "x_km", "y_km", "z_km"});
  for (const PositionRecord& r : result.position_trace) {
    csv.add_row({std::to_string(r.iteration), std::to_string(r.particle),
                 std::to_string(r.dbs), format_double(r.pos.x), format_double(r.pos.y),
                 format_double(r.pos.z)});
  }
  return csv;
}

int run_solve(const std::string& config, std::optional<std::uint64_t> seed,
              const std::string& out_flag, int workers) {
  const Scenario sc = load_scenario(config, seed);
  const std::string out = resolve_out_dir(out_flag);
  const std::vector<Vec3> terminals = scenario_terminals(sc);
  const std::vector<double> shares = resolve_airtime(sc);

  const CostFn cost = [&](const std::vector<Vec3>& w) {
    return rap_cost_bps(w, sc, terminals, shares);
  };
  const PsoResult pso = pso_run(sc.rng_seed, sc.pso, sc.num_dbs, sc.dbs_region, cost, workers);

  const ChannelGains g = gains(sc, terminals, pso.best_positions);
  const RapSolution sol = solve_rap(sc, g, shares);

  allocation_csv(sol.allocation, sc.radio.target_rate_bps, sc.num_dbs)
      .write_to(join_path(out, "allocation.csv"));
  cost_trace_csv(pso).write_to(join_path(out, "cost_trace.csv"));
  position_trace_csv(pso).write_to(join_path(out, "position_trace.csv"));

  {
    CsvWriter csv({"dbs", "x_km", "y_km", "z_km"});
    for (std::size_t j = 0; j < pso.best_positions.size(); ++j) {
      const Vec3& p = pso.best_positions[j];
      csv.add_row({std::to_string(j), format_double(p.x), format_double(p.y),
                   format_double(p.z)});
    }
    csv.write_to(join_path(out, "dbs_positions.csv"));
  }
  {
    // Placement snapshot with the terminal-to-DBS association pattern.
    CsvWriter csv({"entity", "index", "x_km", "y_km", "z_km", "links"});
    csv.add_row({"mbs", "0", format_double(sc.mbs_pos.x), format_double(sc.mbs_pos.y),
                 format_double(sc.mbs_pos.z), ""});
    for (std::size_t j = 0; j < pso.best_positions.size(); ++j) {
      const Vec3& p = pso.best_positions[j];
      csv.add_row({"dbs", std::to_string(j), format_double(p.x), format_double(p.y),
                   format_double(p.z), ""});
    }
    const std::vector<Association> assoc = association_snapshot(sol.allocation);
    for (std::size_t k = 0; k < terminals.size(); ++k) {
      std::string links;
      for (const Association& a : assoc) {
        if (a.terminal == static_cast<int>(k)) {
          for (std::size_t i = 0; i < a.serving_dbs.size(); ++i) {
            if (i) links.push_back(';');
            links += std::to_string(a.serving_dbs[i]);
          }
        }
      }
      csv.add_row({"terminal", std::to_string(k), format_double(terminals[k].x),
                   format_double(terminals[k].y), format_double(terminals[k].z), links});
    }
    csv.write_to(join_path(out, "fig6.csv"));
  }
  {
    CsvWriter csv({"seed", "objective_bps", "pso_iterations", "pso_stalled",
                   "solver_iterations", "solver_converged", "max_kkt_residual",
                   "duality_gap_bps", "airtime_share"});
    csv.add_row({std::to_string(sc.rng_seed), format_double(sol.report.objective_bps),
                 std::to_string(pso.iterations), std::to_string(int(pso.stalled)),
                 std::to_string(sol.report.iterations),
                 std::to_string(int(sol.report.converged)),
                 format_double(sol.report.max_kkt_residual),
                 format_double(sol.report.duality_gap_estimate_bps),
                 format_double(shares.empty() ? 0.0 : shares[0])});
    csv.write_to(join_path(out, "summary.csv"));
  }
  std::cout << "objective_bps," << format_double(sol.report.objective_bps) << "\n";
  return 0;
}

int run_rap(const std::string& config, const std::string& positions_path,
            std::optional<std::uint64_t> seed, const std::string& gains_path) {
  const Scenario sc = load_scenario(config, seed);
  std::vector<Vec3> dbs = read_positions_csv(positions_path);
  Scenario adjusted = sc;
  adjusted.num_dbs = static_cast<int>(dbs.size());
  const std::vector<Vec3> terminals = scenario_terminals(adjusted);
  const std::vector<double> shares = resolve_airtime(adjusted);
  const ChannelGains g = gains(adjusted, terminals, dbs);
  if (!gains_path.empty()) {
    CsvWriter csv({"link", "from", "to", "gain"});
    for (std::size_t k = 0; k < g.a2.size(); ++k) {
      csv.add_row({"mbs_terminal", "0", std::to_string(k), format_double(g.a2[k])});
    }
    for (std::size_t j = 0; j < g.h2.size(); ++j) {
      csv.add_row({"mbs_dbs", "0", std::to_string(j), format_double(g.h2[j])});
    }
    for (std::size_t k = 0; k < g.g2.size(); ++k) {
      for (std::size_t j = 0; j < g.g2[k].size(); ++j) {
        csv.add_row({"dbs_terminal", std::to_string(j), std::to_string(k),
                     format_double(g.g2[k][j])});
      }
    }
    csv.write_to(gains_path);
  }
  const RapSolution sol = solve_rap(adjusted, g, shares);
  std::cout << allocation_csv(sol.allocation, adjusted.radio.target_rate_bps, adjusted.num_dbs)
                   .to_string();
  return 0;
}

int run_coexistence(int omega, int stage, const std::vector<int>& aps_list, int gamma,
                    double cap, const std::string& sweep, const std::string& out_flag) {
  if (!sweep.empty()) {
    const auto sep = sweep.find("..");
    if (sep == std::string::npos) {
      throw ConfigError("--sweep-gamma expects lo..hi, got " + sweep);
    }
    const int lo = std::stoi(sweep.substr(0, sep));
    const int hi = std::stoi(sweep.substr(sep + 2));
    if (lo < 1 || hi < lo) throw ConfigError("--sweep-gamma range must satisfy 1 <= lo <= hi");
    CsvWriter csv({"gamma", "aps", "c_w"});
    for (int m : aps_list) {
      for (int g = lo; g <= hi; ++g) {
        WifiParams p;
        p.omega = omega;
        p.max_stage = stage;
        p.num_aps = m;
        p.cw_dbs = g;
        csv.add_row({std::to_string(g), std::to_string(m),
                     format_double(solve_fixed_point(p).c_w)});
      }
    }
    if (!out_flag.empty() || std::getenv("DBSPLACE_OUT_DIR")) {
      csv.write_to(join_path(resolve_out_dir(out_flag), "fig3.csv"));
    } else {
      std::cout << csv.to_string();
    }
    return 0;
  }
  const int m = aps_list.front();
  if (gamma < 1) {
    const int gamma_star = optimize_cw(omega, stage, m, cap);
    std::cout << "gamma_star," << gamma_star << "\n";
    return 0;
  }
  WifiParams p;
  p.omega = omega;
  p.max_stage = stage;
  p.num_aps = m;
  p.cw_dbs = gamma;
  const CoexistenceSolution s = solve_fixed_point(p);
  CsvWriter csv({"omega", "m", "aps", "gamma", "delta_w", "delta_d", "c_w", "c_d", "airtime"});
  csv.add_row({std::to_string(omega), std::to_string(stage), std::to_string(m),
               std::to_string(gamma), format_double(s.delta_w), format_double(s.delta_d),
               format_double(s.c_w), format_double(s.c_d), format_double(s.airtime)});
  std::cout << csv.to_string();
  return 0;
}

int run_sweep_target_rate(const std::string& config, std::optional<std::uint64_t> seed,
                          std::vector<double> rates, const std::string& out_flag, int workers) {
  const Scenario sc = load_scenario(config, seed);
  if (rates.empty()) rates = sc.experiments.target_rates_bps;
  const auto rows = sweep_target_rate(sc, rates, workers);
  CsvWriter csv({"target_rate_bps", "scheme", "mean_gap_bps", "std_gap_bps"});
  for (const TargetRateRow& r : rows) {
    csv.add_row({format_double(r.target_rate_bps), r.scheme, format_double(r.mean_gap_bps),
                 format_double(r.stddev_bps)});
  }
  csv.write_to(join_path(resolve_out_dir(out_flag), "fig1.csv"));
  return 0;
}

int run_sweep_dbs(const std::string& config, std::optional<std::uint64_t> seed,
                  std::vector<int> counts, const std::string& out_flag, int workers) {
  const Scenario sc = load_scenario(config, seed);
  if (counts.empty()) counts = sc.experiments.dbs_counts;
  const auto rows = sweep_num_dbs(sc, counts, workers);
  CsvWriter csv({"num_dbs", "mean_gap_bps", "std_gap_bps"});
  for (const DbsCountRow& r : rows) {
    csv.add_row({std::to_string(r.num_dbs), format_double(r.mean_gap_bps),
                 format_double(r.stddev_bps)});
  }
  csv.write_to(join_path(resolve_out_dir(out_flag), "fig2.csv"));
  // Smallest fleet that drives every terminal to its target, if one exists.
  for (const DbsCountRow& r : rows) {
    if (r.mean_gap_bps <= 0.0) {
      std::cout << "min_dbs_for_zero_gap," << r.num_dbs << "\n";
      break;
    }
  }
  return 0;
}

int run_trace(const std::string& config, std::optional<std::uint64_t> seed,
              const std::string& out_flag, int workers) {
  const Scenario sc = load_scenario(config, seed);
  const std::string out = resolve_out_dir(out_flag);
  const std::vector<Vec3> terminals = scenario_terminals(sc);
  const std::vector<double> shares = resolve_airtime(sc);
  const CostFn cost = [&](const std::vector<Vec3>& w) {
    return rap_cost_bps(w, sc, terminals, shares);
  };
  const PsoResult pso = pso_run(sc.rng_seed, sc.pso, sc.num_dbs, sc.dbs_region, cost, workers);
  cost_trace_csv(pso).write_to(join_path(out, "cost_trace.csv"));
  position_trace_csv(pso).write_to(join_path(out, "position_trace.csv"));
  cost_trace_csv(pso).write_to(join_path(out, "fig4.csv"));
  position_trace_csv(pso).write_to(join_path(out, "fig5.csv"));
  return 0;
}

int run_validate(const std::string& config) {
  const Scenario sc = load_config(config);  // throws with the full error list
  std::cout << "ok: " << config << " (" << sc.num_terminals << " terminals, " << sc.num_dbs
            << " DBSs)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Drone base station placement: coexistence, resource allocation and PSO"};
  app.require_subcommand(1);

  std::string config;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  int workers = default_workers();

  auto add_common = [&](CLI::App* cmd, bool needs_config) {
    if (needs_config) {
      cmd->add_option("--config", config, "JSON scenario config")->required();
    }
    cmd->add_option("--seed", seed, "override rng_seed from the config");
    cmd->add_option("--out", out_dir, "output directory (or DBSPLACE_OUT_DIR)");
    cmd->add_option("--workers", workers, "worker threads for parallel sections");
  };

  CLI::App* solve = app.add_subcommand("solve", "full placement pipeline for one seed");
  add_common(solve, true);

  CLI::App* rap = app.add_subcommand("rap", "resource allocation for fixed DBS positions");
  std::string positions;
  rap->add_option("--scenario", config, "JSON scenario config")->required();
  rap->add_option("--positions", positions, "CSV of DBS positions (dbs,x_km,y_km,z_km)")
      ->required();
  rap->add_option("--seed", seed, "override rng_seed from the config");
  std::string gains_csv;
  rap->add_option("--gains-csv", gains_csv, "also dump the link gain matrix to this CSV");

  CLI::App* coex = app.add_subcommand("coexistence", "unlicensed-band fixed point");
  int omega = 16, stage = 3, gamma = 0;
  double cap = 0.0;
  std::vector<int> aps_list = {10};
  std::string sweep;
  coex->add_option("--omega", omega, "min CW size of the Wi-Fi APs");
  coex->add_option("--m", stage, "max backoff stage of the Wi-Fi APs");
  coex->add_option("--aps", aps_list, "Wi-Fi AP count(s) on the band")->delimiter(',');
  coex->add_option("--gamma", gamma, "DBS CW size (solve at fixed gamma)");
  coex->add_option("--cap", cap, "collision cap (find the smallest feasible gamma)");
  coex->add_option("--sweep-gamma", sweep, "lo..hi sweep of the DBS CW size");
  coex->add_option("--out", out_dir, "write fig3.csv here instead of stdout");

  CLI::App* sweep_rt = app.add_subcommand("sweep-target-rate", "all schemes over target rates");
  std::vector<double> rates;
  add_common(sweep_rt, true);
  sweep_rt->add_option("--rates", rates, "target rates in bit/s")->delimiter(',');

  CLI::App* sweep_n = app.add_subcommand("sweep-dbs", "proposed scheme over DBS counts");
  std::vector<int> counts;
  add_common(sweep_n, true);
  sweep_n->add_option("--dbs", counts, "DBS counts")->delimiter(',');

  CLI::App* trace = app.add_subcommand("trace", "convergence traces for one seed");
  add_common(trace, true);

  CLI::App* validate_cmd = app.add_subcommand("validate", "check a config and report problems");
  validate_cmd->add_option("--config", config, "JSON scenario config")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return run_solve(config, seed, out_dir, workers);
    if (rap->parsed()) return run_rap(config, positions, seed, gains_csv);
    if (coex->parsed()) {
      if (gamma < 1 && cap <= 0.0 && sweep.empty()) {
        throw ConfigError("coexistence needs one of --gamma, --cap or --sweep-gamma");
      }
      return run_coexistence(omega, stage, aps_list, gamma, cap, sweep, out_dir);
    }
    if (sweep_rt->parsed()) return run_sweep_target_rate(config, seed, rates, out_dir, workers);
    if (sweep_n->parsed()) return run_sweep_dbs(config, seed, counts, out_dir, workers);
    if (trace->parsed()) return run_trace(config, seed, out_dir, workers);
    if (validate_cmd->parsed()) return run_validate(config);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const SolverError& e) {
    std::cerr << e.what() << "\n";
    return 3;
  } catch (const IoError& e) {
    std::cerr << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
