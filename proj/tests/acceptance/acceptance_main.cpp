// End-to-end verification suite. Each criterion prints one PASS/FAIL line;
// the process exits nonzero if any criterion fails. An optional argument
// restricts the run to a single criterion number.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "dbsplace/channel.hpp"
#include "dbsplace/coexistence.hpp"
#include "dbsplace/experiments.hpp"
#include "dbsplace/parallel.hpp"
#include "dbsplace/pso.hpp"
#include "dbsplace/rap.hpp"
#include "dbsplace/rates.hpp"
#include "dbsplace/rng.hpp"
#include "dbsplace/scenario.hpp"
#include "support/coex_oracle.hpp"

using namespace dbsplace;

namespace {

int failures = 0;
int selected = 0;  // 0 = run everything

struct Criterion {
  int number;
  std::string label;
  std::function<bool(std::string&)> body;
};

void run(const Criterion& c) {
  if (selected != 0 && selected != c.number) return;
  std::string detail;
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = false;
  try {
    ok = c.body(detail);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  const double sec =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("%s criterion %d: %s (%.1f s)%s%s\n", ok ? "PASS" : "FAIL", c.number,
              c.label.c_str(), sec, detail.empty() ? "" : " -- ", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

// ---------------------------------------------------------------------------

bool coexistence_anchor(std::string& detail) {
  const int gamma_star = optimize_cw(16, 3, 10, 0.5);
  std::ostringstream msg;
  msg << "gamma* = " << gamma_star;
  detail = msg.str();
  return gamma_star >= 5 && gamma_star <= 7;
}

bool coexistence_suite(std::string& detail) {
  double worst_residual = 0.0;
  double worst_oracle_diff = 0.0;
  bool monotone = true;
  for (int aps : {1, 5, 10, 20}) {
    double prev = 1.0;
    for (int gamma = 1; gamma <= 128; ++gamma) {
      WifiParams p;
      p.num_aps = aps;
      p.cw_dbs = gamma;
      const CoexistenceSolution s = solve_fixed_point(p);
      worst_residual = std::max(worst_residual, s.max_residual);
      if (s.c_w > prev + 1e-12) monotone = false;
      prev = s.c_w;
    }
  }
  int checked = 0;
  for (int aps : {1, 2, 5, 10, 20}) {
    for (int gamma : {1, 3, 6, 16}) {
      WifiParams p;
      p.num_aps = aps;
      p.cw_dbs = gamma;
      const CoexistenceSolution s = solve_fixed_point(p);
      const coex_oracle::Point o = coex_oracle::solve(16, 3, aps, gamma);
      worst_oracle_diff = std::max({worst_oracle_diff, std::abs(s.delta_w - o.delta_w),
                                    std::abs(s.delta_d - o.delta_d), std::abs(s.c_w - o.c_w),
                                    std::abs(s.c_d - o.c_d)});
      ++checked;
    }
  }
  std::ostringstream msg;
  msg << "max residual " << worst_residual << ", oracle diff " << worst_oracle_diff << " over "
      << checked << " grid points";
  detail = msg.str();
  return worst_residual < 1e-8 && monotone && worst_oracle_diff < 1e-6;
}

bool concavity_suite(std::string& detail) {
  RngStream rng(2024, "acceptance-hessian");
  double worst_d1 = -1e300, worst_d2 = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double b0 = std::exp(rng.uniform(std::log(1e3), std::log(2e7)));
    const double p0 = std::exp(rng.uniform(std::log(1e-3), std::log(20.0)));
    const double f0 = b0 * std::log1p(p0 / b0);
    auto grad_u = [&](double u, double v) {
      const double b = b0 * u, p = p0 * v;
      return b0 * (std::log1p(p / b) - p / (b + p)) / f0;
    };
    auto grad_v = [&](double u, double v) {
      const double b = b0 * u, p = p0 * v;
      return p0 * (b / (b + p)) / f0;
    };
    const double h = 1e-6;
    const double huu = (grad_u(1.0 + h, 1.0) - grad_u(1.0 - h, 1.0)) / (2.0 * h);
    const double huv = (grad_u(1.0, 1.0 + h) - grad_u(1.0, 1.0 - h)) / (2.0 * h);
    const double hvu = (grad_v(1.0 + h, 1.0) - grad_v(1.0 - h, 1.0)) / (2.0 * h);
    const double hvv = (grad_v(1.0, 1.0 + h) - grad_v(1.0, 1.0 - h)) / (2.0 * h);
    worst_d1 = std::max(worst_d1, huu);
    worst_d2 = std::max(worst_d2, std::abs(huu * hvv - huv * hvu));
    // the tau row of the Hessian is identically zero, so D3 is exactly 0
  }
  std::ostringstream msg;
  msg << "max D1 " << worst_d1 << ", max |D2| " << worst_d2 << ", D3 = 0";
  detail = msg.str();
  return worst_d1 <= 1e-10 && worst_d2 <= 1e-8;
}

bool rap_oracle_equivalence(std::string& detail) {
  struct Frozen {
    double rT, a0, a1, h, g0, g1;
  };
  const Frozen instances[] = {
      {2.0e8, 6.31e-13, 1.70e-13, 1.0e-10, 4.0e-10, 7.0e-10},
      {2.5e8, 8.00e-13, 0.90e-13, 2.0e-10, 9.0e-10, 3.0e-10},
      {2.2e8, 7.10e-13, 1.20e-13, 1.2e-10, 5.0e-10, 6.0e-10},
      {2.8e8, 9.00e-13, 2.60e-13, 2.4e-10, 8.0e-10, 5.5e-10},
      {2.1e8, 5.00e-13, 1.50e-13, 1.6e-10, 7.0e-10, 3.0e-10},
  };
  double worst_rel = 0.0, worst_kkt = 0.0;
  for (const Frozen& c : instances) {
    Scenario sc;
    sc.num_terminals = 2;
    sc.num_dbs = 1;
    sc.radio.target_rate_bps = c.rT;
    ChannelGains g;
    g.a2 = {c.a0, c.a1};
    g.h2 = {c.h};
    g.g2 = {{c.g0}, {c.g1}};
    const std::vector<double> shares = {0.6};
    const RapSolution sol = solve_rap(sc, g, shares);
    const OracleResult oracle = brute_force_rap(sc, g, shares, 80);
    if (oracle.objective_bps <= 0.0) {
      detail = "oracle objective unexpectedly zero";
      return false;
    }
    worst_rel = std::max(
        worst_rel, std::abs(sol.report.objective_bps - oracle.objective_bps) / oracle.objective_bps);
    worst_kkt = std::max(worst_kkt, sol.report.max_kkt_residual);
  }
  std::ostringstream msg;
  msg << "max |solver - oracle| " << 100.0 * worst_rel << "%, max KKT residual " << worst_kkt;
  detail = msg.str();
  return worst_rel <= 0.02 && worst_kkt < 1e-4;
}

bool df_reduction(std::string& detail) {
  RngStream rng(7, "acceptance-df");
  for (int i = 0; i < 100; ++i) {
    const double b = rng.uniform(1e4, 2e7);
    const double p = rng.uniform(1e-3, 20.0);
    const double a2 = rng.uniform(1e-14, 1e-10);
    const std::vector<double> g2 = {rng.uniform(1e-12, 1e-9), rng.uniform(1e-12, 1e-9),
                                    rng.uniform(1e-12, 1e-9)};
    const std::vector<double> tau = {0.0, 0.0, 0.0};
    const RateReport r = df_rate(b, p, a2, g2, tau, 5e6, 5.0, 4e-21);
    if (r.total_bps != direct_rate_bps({b, p, a2, 4e-21})) {
      detail = "tau = 0 did not reduce to the direct rate exactly";
      return false;
    }
  }
  detail = "100 random budgets exact";
  return true;
}

bool pso_correctness(std::string& detail) {
  const Region3D region{-1.0, 1.0, -1.0, 1.0, 0.1, 0.4};
  const Vec3 target{0.3, -0.2, 0.25};
  PsoParams params;
  params.num_particles = 20;
  params.max_iterations = 200;
  params.stall_window = 200;
  int hits = 0;
  bool monotone = true;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const CostFn cost = [&](const std::vector<Vec3>& w) { return distance_km(w[0], target); };
    const PsoResult r = pso_run(seed, params, 1, region, cost);
    for (std::size_t t = 1; t < r.cost_trace.size(); ++t) {
      if (r.cost_trace[t] > r.cost_trace[t - 1]) monotone = false;
    }
    if (r.best_cost < 0.01) ++hits;
  }
  std::ostringstream msg;
  msg << hits << "/20 runs within 0.01 km, trace monotone = " << (monotone ? "yes" : "no");
  detail = msg.str();
  return monotone && hits >= 19;
}

bool end_to_end_trends(std::string& detail) {
  Scenario sc;  // Table 1/2 defaults: K = 10, N = 3, S_D = 0.6
  sc.experiments.replications = 10;
  const int workers = default_workers();

  const std::vector<double> rates = {1e7, 2e7, 3e7, 4e7};
  const auto fig1 = sweep_target_rate(sc, rates, workers);
  auto mean_of = [&](double rT, const std::string& scheme) {
    for (const TargetRateRow& r : fig1) {
      if (r.target_rate_bps == rT && r.scheme == scheme) return r.mean_gap_bps;
    }
    return -1.0;
  };
  bool ordering = true;
  for (double rT : rates) {
    const double proposed = mean_of(rT, "proposed");
    const double random = mean_of(rT, "random_placement");
    const double direct = mean_of(rT, "no_dbs");
    // The ordering is statistical: near-zero gaps carry solver noise well
    // under 1% of the target, so comparisons get that much slack.
    const double slack = 0.01 * rT;
    if (proposed > random + slack) ordering = false;
    if (random > direct + slack) ordering = false;
  }
  const double top_proposed = mean_of(rates.back(), "proposed");
  const double top_direct = mean_of(rates.back(), "no_dbs");
  const bool margin = top_proposed <= 0.9 * top_direct;

  const std::vector<int> counts = {1, 2, 3, 4, 5};
  const auto fig2 = sweep_num_dbs(sc, counts, workers);
  bool fleet_monotone = true;
  for (std::size_t i = 1; i < fig2.size(); ++i) {
    if (fig2[i].mean_gap_bps > fig2[i - 1].mean_gap_bps * 1.02 + 1.0) fleet_monotone = false;
  }

  std::ostringstream msg;
  msg << "top-rate gaps (bps): proposed " << top_proposed << ", random "
      << mean_of(rates.back(), "random_placement") << ", no-DBS " << top_direct << "; fleet [";
  for (const DbsCountRow& r : fig2) msg << " " << r.mean_gap_bps;
  msg << " ]";
  detail = msg.str();
  return ordering && margin && fleet_monotone;
}

bool determinism(std::string& detail) {
#ifndef DBSPLACE_CLI_PATH
  detail = "CLI path not wired in";
  return false;
#else
  namespace fs = std::filesystem;
  const std::string config = std::string(DBSPLACE_SOURCE_DIR) + "/configs/urban_default.json";
  const fs::path base = fs::temp_directory_path() / "dbsplace_acceptance_det";
  fs::remove_all(base);
  const fs::path out1 = base / "run1";
  const fs::path out2 = base / "run2";
  auto run_solve = [&](const fs::path& out, int workers) {
    std::ostringstream cmd;
    cmd << DBSPLACE_CLI_PATH << " solve --config " << config << " --seed 7 --workers "
        << workers << " --out " << out.string() << " > " << (out.string() + ".log") << " 2>&1";
    fs::create_directories(out);
    return std::system(cmd.str().c_str()) == 0;
  };
  if (!run_solve(out1, 1) || !run_solve(out2, 2)) {
    detail = "solve invocation failed";
    return false;
  }
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
  };
  for (const char* name : {"allocation.csv", "cost_trace.csv", "position_trace.csv",
                           "dbs_positions.csv", "fig6.csv", "summary.csv"}) {
    if (slurp(out1 / name) != slurp(out2 / name)) {
      detail = std::string(name) + " differs across runs";
      return false;
    }
  }
  detail = "6 result files byte-identical across seeds and worker counts";
  return true;
#endif
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) selected = std::atoi(argv[1]);
  run({1, "coexistence anchor: gamma* = 6 +/- 1 at omega 16, m 3, 10 APs, cap 0.5",
       coexistence_anchor});
  run({2, "coexistence fixed point: residuals, monotonicity, bisection oracle",
       coexistence_suite});
  run({3, "concavity of the rate surface via numerical principal minors", concavity_suite});
  run({4, "resource allocation matches the 80-point grid oracle within 2%",
       rap_oracle_equivalence});
  run({5, "cooperative DF with tau = 0 reduces to direct transmission", df_reduction});
  run({6, "PSO: monotone global best and synthetic-benchmark convergence", pso_correctness});
  run({7, "end-to-end scheme ordering and fleet-size trend", end_to_end_trends});
  run({8, "byte-identical results across repeated runs and worker counts", determinism});
  if (failures > 0) {
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
