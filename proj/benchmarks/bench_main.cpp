#include <benchmark/benchmark.h>

#include <vector>

#include "dbsplace/channel.hpp"
#include "dbsplace/coexistence.hpp"
#include "dbsplace/pso.hpp"
#include "dbsplace/rap.hpp"
#include "dbsplace/rng.hpp"
#include "dbsplace/scenario.hpp"

namespace {

using namespace dbsplace;

void BM_hata(benchmark::State& state) {
  double d = 0.01;
  for (auto _ : state) {
    benchmark::DoNotOptimize(hata_path_loss_db(d));
    d += 1e-4;
    if (d > 3.0) d = 0.01;
  }
}
BENCHMARK(BM_hata);

void BM_channel_gains(benchmark::State& state) {
  Scenario sc;
  const std::vector<Vec3> terminals = scenario_terminals(sc);
  const std::vector<Vec3> dbs = {{0.2, 0.3, 0.2}, {-0.5, 0.1, 0.3}, {0.7, -0.7, 0.15}};
  for (auto _ : state) {
    benchmark::DoNotOptimize(gains(sc, terminals, dbs));
  }
}
BENCHMARK(BM_channel_gains);

void BM_coexistence_fixed_point(benchmark::State& state) {
  WifiParams p;
  p.cw_dbs = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_fixed_point(p));
  }
}
BENCHMARK(BM_coexistence_fixed_point)->Arg(6)->Arg(64);

void BM_optimize_cw(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(optimize_cw(16, 3, 10, 0.5));
  }
}
BENCHMARK(BM_optimize_cw);

void BM_solve_rap(benchmark::State& state) {
  const int terminals = static_cast<int>(state.range(0));
  const int dbs_count = static_cast<int>(state.range(1));
  Scenario sc;
  sc.num_terminals = terminals;
  sc.num_dbs = dbs_count;
  sc.radio.target_rate_bps = 4e7;
  RngStream rng(5, "bench-rap");
  ChannelGains g;
  for (int k = 0; k < terminals; ++k) g.a2.push_back(rng.uniform(1e-14, 8e-13));
  for (int j = 0; j < dbs_count; ++j) g.h2.push_back(rng.uniform(1e-11, 3e-10));
  g.g2.resize(terminals);
  for (int k = 0; k < terminals; ++k) {
    for (int j = 0; j < dbs_count; ++j) g.g2[k].push_back(rng.uniform(1e-11, 9e-10));
  }
  const std::vector<double> shares(dbs_count, 0.6);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_rap(sc, g, shares));
  }
}
BENCHMARK(BM_solve_rap)->Args({2, 1})->Args({10, 3});

void BM_rap_oracle(benchmark::State& state) {
  Scenario sc;
  sc.num_terminals = 2;
  sc.num_dbs = 1;
  sc.radio.target_rate_bps = 2e8;
  ChannelGains g;
  g.a2 = {6.31e-13, 1.7e-13};
  g.h2 = {1e-10};
  g.g2 = {{4e-10}, {7e-10}};
  const std::vector<double> shares = {0.6};
  const int res = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(brute_force_rap(sc, g, shares, res));
  }
}
BENCHMARK(BM_rap_oracle)->Arg(20)->Arg(80);

void BM_pso_step(benchmark::State& state) {
  const Region3D region{-1.0, 1.0, -1.0, 1.0, 0.1, 0.4};
  const CostFn cost = [](const std::vector<Vec3>& w) {
    double c = 0.0;
    for (const Vec3& p : w) c += p.norm();
    return c;
  };
  PsoParams params;
  std::vector<RngStream> streams = particle_streams(1, params.num_particles);
  SwarmState swarm = init_swarm(streams, 3, region, cost);
  for (auto _ : state) {
    pso_step(swarm, streams, region, cost, params);
  }
}
BENCHMARK(BM_pso_step);

}  // namespace

BENCHMARK_MAIN();
