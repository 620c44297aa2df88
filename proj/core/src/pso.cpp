#include "dbsplace/pso.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "dbsplace/parallel.hpp"

namespace dbsplace {

std::vector<RngStream> particle_streams(std::uint64_t master_seed, int num_particles) {
  std::vector<RngStream> streams;
  streams.reserve(static_cast<std::size_t>(num_particles));
  for (int l = 0; l < num_particles; ++l) {
    streams.emplace_back(master_seed, "pso/p" + std::to_string(l));
  }
  return streams;
}

namespace {

void evaluate_all(SwarmState& state, const CostFn& cost, std::vector<double>& out, int workers) {
  const int L = static_cast<int>(state.particles.size());
  out.resize(static_cast<std::size_t>(L));
  parallel_for(L, workers, [&](int l) { out[l] = cost(state.particles[l].positions); });
}

void update_bests(SwarmState& state, const std::vector<double>& costs) {
  for (std::size_t l = 0; l < state.particles.size(); ++l) {
    Particle& particle = state.particles[l];
    if (costs[l] < particle.best_cost) {
      particle.best_cost = costs[l];
      particle.best_positions = particle.positions;
      if (particle.best_cost < state.global_cost) {
        state.global_cost = particle.best_cost;
        state.global_best = particle.best_positions;
      }
    }
  }
}

}  // namespace

SwarmState init_swarm(std::vector<RngStream>& streams, int num_dbs, const Region3D& region,
                      const CostFn& cost, int workers) {
  const int num_particles = static_cast<int>(streams.size());
  SwarmState state;
  state.particles.resize(static_cast<std::size_t>(num_particles));
  for (int l = 0; l < num_particles; ++l) {
    Particle& particle = state.particles[static_cast<std::size_t>(l)];
    RngStream& rng = streams[static_cast<std::size_t>(l)];
    particle.positions.resize(static_cast<std::size_t>(num_dbs));
    particle.velocity.resize(static_cast<std::size_t>(num_dbs));
    for (int j = 0; j < num_dbs; ++j) {
      Vec3& w = particle.positions[static_cast<std::size_t>(j)];
      w.x = rng.uniform(region.x_min, region.x_max);
      w.y = rng.uniform(region.y_min, region.y_max);
      w.z = rng.uniform(region.z_min, region.z_max);
      Vec3& v = particle.velocity[static_cast<std::size_t>(j)];
      v.x = rng.uniform(-region.x_width(), region.x_width());
      v.y = rng.uniform(-region.y_width(), region.y_width());
      v.z = rng.uniform(-region.z_width(), region.z_width());
    }
  }
  std::vector<double> costs;
  evaluate_all(state, cost, costs, workers);
  state.global_cost = std::numeric_limits<double>::infinity();
  for (std::size_t l = 0; l < state.particles.size(); ++l) {
    Particle& particle = state.particles[l];
    particle.best_positions = particle.positions;
    particle.best_cost = costs[l];
    if (particle.best_cost < state.global_cost) {
      state.global_cost = particle.best_cost;
      state.global_best = particle.best_positions;
    }
  }
  state.iteration = 0;
  return state;
}

void pso_step(SwarmState& state, std::vector<RngStream>& streams, const Region3D& region,
              const CostFn& cost, const PsoParams& params, int workers) {
  // Move phase (sequential: owns the per-particle random draws).
  for (std::size_t l = 0; l < state.particles.size(); ++l) {
    Particle& particle = state.particles[l];
    RngStream& rng = streams[l];
    for (std::size_t j = 0; j < particle.positions.size(); ++j) {
      const Vec3 r1{rng.uniform(), rng.uniform(), rng.uniform()};
      const Vec3 r2{rng.uniform(), rng.uniform(), rng.uniform()};
      Vec3& v = particle.velocity[j];
      Vec3& w = particle.positions[j];
      const Vec3& pb = particle.best_positions[j];
      const Vec3& gb = state.global_best[j];
      v.x = params.inertia * v.x + params.accel_personal * r1.x * (pb.x - w.x) +
            params.accel_social * r2.x * (gb.x - w.x);
      v.y = params.inertia * v.y + params.accel_personal * r1.y * (pb.y - w.y) +
            params.accel_social * r2.y * (gb.y - w.y);
      v.z = params.inertia * v.z + params.accel_personal * r1.z * (pb.z - w.z) +
            params.accel_social * r2.z * (gb.z - w.z);
      w = w + v;
      bool moved[3];
      w = region.clamp(w, moved);
      if (moved[0]) v.x = 0.0;
      if (moved[1]) v.y = 0.0;
      if (moved[2]) v.z = 0.0;
    }
  }
  // Evaluation phase (parallel, pure) then synchronous best updates, so the
  // outcome does not depend on evaluation order.
  std::vector<double> costs;
  evaluate_all(state, cost, costs, workers);
  update_bests(state, costs);
  ++state.iteration;
}

PsoResult pso_run(std::uint64_t master_seed, const PsoParams& params, int num_dbs,
                  const Region3D& region, const CostFn& cost, int workers) {
  std::vector<RngStream> streams = particle_streams(master_seed, params.num_particles);
  SwarmState state = init_swarm(streams, num_dbs, region, cost, workers);

  PsoResult result;
  auto record_positions = [&result, &state](int iteration) {
    for (std::size_t l = 0; l < state.particles.size(); ++l) {
      const Particle& particle = state.particles[l];
      for (std::size_t j = 0; j < particle.positions.size(); ++j) {
        result.position_trace.push_back(
            {iteration, static_cast<int>(l), static_cast<int>(j), particle.positions[j]});
      }
    }
  };
  result.cost_trace.push_back(state.global_cost);
  record_positions(0);

  while (state.iteration < params.max_iterations) {
    pso_step(state, streams, region, cost, params, workers);
    result.cost_trace.push_back(state.global_cost);
    record_positions(state.iteration);
    const int t = state.iteration;
    if (t >= params.stall_window) {
      const double before = result.cost_trace[static_cast<std::size_t>(t - params.stall_window)];
      const double now = result.cost_trace[static_cast<std::size_t>(t)];
      if (before - now < params.stall_rel_tol * std::max(std::abs(before), 1e-300)) {
        result.stalled = true;
        break;
      }
    }
  }

  result.best_positions = state.global_best;
  result.best_cost = state.global_cost;
  result.iterations = state.iteration;
  return result;
}

}  // namespace dbsplace
