#pragma once

#include <functional>
#include <vector>

#include "dbsplace/geometry.hpp"
#include "dbsplace/rng.hpp"
#include "dbsplace/scenario.hpp"

namespace dbsplace {

/// Cost of one candidate DBS placement (N rows of x, y, z in km). Lower is
/// better; evaluations must be pure.
using CostFn = std::function<double(const std::vector<Vec3>&)>;

struct Particle {
  std::vector<Vec3> positions;       // W_l, one row per DBS
  std::vector<Vec3> velocity;        // V_l, km per iteration
  std::vector<Vec3> best_positions;  // W_l*
  double best_cost = 0.0;            // c_l*
};

/// Swarm with synchronous best updates: all costs of an iteration are
/// evaluated (possibly concurrently) before any best is touched, so results
/// do not depend on evaluation order or worker count. Each particle draws
/// from its own label-derived stream.
struct SwarmState {
  std::vector<Particle> particles;
  std::vector<Vec3> global_best;
  double global_cost = 0.0;
  int iteration = 0;
};

/// One label-derived stream per particle ("pso/p<l>"), shared by
/// initialization and every later step so no draw is ever replayed.
std::vector<RngStream> particle_streams(std::uint64_t master_seed, int num_particles);

/// Particles uniform over region^N; velocities uniform per axis over
/// +/- (axis width); bests taken from the initial costs.
SwarmState init_swarm(std::vector<RngStream>& streams, int num_dbs, const Region3D& region,
                      const CostFn& cost, int workers = 1);

/// One velocity/position/evaluation sweep. Coordinates leaving the region are
/// clamped to the boundary with that velocity component zeroed. Bests update
/// only on strict improvement.
void pso_step(SwarmState& state, std::vector<RngStream>& streams, const Region3D& region,
              const CostFn& cost, const PsoParams& params, int workers = 1);

struct PositionRecord {
  int iteration = 0;
  int particle = 0;
  int dbs = 0;
  Vec3 pos;
};

struct PsoResult {
  std::vector<Vec3> best_positions;
  double best_cost = 0.0;
  int iterations = 0;
  bool stalled = false;
  std::vector<double> cost_trace;             // global best after each iteration
  std::vector<PositionRecord> position_trace; // every particle, every iteration
};

/// Full optimization loop: iterate until max_iterations or until the global
/// best improves by less than stall_rel_tol (relative) over the stall window.
PsoResult pso_run(std::uint64_t master_seed, const PsoParams& params, int num_dbs,
                  const Region3D& region, const CostFn& cost, int workers = 1);

}  // namespace dbsplace
