#include <cmath>
#include <doctest.h>
#include <vector>

#include "dbsplace/pso.hpp"

using namespace dbsplace;

TEST_SUITE_BEGIN("pso");

namespace {

const Region3D kRegion{-1.0, 1.0, -1.0, 1.0, 0.1, 0.4};

double distance_to(const std::vector<Vec3>& w, const Vec3& target) {
  return distance_km(w.at(0), target);
}

PsoParams quick_params(int iters) {
  PsoParams p;
  p.num_particles = 8;
  p.max_iterations = iters;
  return p;
}

}  // namespace

TEST_CASE("initial swarm lies inside the region with bounded velocities") {
  const CostFn cost = [](const std::vector<Vec3>& w) { return w[0].norm(); };
  auto streams = particle_streams(5, 12);
  SwarmState s = init_swarm(streams, 3, kRegion, cost);
  REQUIRE(s.particles.size() == 12);
  for (const Particle& particle : s.particles) {
    for (const Vec3& w : particle.positions) CHECK(kRegion.contains(w));
    for (const Vec3& v : particle.velocity) {
      CHECK(std::abs(v.x) <= kRegion.x_width());
      CHECK(std::abs(v.y) <= kRegion.y_width());
      CHECK(std::abs(v.z) <= kRegion.z_width());
      CHECK(std::abs(v.z) <= 0.3);
    }
    CHECK(particle.best_positions == particle.positions);
  }
}

TEST_CASE("single particle seeds the global best") {
  const CostFn cost = [](const std::vector<Vec3>& w) { return w[0].x; };
  auto streams = particle_streams(9, 1);
  SwarmState s = init_swarm(streams, 1, kRegion, cost);
  CHECK(s.global_cost == s.particles[0].best_cost);
  CHECK(s.global_best == s.particles[0].best_positions);
}

TEST_CASE("a particle at the shared best with zero velocity does not move") {
  const CostFn cost = [](const std::vector<Vec3>& w) { return w[0].norm(); };
  auto streams = particle_streams(2, 1);
  SwarmState s = init_swarm(streams, 1, kRegion, cost);
  Particle& particle = s.particles[0];
  particle.positions = {{0.25, -0.5, 0.2}};
  particle.velocity = {{0.0, 0.0, 0.0}};
  particle.best_positions = particle.positions;
  particle.best_cost = cost(particle.positions);
  s.global_best = particle.positions;
  s.global_cost = particle.best_cost;
  pso_step(s, streams, kRegion, cost, quick_params(1));
  CHECK(s.particles[0].positions[0] == Vec3{0.25, -0.5, 0.2});
}

TEST_CASE("zero coefficients freeze the swarm after one velocity decay") {
  PsoParams p = quick_params(1);
  p.inertia = 0.0;
  p.accel_personal = 0.0;
  p.accel_social = 0.0;
  const CostFn cost = [](const std::vector<Vec3>& w) { return w[0].norm(); };
  auto streams = particle_streams(4, 3);
  SwarmState s = init_swarm(streams, 2, kRegion, cost);
  // First step may still move by the initial velocity; afterwards V == 0.
  pso_step(s, streams, kRegion, cost, p);
  pso_step(s, streams, kRegion, cost, p);
  const auto frozen = s.particles[1].positions;
  pso_step(s, streams, kRegion, cost, p);
  CHECK(s.particles[1].positions == frozen);
}

TEST_CASE("boundary exit clamps the coordinate and zeroes its velocity") {
  const CostFn cost = [](const std::vector<Vec3>&) { return 1.0; };
  auto streams = particle_streams(6, 1);
  SwarmState s = init_swarm(streams, 1, kRegion, cost);
  Particle& particle = s.particles[0];
  particle.positions = {{0.0, 0.0, 0.39}};
  particle.velocity = {{0.0, 0.0, 0.1}};
  particle.best_positions = particle.positions;
  s.global_best = particle.positions;
  PsoParams p = quick_params(1);
  p.inertia = 1.0;
  p.accel_personal = 0.0;
  p.accel_social = 0.0;
  pso_step(s, streams, kRegion, cost, p);
  CHECK(s.particles[0].positions[0].z == 0.4);
  CHECK(s.particles[0].velocity[0].z == 0.0);
}

TEST_CASE("positions stay inside the region through a whole run") {
  const CostFn cost = [](const std::vector<Vec3>& w) {
    return distance_to(w, {0.7, 0.7, 0.12});
  };
  PsoParams p = quick_params(40);
  const PsoResult r = pso_run(11, p, 2, kRegion, cost);
  for (const PositionRecord& rec : r.position_trace) CHECK(kRegion.contains(rec.pos));
}

TEST_CASE("global best trace is monotone nonincreasing") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const CostFn cost = [](const std::vector<Vec3>& w) { return distance_to(w, {0.3, -0.2, 0.25}); };
    const PsoResult r = pso_run(seed, quick_params(60), 1, kRegion, cost);
    for (std::size_t t = 1; t < r.cost_trace.size(); ++t) {
      CHECK(r.cost_trace[t] <= r.cost_trace[t - 1]);
    }
  }
}

TEST_CASE("constant cost stalls at the window") {
  PsoParams p = quick_params(200);
  p.stall_window = 20;
  const CostFn cost = [](const std::vector<Vec3>&) { return 42.0; };
  const PsoResult r = pso_run(3, p, 1, kRegion, cost);
  CHECK(r.stalled);
  CHECK(r.iterations == 20);
  CHECK(r.best_cost == 42.0);
}

TEST_CASE("synthetic benchmark converges to the target point") {
  const Vec3 target{0.3, -0.2, 0.25};
  PsoParams p;
  p.num_particles = 20;
  p.max_iterations = 200;
  p.stall_window = 200;  // run the full budget
  int hits = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const CostFn cost = [&](const std::vector<Vec3>& w) { return distance_to(w, target); };
    const PsoResult r = pso_run(seed, p, 1, kRegion, cost);
    if (r.best_cost < 0.01) ++hits;
  }
  CHECK(hits >= 19);
}

TEST_CASE("same seed reproduces the whole trace, independent of workers") {
  const CostFn cost = [](const std::vector<Vec3>& w) { return distance_to(w, {0.0, 0.0, 0.3}); };
  const PsoResult a = pso_run(21, quick_params(30), 2, kRegion, cost, 1);
  const PsoResult b = pso_run(21, quick_params(30), 2, kRegion, cost, 4);
  CHECK(a.best_cost == b.best_cost);
  CHECK(a.cost_trace == b.cost_trace);
  REQUIRE(a.position_trace.size() == b.position_trace.size());
  for (std::size_t i = 0; i < a.position_trace.size(); ++i) {
    CHECK(a.position_trace[i].pos == b.position_trace[i].pos);
  }
}

TEST_CASE("without the social term particles are independent") {
  PsoParams p = quick_params(25);
  p.accel_social = 0.0;
  p.num_particles = 3;
  p.stall_window = 1000;
  const CostFn cost = [](const std::vector<Vec3>& w) { return distance_to(w, {0.1, 0.1, 0.2}); };
  const PsoResult together = pso_run(33, p, 1, kRegion, cost);
  // Each particle's stream depends only on its own index, so three
  // single-particle swarms with matched streams replay the same trajectories.
  double best = 1e300;
  for (int l = 0; l < 3; ++l) {
    std::vector<RngStream> solo_stream;
    solo_stream.emplace_back(33, "pso/p" + std::to_string(l));
    SwarmState solo = init_swarm(solo_stream, 1, kRegion, cost);
    for (int t = 0; t < 25; ++t) pso_step(solo, solo_stream, kRegion, cost, p);
    best = std::min(best, solo.global_cost);
  }
  CHECK(together.best_cost == doctest::Approx(best).epsilon(1e-12));
}

TEST_SUITE_END();
