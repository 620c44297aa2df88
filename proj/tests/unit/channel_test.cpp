#include <cmath>
#include <doctest.h>
#include <numbers>

#include "dbsplace/channel.hpp"
#include "dbsplace/errors.hpp"
#include "dbsplace/rng.hpp"
#include "dbsplace/scenario.hpp"

using namespace dbsplace;

TEST_SUITE_BEGIN("channel");

TEST_CASE("hata path loss matches hand evaluation") {
  CHECK(hata_path_loss_db(1.0) == doctest::Approx(122.0).epsilon(1e-12));
  const double at_clamp = 122.0 + 38.0 * std::log10(0.05);
  CHECK(hata_path_loss_db(0.05) == doctest::Approx(at_clamp).epsilon(1e-12));
  CHECK(at_clamp == doctest::Approx(72.56).epsilon(1e-4));
}

TEST_CASE("hata clamps below 50 m") {
  CHECK(hata_path_loss_db(0.01) == hata_path_loss_db(0.05));
  CHECK(hata_path_loss_db(0.0) == hata_path_loss_db(0.05));
}

TEST_CASE("hata is nondecreasing in distance") {
  double prev = -1e30;
  for (double d = 0.0; d < 3.0; d += 0.01) {
    const double pl = hata_path_loss_db(d);
    CHECK(pl >= prev);
    prev = pl;
  }
}

TEST_CASE("los probability at 45 degrees") {
  EnvParams env;  // urban defaults 9.61 / 0.16
  const double p = los_probability(0.2, 0.2, env);
  const double expected = 1.0 / (1.0 + 9.61 * std::exp(-0.16 * (45.0 - 9.61)));
  CHECK(p == doctest::Approx(expected).epsilon(1e-12));
  CHECK(p == doctest::Approx(0.9677).epsilon(1e-4));
}

TEST_CASE("los probability overhead counts as 90 degrees") {
  EnvParams env;
  const double p = los_probability(0.3, 0.0, env);
  const double expected = 1.0 / (1.0 + env.alpha * std::exp(-env.beta * (90.0 - env.alpha)));
  CHECK(p == doctest::Approx(expected).epsilon(1e-12));
  CHECK(1.0 - p < 1e-4);
}

TEST_CASE("los probability floor at zero elevation") {
  EnvParams env;
  const double p = los_probability(0.0, 0.5, env);
  CHECK(p == doctest::Approx(1.0 / (1.0 + env.alpha * std::exp(env.beta * env.alpha)))
                 .epsilon(1e-12));
}

TEST_CASE("los probability strictly increases with altitude and stays in (0,1)") {
  EnvParams env;
  double prev = 0.0;
  for (double z = 0.05; z <= 2.0; z += 0.05) {
    const double p = los_probability(z, 0.4, env);
    CHECK(p > prev);
    CHECK(p > 0.0);
    CHECK(p < 1.0);
    prev = p;
  }
}

TEST_CASE("air-to-ground loss: free space plus averaged excess") {
  EnvParams env;
  const Vec3 ground{0.0, 0.0, 0.0};
  const Vec3 dbs{0.0, 0.0, 1.0};  // 1 km overhead
  const double d_m = 1000.0;
  const double fs = 20.0 * std::log10(4.0 * std::numbers::pi * 2e9 * d_m / kSpeedOfLightMps);
  const double p_los = los_probability(1.0, 0.0, env);
  const double expected = fs + p_los * env.loss_los_db + (1.0 - p_los) * env.loss_nlos_db;
  CHECK(atg_path_loss_db(ground, dbs, 2e9, env) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(fs == doctest::Approx(98.46).epsilon(1e-3));
  CHECK(atg_path_loss_db(ground, dbs, 2e9, env) == doctest::Approx(99.5).epsilon(2e-3));
}

TEST_CASE("excess loss endpoints") {
  EnvParams env;
  CHECK(atg_excess_loss_db(1.0, env) == env.loss_los_db);
  CHECK(atg_excess_loss_db(0.0, env) == env.loss_nlos_db);
}

TEST_CASE("air-to-ground loss rejects coincident points") {
  EnvParams env;
  const Vec3 p{0.1, 0.2, 0.3};
  CHECK_THROWS_AS(atg_path_loss_db(p, p, 2e9, env), SolverError);
}

TEST_CASE("gain of the 1 km Hata link") {
  Scenario sc;
  sc.num_terminals = 1;
  sc.num_dbs = 0;
  const std::vector<Vec3> terminals = {{1.0, 0.0, 0.0}};
  const ChannelGains g = gains(sc, terminals, {});
  CHECK(g.a2[0] == doctest::Approx(std::pow(10.0, -12.2)).epsilon(1e-12));
  CHECK(g.a2[0] == doctest::Approx(6.31e-13).epsilon(1e-3));
}

TEST_CASE("identical DBS positions give identical gain rows") {
  Scenario sc;
  sc.num_terminals = 3;
  sc.num_dbs = 2;
  const std::vector<Vec3> terminals = {{0.4, 0.1, 0.0}, {-0.7, 0.3, 0.0}, {0.0, -0.9, 0.0}};
  const std::vector<Vec3> dbs = {{0.2, 0.2, 0.25}, {0.2, 0.2, 0.25}};
  const ChannelGains g = gains(sc, terminals, dbs);
  CHECK(g.h2[0] == g.h2[1]);
  for (int k = 0; k < 3; ++k) CHECK(g.g2[k][0] == g.g2[k][1]);
}

TEST_CASE("gain decreases moving away at fixed altitude") {
  // Both loss components move the same way when the horizontal distance
  // grows: the elevation angle drops and the free-space distance grows.
  Scenario sc;
  sc.num_terminals = 1;
  const std::vector<Vec3> terminals = {{0.0, 0.0, 0.0}};
  double prev = 1.0;
  for (double dx = 0.01; dx < 1.0; dx += 0.02) {
    const ChannelGains g = gains(sc, terminals, std::vector<Vec3>{{dx, 0.0, 0.3}});
    CHECK(g.g2[0][0] < prev);
    prev = g.g2[0][0];
  }
}

TEST_CASE("all gains in (0, 1] over random geometries in the default regions") {
  Scenario sc;
  RngStream rng(99, "channel-test");
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Vec3> terminals(4);
    for (Vec3& t : terminals) {
      t = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), 0.0};
    }
    std::vector<Vec3> dbs(2);
    for (Vec3& d : dbs) {
      d = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(0.1, 0.4)};
    }
    sc.num_terminals = 4;
    sc.num_dbs = 2;
    const ChannelGains g = gains(sc, terminals, dbs);
    for (double v : g.a2) {
      CHECK(v > 0.0);
      CHECK(v <= 1.0);
    }
    for (double v : g.h2) {
      CHECK(v > 0.0);
      CHECK(v <= 1.0);
    }
    for (const auto& row : g.g2) {
      for (double v : row) {
        CHECK(v > 0.0);
        CHECK(v <= 1.0);
      }
    }
  }
}

TEST_SUITE_END();
