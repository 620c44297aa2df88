#include <cmath>
#include <doctest.h>

#include "dbsplace/coexistence.hpp"
#include "dbsplace/errors.hpp"
#include "support/coex_oracle.hpp"

using namespace dbsplace;

TEST_SUITE_BEGIN("coexistence");

namespace {
CoexistenceSolution solve(int omega, int m, int aps, int gamma) {
  WifiParams p;
  p.omega = omega;
  p.max_stage = m;
  p.num_aps = aps;
  p.cw_dbs = gamma;
  return solve_fixed_point(p);
}
}  // namespace

TEST_CASE("residuals of the four equations vanish at every solution") {
  for (int aps : {1, 5, 10, 20}) {
    for (int gamma : {1, 2, 4, 8, 16, 64}) {
      const CoexistenceSolution s = solve(16, 3, aps, gamma);
      WifiParams p;
      p.num_aps = aps;
      p.cw_dbs = gamma;
      const auto r = coexistence_residuals(p, s.delta_w, s.delta_d, s.c_w, s.c_d);
      for (double v : r) CHECK(std::abs(v) < 1e-10);
      CHECK(s.max_residual < 1e-10);
    }
  }
}

TEST_CASE("solution fields are probabilities and the airtime identity holds") {
  for (int gamma : {1, 3, 6, 32, 128}) {
    const CoexistenceSolution s = solve(16, 3, 10, gamma);
    for (double v : {s.delta_w, s.delta_d, s.c_w, s.c_d, s.airtime}) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
    CHECK(s.airtime == s.delta_d * std::pow(1.0 - s.delta_w, 10));
    CHECK(airtime(s) == s.airtime);
  }
}

TEST_CASE("solver matches the independent bisection oracle") {
  for (int aps : {1, 2, 5, 10, 20}) {
    for (int gamma : {1, 2, 4, 6, 16}) {
      const CoexistenceSolution s = solve(16, 3, aps, gamma);
      const coex_oracle::Point o = coex_oracle::solve(16, 3, aps, gamma);
      CHECK(s.delta_w == doctest::Approx(o.delta_w).epsilon(1e-6));
      CHECK(s.delta_d == doctest::Approx(o.delta_d).epsilon(1e-6));
      CHECK(s.c_w == doctest::Approx(o.c_w).epsilon(1e-6));
      CHECK(s.c_d == doctest::Approx(o.c_d).epsilon(1e-6));
    }
  }
}

TEST_CASE("frozen single-AP point") {
  // One AP makes the system symmetric: c_w collapses to delta_d and c_d to
  // delta_w. Values recorded from the bisection oracle.
  const CoexistenceSolution s = solve(16, 3, 1, 16);
  CHECK(s.delta_w == doctest::Approx(0.10630918903504313).epsilon(1e-9));
  CHECK(s.delta_d == doctest::Approx(0.09286453856220461).epsilon(1e-9));
  CHECK(s.c_w == doctest::Approx(s.delta_d).epsilon(1e-10));
  CHECK(s.c_d == doctest::Approx(s.delta_w).epsilon(1e-10));
}

TEST_CASE("wifi collision probability is nonincreasing in the DBS window") {
  for (int aps : {1, 5, 10, 20}) {
    double prev = 1.0;
    for (int gamma = 1; gamma <= 128; ++gamma) {
      const double cw = solve(16, 3, aps, gamma).c_w;
      CHECK(cw <= prev + 1e-12);
      prev = cw;
    }
  }
}

TEST_CASE("wifi collision probability is nondecreasing in the AP count") {
  for (int gamma : {2, 6, 32}) {
    double prev = 0.0;
    for (int aps = 1; aps <= 24; ++aps) {
      const double cw = solve(16, 3, aps, gamma).c_w;
      CHECK(cw >= prev - 1e-12);
      prev = cw;
    }
  }
}

TEST_CASE("ten APs with cap 0.5 need a window of six") {
  const int g = optimize_cw(16, 3, 10, 0.5);
  CHECK(g >= 5);
  CHECK(g <= 7);
  CHECK(g == 6);
}

TEST_CASE("a vacuous cap is met by the smallest window") {
  CHECK(optimize_cw(16, 3, 10, 1.0) == 1);
}

TEST_CASE("optimizer agrees with the oracle sweep") {
  const int got = optimize_cw(16, 3, 3, 0.3);
  const int want = coex_oracle::sweep_min_gamma(16, 3, 3, 0.3, 64);
  REQUIRE(want > 0);
  CHECK(got == want);
}

TEST_CASE("caps below the Wi-Fi self-collision floor are infeasible") {
  CHECK_THROWS_AS(optimize_cw(16, 3, 10, 0.01), SolverError);
}

TEST_CASE("degenerate airtime cases") {
  // delta_d = 0 kills the share; delta_w = 0 leaves it untouched.
  CoexistenceSolution s;
  s.delta_d = 0.0;
  s.delta_w = 0.3;
  s.airtime = s.delta_d * std::pow(1.0 - s.delta_w, 5);
  CHECK(airtime(s) == 0.0);
  s.delta_d = 0.42;
  s.delta_w = 0.0;
  s.airtime = s.delta_d;
  CHECK(airtime(s) == 0.42);
}

TEST_CASE("invalid parameters are rejected") {
  WifiParams p;
  p.omega = 1;
  CHECK_THROWS_AS(solve_fixed_point(p), SolverError);
  p.omega = 16;
  p.num_aps = 0;
  CHECK_THROWS_AS(solve_fixed_point(p), SolverError);
}

TEST_SUITE_END();
