#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "dbsplace/errors.hpp"
#include "dbsplace/rap.hpp"
#include "dbsplace/rates.hpp"

namespace dbsplace {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct GridShape {
  int res = 0;        // G: values i/G per axis, i in [0, G]
  int dims = 0;       // 2 + N
  std::vector<int> stride;
  std::size_t cells = 0;

  explicit GridShape(int grid_res, int num_dbs) : res(grid_res), dims(2 + num_dbs) {
    stride.assign(dims, 1);
    cells = 1;
    for (int d = dims - 1; d >= 0; --d) {
      stride[d] = static_cast<int>(cells);
      cells *= static_cast<std::size_t>(res + 1);
    }
  }

  std::size_t index(const std::vector<int>& idx) const {
    std::size_t flat = 0;
    for (int d = 0; d < dims; ++d) flat += static_cast<std::size_t>(idx[d]) * stride[d];
    return flat;
  }

  bool advance(std::vector<int>& idx) const {
    for (int d = dims - 1; d >= 0; --d) {
      if (++idx[d] <= res) return true;
      idx[d] = 0;
    }
    return false;
  }
};

struct Candidate {
  double b = 0.0;
  double p = 0.0;
  std::vector<double> tau;
  double rate = 0.0;
  double gap = kInf;  // infinite when infeasible
};

// Evaluate one grid choice for one terminal. Over-provisioned candidates are
// scaled down the (b, p) ray to land exactly on the rate cap (the direct rate
// is 1-homogeneous, so the scaling is exact); candidates whose backhaul cannot
// carry the resulting rate are infeasible.
Candidate evaluate(const Scenario& sc, const ChannelGains& gains,
                   std::span<const double> S_D, int k, double b, double p,
                   std::vector<double> tau) {
  const double n0 = sc.radio.noise_psd_w_per_hz;
  const double rT = sc.radio.target_rate_bps;
  Candidate c;
  c.tau = std::move(tau);
  double relay = 0.0;
  for (int j = 0; j < sc.num_dbs; ++j) {
    relay += c.tau[j] *
             direct_rate_bps({sc.radio.dbs_bandwidth_hz, sc.radio.dbs_power_w,
                              gains.g2[k][j], n0});
  }
  double direct = direct_rate_bps({b, p, gains.a2[k], n0});
  double rate = direct + relay;
  if (rate > rT) {
    if (relay > rT * (1.0 + 1e-12)) return c;  // cap unreachable from this tau row
    if (direct > 0.0) {
      const double s = (rT - relay) / direct;
      b *= s;
      p *= s;
      direct *= s;
    }
    rate = direct + relay;
  }
  for (int j = 0; j < sc.num_dbs; ++j) {
    if (c.tau[j] <= 0.0) continue;
    const double cap = direct_rate_bps({b, p, gains.h2[j], n0});
    if (rate > cap + 1e-9 * std::max(rT, 1.0)) return c;
  }
  c.b = b;
  c.p = p;
  c.rate = rate;
  c.gap = std::max(0.0, rT - rate);
  return c;
}

std::vector<double> tau_values(std::span<const double> S_D, const std::vector<int>& t, int res) {
  std::vector<double> tau(t.size());
  for (std::size_t j = 0; j < t.size(); ++j) {
    tau[j] = S_D[j] * static_cast<double>(t[j]) / static_cast<double>(res);
  }
  return tau;
}

OracleResult equal_split(const Scenario& sc, const ChannelGains& gains,
                         std::span<const double> S_D) {
  const int K = sc.num_terminals;
  OracleResult out;
  out.allocation.bandwidth_hz.assign(K, 0.0);
  out.allocation.power_w.assign(K, 0.0);
  out.allocation.tau.assign(K, std::vector<double>(sc.num_dbs, 0.0));
  out.allocation.rate_bps.assign(K, 0.0);
  for (int k = 0; k < K; ++k) {
    std::vector<double> tau(static_cast<std::size_t>(sc.num_dbs), 0.0);
    for (int j = 0; j < sc.num_dbs; ++j) tau[j] = S_D[j] / K;
    Candidate c = evaluate(sc, gains, S_D, k, sc.radio.total_bandwidth_hz / K,
                           sc.radio.total_power_w / K, tau);
    if (!std::isfinite(c.gap)) {
      // Equal split with an undecodable backhaul: drop the relay share.
      c = evaluate(sc, gains, S_D, k, sc.radio.total_bandwidth_hz / K,
                   sc.radio.total_power_w / K,
                   std::vector<double>(static_cast<std::size_t>(sc.num_dbs), 0.0));
    }
    out.allocation.bandwidth_hz[k] = c.b;
    out.allocation.power_w[k] = c.p;
    out.allocation.tau[k] = c.tau;
    out.allocation.rate_bps[k] = c.rate;
    out.objective_bps += c.gap;
  }
  return out;
}

}  // namespace

OracleResult brute_force_rap(const Scenario& scenario, const ChannelGains& gains,
                             std::span<const double> airtime_shares, int grid_res) {
  const int K = scenario.num_terminals;
  const int N = scenario.num_dbs;
  if (grid_res < 1) throw SolverError("oracle grid_res must be >= 1");
  if (K > 3 || N > 2) throw SolverError("oracle instance too large: requires K <= 3, N <= 2");
  if (grid_res == 1) return equal_split(scenario, gains, airtime_shares);

  const GridShape shape(grid_res, N);
  if (shape.cells > 2'500'000) throw SolverError("oracle instance too large: grid cell cap");
  if (K == 3 && shape.cells * shape.cells > 200'000'000ull) {
    throw SolverError("oracle instance too large: K=3 convolution cap");
  }

  const double B0 = scenario.radio.total_bandwidth_hz;
  const double P0 = scenario.radio.total_power_w;

  // Per-terminal gap for every exact grid choice.
  std::vector<std::vector<double>> gap_table(
      static_cast<std::size_t>(K), std::vector<double>(shape.cells, kInf));
  {
    std::vector<int> idx(static_cast<std::size_t>(shape.dims), 0);
    do {
      const double b = B0 * idx[0] / grid_res;
      const double p = P0 * idx[1] / grid_res;
      const std::vector<int> t(idx.begin() + 2, idx.end());
      const std::size_t flat = shape.index(idx);
      for (int k = 0; k < K; ++k) {
        gap_table[k][flat] =
            evaluate(scenario, gains, airtime_shares, k, b, p,
                     tau_values(airtime_shares, t, grid_res)).gap;
      }
    } while (shape.advance(idx));
  }

  // best_tail[cell] = best total gap of terminals k..K-1 within that budget.
  // The last terminal's table is the running prefix-min of its gaps; middle
  // terminals (K = 3) need the full budget convolution.
  auto prefix_min = [&shape](std::vector<double>& table) {
    for (int d = 0; d < shape.dims; ++d) {
      std::vector<int> idx(static_cast<std::size_t>(shape.dims), 0);
      do {
        if (idx[d] > 0) {
          const std::size_t flat = shape.index(idx);
          table[flat] = std::min(table[flat], table[flat - static_cast<std::size_t>(shape.stride[d])]);
        }
      } while (shape.advance(idx));
    }
  };

  std::vector<std::vector<double>> best_tail(static_cast<std::size_t>(K));
  best_tail[K - 1] = gap_table[K - 1];
  prefix_min(best_tail[K - 1]);
  for (int k = K - 2; k >= 1; --k) {
    best_tail[k].assign(shape.cells, kInf);
    std::vector<int> budget(static_cast<std::size_t>(shape.dims), 0);
    do {
      const std::size_t bflat = shape.index(budget);
      double best = kInf;
      std::vector<int> choice(static_cast<std::size_t>(shape.dims), 0);
      do {
        bool fits = true;
        for (int d = 0; d < shape.dims && fits; ++d) fits = choice[d] <= budget[d];
        if (fits) {
          std::vector<int> left(static_cast<std::size_t>(shape.dims));
          for (int d = 0; d < shape.dims; ++d) left[d] = budget[d] - choice[d];
          const double v = gap_table[k][shape.index(choice)] + best_tail[k + 1][shape.index(left)];
          best = std::min(best, v);
        }
      } while (shape.advance(choice));
      best_tail[k][bflat] = best;
    } while (shape.advance(budget));
  }

  // Head terminal only needs the full budget; then walk the chain back down
  // to recover the arg-minimizing choices.
  const std::vector<int> full(static_cast<std::size_t>(shape.dims), grid_res);
  double best_total = kInf;
  std::vector<int> best_choice(static_cast<std::size_t>(shape.dims), 0);
  {
    std::vector<int> choice(static_cast<std::size_t>(shape.dims), 0);
    do {
      double v = gap_table[0][shape.index(choice)];
      if (K > 1) {
        std::vector<int> left(static_cast<std::size_t>(shape.dims));
        for (int d = 0; d < shape.dims; ++d) left[d] = full[d] - choice[d];
        v += best_tail[1][shape.index(left)];
      }
      if (v < best_total) {
        best_total = v;
        best_choice = choice;
      }
    } while (shape.advance(choice));
  }
  if (!std::isfinite(best_total)) {
    throw SolverError("oracle found no feasible grid point");
  }

  OracleResult out;
  out.allocation.bandwidth_hz.assign(K, 0.0);
  out.allocation.power_w.assign(K, 0.0);
  out.allocation.tau.assign(K, std::vector<double>(N, 0.0));
  out.allocation.rate_bps.assign(K, 0.0);
  out.objective_bps = best_total;

  std::vector<int> budget = full;
  std::vector<int> choice = best_choice;
  for (int k = 0; k < K; ++k) {
    if (k > 0) {
      // argmin over choices within the remaining budget
      double best = kInf;
      std::vector<int> probe(static_cast<std::size_t>(shape.dims), 0);
      std::vector<int> found(static_cast<std::size_t>(shape.dims), 0);
      do {
        bool fits = true;
        for (int d = 0; d < shape.dims && fits; ++d) fits = probe[d] <= budget[d];
        if (!fits) continue;
        double v = gap_table[k][shape.index(probe)];
        if (k + 1 < K) {
          std::vector<int> left(static_cast<std::size_t>(shape.dims));
          for (int d = 0; d < shape.dims; ++d) left[d] = budget[d] - probe[d];
          v += best_tail[k + 1][shape.index(left)];
        }
        if (v < best) {
          best = v;
          found = probe;
        }
      } while (shape.advance(probe));
      choice = found;
    }
    const std::vector<int> t(choice.begin() + 2, choice.end());
    Candidate c = evaluate(scenario, gains, airtime_shares, k, B0 * choice[0] / grid_res,
                           P0 * choice[1] / grid_res,
                           tau_values(airtime_shares, t, grid_res));
    out.allocation.bandwidth_hz[k] = c.b;
    out.allocation.power_w[k] = c.p;
    out.allocation.tau[k] = c.tau;
    out.allocation.rate_bps[k] = c.rate;
    for (int d = 0; d < shape.dims; ++d) budget[d] -= choice[d];
  }
  return out;
}

}  // namespace dbsplace
