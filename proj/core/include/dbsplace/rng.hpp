#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace dbsplace {

/// Deterministic, label-derived random stream.
///
/// Every consumer derives its own stream from the single master seed and a
/// fixed string label, so adding a new randomized module never perturbs the
/// draws seen by existing ones. Uniform doubles are produced from the raw
/// 64-bit output (top 53 bits), not through std::uniform_real_distribution,
/// so sequences are identical across standard-library implementations.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::string_view label)
      : gen_(derive_seed(master_seed, label)) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  /// Uniform in [lo, hi). Degenerate intervals return lo.
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  static std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view label) {
    // FNV-1a over the label, then SplitMix64 finalization mixed with the master.
    std::uint64_t h = 1469598103934665603ull;
    for (char c : label) {
      h ^= static_cast<unsigned char>(c);
      h *= 1099511628211ull;
    }
    std::uint64_t z = master_seed + 0x9e3779b97f4a7c15ull * (h | 1ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace dbsplace
