#pragma once

#include <cstdint>
#include <random>

namespace lanesafe {

/// SplitMix64 finalizer. Used as a counter-based splitter so that one master
/// seed yields independent, reproducible child seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Child seed number `stream` of `master`.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept {
  return splitmix64(splitmix64(master) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

/// Named streams carved out of a master seed.
struct SeedSet {
  std::uint64_t master = 0;
  std::uint64_t env = 0;
  std::uint64_t net_init = 0;
  std::uint64_t sampling = 0;

  static SeedSet from_master(std::uint64_t master) noexcept {
    return {master, derive_seed(master, 1), derive_seed(master, 2), derive_seed(master, 3)};
  }
};

/// Thin wrapper over a 64-bit Mersenne Twister with the two draws the agent needs.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  double normal() { return normal_(engine_); }
  /// Uniform in [0, 1).
  double uniform() { return uniform_(engine_); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::uint64_t next_u64() { return engine_(); }
  /// Uniform integer in [0, n).
  std::size_t index(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
  }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace lanesafe
