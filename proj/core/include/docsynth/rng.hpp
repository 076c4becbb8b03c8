#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>

namespace docsynth {

/// SplitMix64 finalizer. Used to derive independent stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of sample `index` under `master_seed`: the index-th output of a
/// SplitMix64 stream started at `master_seed`. Independent of scheduling.
constexpr std::uint64_t sample_seed(std::uint64_t master_seed, std::uint64_t index) noexcept {
  return splitmix64(master_seed + index * 0x9e3779b97f4a7c15ULL);
}

/// Seeded random stream.
///
/// Wraps std::mt19937_64 (whose output sequence is fixed by the standard) and
/// converts raw draws to floats and ranges with explicit arithmetic instead of
/// the <random> distributions, whose algorithms differ between standard
/// libraries. Datasets are therefore byte-reproducible across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [lo, hi], inclusive.
  int uniform_int(int lo, int hi);
  /// Uniform index in [0, n). n must be positive.
  std::size_t index(std::size_t n);
  bool bernoulli(double p) { return uniform() < p; }
  /// Standard normal via Box-Muller.
  double normal();
  /// Index drawn proportionally to non-negative weights; -1 if all are zero.
  int weighted(std::span<const double> weights);

  /// Independent child stream; consumes one draw from this stream.
  Rng split() { return Rng(next_u64()); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace docsynth
