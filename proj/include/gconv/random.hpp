#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace gconv {

// Seeded 64-bit generator with distribution code written out explicitly, so
// streams do not depend on the standard library's distribution classes.
class Rng {
 public:
  static constexpr std::string_view kAlgorithm = "mt19937_64";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  bool bernoulli(double p) { return uniform() < p; }

  // Standard normal (Box-Muller; the second variate of each pair is cached).
  double normal();

  // Uniform integer in [0, bound), rejection-sampled. bound > 0.
  std::uint64_t below(std::uint64_t bound);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// SplitMix64 finalizer over (base, index); gives independent per-cell seeds.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

}  // namespace gconv
