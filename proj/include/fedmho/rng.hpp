#pragma once

#include <cstdint>
#include <vector>

namespace fedmho {

// All randomness in the simulator flows through this generator so that a run
// is fully determined by its seeds. Distributions are implemented here rather
// than taken from <random> because the standard leaves their algorithms
// unspecified across library versions.
class Rng {
public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();

  // Uniform double in [0, 1).
  double uniform();

  // Uniform double in [lo, hi).
  double uniform(double lo, double hi);

  // Standard normal via Box-Muller (two uniforms per call, no cached spare).
  double normal();

  // Uniform integer in [0, n). n must be > 0.
  std::uint64_t bounded(std::uint64_t n);

  // Gamma(alpha, 1) via Marsaglia-Tsang; alpha > 0.
  double gamma(double alpha);

  // Symmetric Dirichlet(alpha, ..., alpha) of dimension k.
  std::vector<double> dirichlet(double alpha, std::size_t k);

  // Fisher-Yates.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(bounded(i));
      std::swap(v[i - 1], v[j]);
    }
  }

private:
  std::uint64_t state_[4];  // xoshiro256++
};

// Seed chain: every stage of a run derives its generator as
// mix_seed(parent_seed, tag [, index]). Tags live in seed_tags.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag);
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag, std::uint64_t index);

namespace seed_tags {
inline constexpr std::uint64_t kModelInit = 0x01;
inline constexpr std::uint64_t kPartition = 0x02;
inline constexpr std::uint64_t kClient = 0x03;
inline constexpr std::uint64_t kGenerate = 0x04;
inline constexpr std::uint64_t kFusion = 0x05;
inline constexpr std::uint64_t kBaselineInit = 0x06;
inline constexpr std::uint64_t kDatasetNoise = 0x07;
inline constexpr std::uint64_t kDatasetCenters = 0x08;
}  // namespace seed_tags

}  // namespace fedmho
