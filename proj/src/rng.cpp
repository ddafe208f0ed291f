#include "fedmho/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fedmho {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace

Rng::Rng(std::uint64_t seed) {
  std::uint64_t s = seed;
  for (auto& word : state_) {
    word = splitmix64(s);
  }
}

std::uint64_t Rng::next_u64() {
  std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
  std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform();
}

double Rng::normal() {
  double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
  double u2 = uniform();
  double radius = std::sqrt(-2.0 * std::log(u1));
  return radius * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t Rng::bounded(std::uint64_t n) {
  if (n == 0) {
    throw std::invalid_argument("Rng::bounded: n must be positive");
  }
  std::uint64_t threshold = (0ULL - n) % n;
  for (;;) {
    std::uint64_t r = next_u64();
    if (r >= threshold) {
      return r % n;
    }
  }
}

double Rng::gamma(double alpha) {
  if (alpha <= 0.0) {
    throw std::invalid_argument("Rng::gamma: alpha must be positive");
  }
  if (alpha < 1.0) {
    // Boost to alpha+1 and scale back.
    double g = gamma(alpha + 1.0);
    double u = 1.0 - uniform();
    return g * std::pow(u, 1.0 / alpha);
  }
  double d = alpha - 1.0 / 3.0;
  double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = normal();
    double v = 1.0 + c * x;
    if (v <= 0.0) {
      continue;
    }
    v = v * v * v;
    double u = 1.0 - uniform();
    double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) {
      return d * v;
    }
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) {
      return d * v;
    }
  }
}

std::vector<double> Rng::dirichlet(double alpha, std::size_t k) {
  if (k == 0) {
    throw std::invalid_argument("Rng::dirichlet: k must be positive");
  }
  std::vector<double> draws(k);
  double total = 0.0;
  for (auto& d : draws) {
    d = gamma(alpha);
    total += d;
  }
  if (total <= 0.0) {
    for (auto& d : draws) {
      d = 1.0 / static_cast<double>(k);
    }
    return draws;
  }
  for (auto& d : draws) {
    d /= total;
  }
  return draws;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag) {
  std::uint64_t s = seed ^ (0xa0761d6478bd642fULL * (tag + 1));
  std::uint64_t z = splitmix64(s);
  return splitmix64(s) ^ z;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag, std::uint64_t index) {
  return mix_seed(mix_seed(seed, tag), index + 0xe7037ed1a0b428dbULL);
}

}  // namespace fedmho
