#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace swabsim {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Deterministic random stream. Distributions are implemented here rather
/// than with std:: distribution objects so the produced sequence does not
/// depend on the standard library implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), gen_(splitmix64(seed)) {}

  /// Independent child stream; (seed, salt) fully determines it no matter
  /// how much the parent has been consumed.
  Rng child(std::uint64_t salt) const {
    return Rng(splitmix64(seed_ ^ splitmix64(salt ^ 0xa02fb3c8d1e64957ULL)));
  }

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform in [0, 1) with 53 bits of mantissa.
  double uniform01() { return (next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Standard normal via Box-Muller (cosine branch only).
  double normal() {
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  double normal(double mean, double sigma) { return mean + sigma * normal(); }

 private:
  std::uint64_t seed_;
  std::mt19937_64 gen_;
};

}  // namespace swabsim
