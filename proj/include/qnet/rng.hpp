#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

namespace qnet {

// Deterministic, platform-independent randomness. One master seed per run;
// every trial / module derives its own stream with derive_seed(master, n),
// a counter-based split, so serial and parallel execution see identical
// streams.

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t counter) {
  std::uint64_t s = master ^ (0xA0761D6478BD642FULL * (counter + 1));
  return splitmix64(s);
}

// xoshiro256++ with splitmix-expanded seeding.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& w : s_) w = splitmix64(sm);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform on (0,1]; never returns 0 so logs are safe.
  double uniform() {
    const std::uint64_t bits = next_u64() >> 11;
    return (static_cast<double>(bits) + 1.0) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Unbiased integer in [0, bound).
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = bound * ((~std::uint64_t{0}) / bound);
    std::uint64_t v;
    do {
      v = next_u64();
    } while (v >= limit);
    return v % bound;
  }

  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u = uniform();
    const double v = uniform();
    const double r = std::sqrt(-2.0 * std::log(u));
    spare_ = r * std::sin(2.0 * M_PI * v);
    have_spare_ = true;
    return r * std::cos(2.0 * M_PI * v);
  }

  std::complex<double> complex_gaussian() { return {gaussian(), gaussian()}; }

  // Perturbed-uniform weights: p_i ∝ 1 + u_i with u_i ~ U(0,1). Bounded away
  // from zero (min ≥ 1/(2n)), which keeps sampled mixtures at full target rank.
  std::vector<double> mixture_weights(int n) {
    std::vector<double> w(n);
    double sum = 0.0;
    for (auto& x : w) {
      x = 1.0 + uniform();
      sum += x;
    }
    for (auto& x : w) x /= sum;
    return w;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t s_[4]{};
  double spare_ = 0.0;
  bool have_spare_ = false;
};

} // namespace qnet
