#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace roomforge {

// Seeded generator wrapper. All distributions are implemented by hand so a
// given seed reproduces the same stream regardless of standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), gen_(mix(seed)) {}

  std::uint64_t raw() { return gen_(); }

  // uniform in [0, 1) with 53 bits of randomness
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // uniform integer in [lo, hi], rejection sampled to avoid modulo bias
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (span == 0) return static_cast<std::int64_t>(gen_());
    const std::uint64_t limit = std::uint64_t(-1) - std::uint64_t(-1) % span;
    std::uint64_t r = gen_();
    while (r >= limit) r = gen_();
    return lo + static_cast<std::int64_t>(r % span);
  }

  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>(uniform_int(0, static_cast<std::int64_t>(n) - 1));
  }

  bool bernoulli(double p) { return uniform01() < p; }

  // standard normal via Box-Muller, second value cached
  double normal() {
    if (has_cache_) {
      has_cache_ = false;
      return cache_;
    }
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * 3.14159265358979323846 * u2;
    cache_ = r * std::sin(a);
    has_cache_ = true;
    return r * std::cos(a);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  // weighted index draw; weights need not be normalized
  template <typename Container>
  std::size_t weighted_index(const Container& weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    double u = uniform01() * total;
    std::size_t i = 0;
    const std::size_t last = weights.size() - 1;
    for (double w : weights) {
      if (u < w || i == last) return i;
      u -= w;
      ++i;
    }
    return last;
  }

  // independent child stream, stable under calls on the parent
  [[nodiscard]] Rng derive(std::uint64_t salt) const {
    return Rng(mix(seed_ ^ mix(salt + 0x9e3779b97f4a7c15ULL)));
  }

  [[nodiscard]] std::uint64_t seed() const { return seed_; }

  static std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 gen_;
  double cache_ = 0.0;
  bool has_cache_ = false;
};

}  // namespace roomforge
