// intentforge/rng.hpp
//
// Seeded randomness with pinned, platform-independent draw procedures.
// Every stochastic step in the library (shuffles, k-means++ sampling,
// synonym augmentation) goes through Rng so that a seed fully determines
// the output on any platform / standard library.

#ifndef INTENTFORGE_RNG_HPP
#define INTENTFORGE_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace intentforge {

// Pinned 64-bit mixer (splitmix64). Used to derive stage and per-k seeds
// from a single run seed.
inline uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Derived seed for a sub-stream identified by `stream` (e.g. a k value).
inline uint64_t mix_seed(uint64_t seed, uint64_t stream) {
  return splitmix64(seed ^ splitmix64(stream));
}

class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}

  uint64_t next_u64() { return eng_(); }

  // Uniform double in [0, 1). 53 random bits.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, n). Modulo reduction; the bias is irrelevant at
  // the bounds used here and the procedure is identical everywhere.
  uint64_t uniform_below(uint64_t n) { return next_u64() % n; }

  // Standard normal via Box-Muller, one value per call pair.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  // Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(uniform_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 eng_;  // engine output is pinned by the standard
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace intentforge

#endif  // INTENTFORGE_RNG_HPP
