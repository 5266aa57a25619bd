#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace avsal {

// FNV-1a, used to derive named sub-stream seeds from a master seed.
inline uint64_t hash64(std::string_view s, uint64_t seed = 1469598103934665603ull) {
  uint64_t h = seed;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline uint64_t substream_seed(uint64_t master, std::string_view name) {
  uint64_t h = hash64(name);
  // splitmix64 finalizer over master ^ h
  uint64_t z = master ^ h;
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// mt19937_64 with hand-rolled distributions so streams are identical across
// standard library implementations.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}
  Rng(uint64_t master, std::string_view stream) : engine_(substream_seed(master, stream)) {}

  uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n), n > 0. Rejection-free modulo is fine here.
  uint64_t below(uint64_t n) { return engine_() % n; }

  int range(int lo, int hi) {  // inclusive ends
    return lo + static_cast<int>(below(static_cast<uint64_t>(hi - lo + 1)));
  }

  // Marsaglia polar method.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    have_spare_ = true;
    return u * m;
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace avsal
