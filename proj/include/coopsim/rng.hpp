#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace coopsim {

// Deterministic splitmix64 stream. All randomness in the library flows
// through this type so results are bit-identical across platforms and
// thread counts; std::random distributions are implementation-defined
// and are deliberately avoided.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1)
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // uniform integer in [0, n), n > 0
  std::uint64_t below(std::uint64_t n) {
    // Lemire's multiply-shift with rejection
    std::uint64_t x = next_u64();
    __uint128_t m = static_cast<__uint128_t>(x) * n;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < n) {
      std::uint64_t t = (0 - n) % n;
      while (lo < t) {
        x = next_u64();
        m = static_cast<__uint128_t>(x) * n;
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  // standard normal via Box-Muller (no cached spare, keeps the stream
  // position a pure function of call count)
  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  int poisson(double lambda) {
    // Knuth; fine for the small lambdas used here
    double l = std::exp(-lambda);
    int k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= uniform();
    } while (p > l);
    return k - 1;
  }

 private:
  std::uint64_t state_;
};

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t hash_tag(std::string_view tag) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Named substream derivation: every stage draws from its own stream keyed
// by (seed, tag, ids) so stages are independently reproducible.
inline Rng substream(std::uint64_t seed, std::string_view tag,
                     std::uint64_t a = 0, std::uint64_t b = 0) {
  std::uint64_t s = mix64(seed ^ mix64(hash_tag(tag)));
  s = mix64(s ^ mix64(a + 0x9e3779b97f4a7c15ULL));
  s = mix64(s ^ mix64(b + 0x632be59bd9b4e019ULL));
  return Rng(s);
}

}  // namespace coopsim
