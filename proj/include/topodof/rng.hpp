#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

namespace topodof {

// splitmix64: the 64-bit mixing generator from Steele, Lea & Flood's
// "Fast splittable pseudorandom number generators". Tiny state, fully
// specified here so streams are reproducible independent of the standard
// library. Sub-streams for parallel work are derived with mix() so that
// serial and fanned-out runs agree.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double uniform() { return double(next() >> 11) * 0x1.0p-53; }

  // Uniform in [0, n).
  std::uint64_t below(std::uint64_t n) { return next() % n; }

  // Standard real Gaussian via Box-Muller (no library distribution, so the
  // stream layout is pinned by this header).
  double gaussian() {
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  // Standard complex Gaussian CN(0,1): real and imaginary parts are
  // independent N(0, 1/2).
  std::complex<double> complex_gaussian() {
    double re = gaussian() * M_SQRT1_2;
    double im = gaussian() * M_SQRT1_2;
    return {re, im};
  }

  // Derives a decorrelated child seed for stream index `index`.
  static std::uint64_t mix(std::uint64_t seed, std::uint64_t index) {
    SplitMix64 g(seed ^ (0x632BE59BD9B4E019ULL * (index + 1)));
    return g.next();
  }

 private:
  std::uint64_t state_;
};

}  // namespace topodof
