// Seeded random streams and deterministic seed derivation.
//
// All randomness in the library flows through RandomStream so that a trial is
// fully determined by its 64-bit seed. Distributions are implemented here
// (rather than via std::*_distribution) because the standard leaves their
// output unspecified; mt19937_64 itself is pinned by the standard.

#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace adaptsense {

// splitmix64 finalizer (Vigna / Steele et al.).
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Folds a master seed with a sequence of labels into a stream seed:
//   h = mix64(master); for each token: h = mix64(h ^ token)
// where integer tokens enter as-is and strings enter as fnv1a64(bytes).
// This scheme is recorded in every run manifest.
class SeedChain {
 public:
  explicit SeedChain(std::uint64_t master) : h_(mix64(master)) {}
  SeedChain& with(std::uint64_t v) {
    h_ = mix64(h_ ^ v);
    return *this;
  }
  SeedChain& with(std::string_view s) { return with(fnv1a64(s)); }
  std::uint64_t seed() const { return h_; }

 private:
  std::uint64_t h_;
};

class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  // uniform in [0, 1), 53-bit resolution
  double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  // uniform over {0, ..., n-1}, modulo-debiased
  int uniform_index(int n) {
    const std::uint64_t un = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % un;
    std::uint64_t x = eng_();
    while (x >= limit) x = eng_();
    return static_cast<int>(x % un);
  }

  // standard normal via Box-Muller, spare cached
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  // circularly-symmetric complex normal with total variance `variance`
  std::complex<double> complex_gaussian(double variance) {
    const double scale = std::sqrt(variance / 2.0);
    const double re = gaussian();
    const double im = gaussian();
    return {scale * re, scale * im};
  }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Inverse-CDF sampler over a fixed probability vector.
class CumulativePmf {
 public:
  explicit CumulativePmf(const std::vector<double>& pmf) : cum_(pmf) {
    double acc = 0.0;
    for (double& c : cum_) {
      acc += c;
      c = acc;
    }
    if (!cum_.empty()) cum_.back() = 1.0;
  }

  int draw(RandomStream& rng) const {
    const double u = rng.uniform01();
    std::size_t lo = 0, hi = cum_.size() - 1;
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (cum_[mid] <= u)
        lo = mid + 1;
      else
        hi = mid;
    }
    return static_cast<int>(lo);
  }

 private:
  std::vector<double> cum_;
};

}  // namespace adaptsense
