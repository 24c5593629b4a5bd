#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>

namespace dynmcda::des {

// SplitMix64 finaliser, used to derive well-separated seeds from small
// integers (replication index, stream purpose, ...).
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a) noexcept { return mix64(seed ^ mix64(a)); }

template <class... Rest>
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, Rest... rest) noexcept {
  return derive_seed(derive_seed(seed, a), static_cast<std::uint64_t>(rest)...);
}

// Reproducible sample source. The engine output of mt19937_64 is fixed by
// the standard; the transforms below are written out so samples do not
// depend on the standard library's distribution implementations.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t streamId)
      : seed_(seed), streamId_(streamId), engine_(derive_seed(seed, streamId)) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return streamId_; }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  bool bernoulli(double p) { return uniform() < p; }

  // Marsaglia polar method; the spare deviate is cached.
  double standard_normal() {
    if (hasSpare_) {
      hasSpare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    hasSpare_ = true;
    return u * f;
  }

 private:
  std::uint64_t seed_;
  std::uint64_t streamId_;
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool hasSpare_ = false;
};

// Inverse-CDF of Exp(rate) at u; u = 0 maps to 0.
inline double exponential_quantile(double u, double rate) { return -std::log1p(-u) / rate; }

inline double sample_exponential(RandomStream& stream, double rate) {
  if (!(rate > 0.0)) throw std::invalid_argument("sample_exponential: rate must be > 0");
  return exponential_quantile(stream.uniform(), rate);
}

// Normal(mean, sd) conditioned on being strictly positive (resampled).
inline double sample_normal_positive(RandomStream& stream, double mean, double sd) {
  if (sd < 0.0) throw std::invalid_argument("sample_normal_positive: sd must be >= 0");
  if (sd == 0.0) {
    if (mean <= 0.0) throw std::invalid_argument("sample_normal_positive: degenerate at non-positive mean");
    return mean;
  }
  if (mean <= -40.0 * sd) throw std::invalid_argument("sample_normal_positive: positive mass is negligible");
  for (;;) {
    const double x = mean + sd * stream.standard_normal();
    if (x > 0.0) return x;
  }
}

}  // namespace dynmcda::des
