#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

namespace tips {

// Counter-based seed derivation (splitmix64 output function). Used to key
// independent substreams from (master seed, task index) so that results do
// not depend on how work is split across threads.
namespace detail {
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
}  // namespace detail

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                 std::uint64_t b = 0) {
  std::uint64_t s = master;
  std::uint64_t h = detail::splitmix64(s);
  s ^= a * 0xbf58476d1ce4e5b9ULL + 0x2545f4914f6cdd1dULL;
  h ^= detail::splitmix64(s);
  s ^= b * 0x94d049bb133111ebULL + 0x27d4eb2f165667c5ULL;
  h ^= detail::splitmix64(s);
  return h;
}

// xoshiro256++ stream whose 256-bit state is derived from (master seed,
// stream id) with splitmix64. Streams with distinct ids are statistically
// independent for Monte Carlo purposes and fully reproducible.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_id) {
    std::uint64_t c = derive_seed(master_seed, stream_id);
    for (auto& w : s_) w = detail::splitmix64(c);
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 0x1ULL;
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

  // Uniform double in [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Exponential holding time with the given rate (> 0).
  double exponential(double rate) {
    if (!(rate > 0.0))
      throw std::invalid_argument("exponential draw needs a positive rate");
    return -std::log1p(-uniform01()) / rate;
  }

  // Geometric count on {1, 2, ...} with pmf beta * (1 - beta)^(n - 1).
  long geometric_count(double beta) {
    if (!(beta > 0.0) || beta > 1.0)
      throw std::invalid_argument("geometric parameter must lie in (0, 1]");
    if (beta >= 1.0) return 1;
    const double u = uniform01();
    const double n = std::floor(std::log1p(-u) / std::log1p(-beta));
    if (n >= 9.0e18) return std::numeric_limits<long>::max();
    return 1 + static_cast<long>(n);
  }

  // Poisson count by inversion; intended for small means.
  long poisson(double mean) {
    if (!(mean >= 0.0) || !std::isfinite(mean))
      throw std::invalid_argument("poisson mean must be finite and >= 0");
    if (mean == 0.0) return 0;
    const double u = uniform01();
    double p = std::exp(-mean);
    double cum = p;
    long k = 0;
    const long cap = static_cast<long>(mean + 20.0 * std::sqrt(mean) + 50.0);
    while (u > cum && k < cap) {
      ++k;
      p *= mean / static_cast<double>(k);
      cum += p;
    }
    return k;
  }

  // Uniform integer in [0, n). Modulo bias is far below any tolerance used
  // here (n is always tiny compared to 2^64).
  std::uint64_t uniform_index(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("uniform_index needs n > 0");
    return next_u64() % n;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::array<std::uint64_t, 4> s_{};
};

// log pmf of the geometric excursion count: beta * (1 - beta)^(n - 1).
inline double geometric_log_pmf(long n, double beta) {
  if (n < 1 || !(beta > 0.0) || beta > 1.0)
    return -std::numeric_limits<double>::infinity();
  if (beta >= 1.0)
    return n == 1 ? 0.0 : -std::numeric_limits<double>::infinity();
  return std::log(beta) + static_cast<double>(n - 1) * std::log1p(-beta);
}

}  // namespace tips
