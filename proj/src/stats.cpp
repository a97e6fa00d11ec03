#include "tips/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tips {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

double log_sum_exp(std::span<const double> v) {
  double m = kNegInf;
  for (double x : v)
    if (x > m) m = x;
  if (m == kNegInf) return kNegInf;
  double acc = 0.0;
  for (double x : v) acc += std::exp(x - m);
  return m + std::log(acc);
}

WeightStats weight_statistics(std::span<const double> log_weights) {
  const long n = static_cast<long>(log_weights.size());
  if (n == 0) throw std::invalid_argument("weight_statistics: empty input");
  double m = kNegInf;
  long zeros = 0;
  for (double lw : log_weights) {
    if (lw == kNegInf) {
      ++zeros;
      continue;
    }
    if (lw > m) m = lw;
  }
  WeightStats out{kNegInf, 0.0, 0.0, 0.0, zeros};
  if (m == kNegInf) return out;  // every weight is zero
  double s1 = 0.0, s2 = 0.0;
  for (double lw : log_weights) {
    if (lw == kNegInf) continue;
    const double v = std::exp(lw - m);
    s1 += v;
    s2 += v * v;
  }
  out.log_mean = m + std::log(s1 / static_cast<double>(n));
  out.mean = std::exp(out.log_mean);
  out.ess = s1 * s1 / s2;
  if (n > 1) {
    const double centered = s2 - s1 * s1 / static_cast<double>(n);
    const double scale = std::exp(m);
    out.variance =
        std::max(0.0, centered) * scale * scale / static_cast<double>(n - 1);
  }
  return out;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("quantile: empty input");
  if (!(q >= 0.0 && q <= 1.0))
    throw std::invalid_argument("quantile: q outside [0, 1]");
  std::sort(values.begin(), values.end());
  const double h = q * static_cast<double>(values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = h - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

double chain_ess(std::span<const double> x) {
  const long n = static_cast<long>(x.size());
  if (n < 2) return n >= 1 ? 1.0 : 0.0;
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(n);
  auto gamma = [&](long lag) {
    double acc = 0.0;
    for (long i = 0; i + lag < n; ++i)
      acc += (x[i] - mean) * (x[i + lag] - mean);
    return acc / static_cast<double>(n);
  };
  const double g0 = gamma(0);
  if (!(g0 > 0.0)) return 1.0;  // constant chain
  // Sum paired autocovariances while the pair sums remain positive.
  double iat = g0;
  const long max_lag = std::min<long>(n - 2, 2000);
  for (long m = 1; 2 * m - 1 <= max_lag; ++m) {
    const double pair =
        gamma(2 * m - 1) + (2 * m <= max_lag ? gamma(2 * m) : 0.0);
    if (pair <= 0.0) break;
    iat += 2.0 * pair;
  }
  const double ess = static_cast<double>(n) * g0 / iat;
  return std::max(1.0, std::min(ess, static_cast<double>(n)));
}

}  // namespace tips
