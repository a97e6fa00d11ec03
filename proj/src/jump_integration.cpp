#include "tips/jump_integration.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <stdexcept>

#include "tips/matrix_exp.hpp"

namespace tips {

namespace {

void check_rates(std::span<const double> rates) {
  if (rates.empty())
    throw std::invalid_argument("auxiliary matrix needs at least one rate");
  for (double r : rates)
    if (!(r >= 0.0) || !std::isfinite(r))
      throw std::invalid_argument("holding rates must be finite and >= 0");
}

}  // namespace

Eigen::MatrixXd build_auxiliary_matrix(std::span<const double> rates) {
  check_rates(rates);
  const long n = static_cast<long>(rates.size());
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n + 1, n + 1);
  for (long i = 0; i < n; ++i) {
    q(i, i) = -rates[i];
    q(i, i + 1) = rates[i];
  }
  return q;
}

double timing_probability(std::span<const double> rates, double horizon,
                          double* clamp_excess) {
  check_rates(rates);
  if (!(horizon >= 0.0) || !std::isfinite(horizon))
    throw std::invalid_argument("horizon must be finite and >= 0");
  const long n = static_cast<long>(rates.size());
  const Eigen::MatrixXd m =
      matrix_exponential(horizon * build_auxiliary_matrix(rates));
  const double raw = m(0, n - 1);
  const double clamped = std::min(1.0, std::max(0.0, raw));
  if (clamp_excess != nullptr) *clamp_excess = std::abs(raw - clamped);
  return clamped;
}

double hypoexponential_band_oracle(std::span<const double> rates,
                                   double horizon) {
  check_rates(rates);
  if (!(horizon >= 0.0) || !std::isfinite(horizon))
    throw std::invalid_argument("horizon must be finite and >= 0");
  const long n = static_cast<long>(rates.size());
  for (long i = 0; i < n; ++i) {
    if (!(rates[i] > 0.0))
      throw std::invalid_argument("closed form needs strictly positive rates");
    for (long j = i + 1; j < n; ++j)
      if (rates[i] == rates[j])
        throw std::invalid_argument("closed form needs distinct rates");
  }

  // The coefficients alternate in sign and can grow large before cancelling,
  // so accumulate with 50 significant decimal digits and round once at the
  // end.
  using mp = boost::multiprecision::cpp_bin_float_50;
  const mp t(horizon);
  auto stage_cdf = [&](long m) -> mp {
    if (m == 0) return mp(1);
    mp acc(1);
    for (long i = 0; i < m; ++i) {
      mp c(1);
      for (long j = 0; j < m; ++j) {
        if (j == i) continue;
        c *= mp(rates[j]) / (mp(rates[j]) - mp(rates[i]));
      }
      acc -= c * exp(-mp(rates[i]) * t);
    }
    return acc;
  };
  const mp band = stage_cdf(n - 1) - stage_cdf(n);
  return static_cast<double>(band);
}

}  // namespace tips
