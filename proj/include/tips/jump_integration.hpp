#pragma once

#include <Eigen/Dense>
#include <span>

namespace tips {

// Upper-bidiagonal generator for the holding-time stage chain of a jump
// path with the given per-state rates (lambda_1 ... lambda_n, all >= 0):
// (n+1) x (n+1), diagonal -lambda_i and superdiagonal +lambda_i for the
// first n rows, final row zero. Stage i means "currently occupying the
// i-th path state"; stage n+1 means the path has been left.
Eigen::MatrixXd build_auxiliary_matrix(std::span<const double> rates);

// Probability that a trajectory following the given jump path occupies its
// final state at the horizon, i.e. that exactly the first n-1 holding times
// fit inside the horizon: entry (1, n) of exp(horizon * auxiliary matrix).
// The result is clamped to [0, 1]; any excess removed by the clamp is
// reported through clamp_excess when non-null (values beyond ~1e-9 indicate
// a numerical problem upstream).
double timing_probability(std::span<const double> rates, double horizon,
                          double* clamp_excess = nullptr);

// Closed-form reference for the same band probability when all rates are
// strictly positive and pairwise distinct:
//   F_m(t) = 1 - sum_{i<=m} [prod_{j<=m, j!=i} r_j/(r_j - r_i)] e^(-r_i t),
//   band  = F_{n-1}(t) - F_n(t).
// The alternating sum is evaluated in extended precision internally. Throws
// std::invalid_argument on repeated or non-positive rates. Deliberately a
// separate derivation from timing_probability so the two can check each
// other.
double hypoexponential_band_oracle(std::span<const double> rates,
                                   double horizon);

}  // namespace tips
