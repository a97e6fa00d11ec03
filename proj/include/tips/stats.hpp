#pragma once

#include <span>
#include <vector>

namespace tips {

// log(sum(exp(v))) with the usual max shift; -inf for an empty or all -inf
// input.
double log_sum_exp(std::span<const double> v);

struct WeightStats {
  double log_mean;     // log of the mean linear-space weight
  double mean;         // mean linear-space weight
  double variance;     // sample variance (n - 1 denominator) of the weights
  double ess;          // (sum w)^2 / sum w^2; 0 when all weights vanish
  long zero_count;     // number of weights equal to zero (-inf in log space)
};

// Summary statistics of a set of log-space importance weights, computed
// under a common shift so that tiny weights do not underflow prematurely.
WeightStats weight_statistics(std::span<const double> log_weights);

// Quantile with linear interpolation between order statistics (the common
// "type 7" rule). q in [0, 1]; the input need not be sorted.
double quantile(std::vector<double> values, double q);

// Effective sample size of a (possibly autocorrelated) scalar chain using
// the initial-positive-sequence truncation of the autocovariance sum.
// A constant chain degenerates to 1.
double chain_ess(std::span<const double> x);

}  // namespace tips
