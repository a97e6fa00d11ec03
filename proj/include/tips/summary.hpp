#pragma once

#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "tips/stats.hpp"

namespace tips {

// Shared result record for the Monte Carlo transition-probability
// estimators. The estimate is the mean of the linear-space particle
// weights; everything else is bookkeeping about the weight population.
struct EstimateSummary {
  double estimate = 0.0;
  double log_estimate = -std::numeric_limits<double>::infinity();
  double weight_variance = 0.0;
  double ess = 0.0;
  long particles = 0;
  long zero_weights = 0;
  bool degenerate = false;  // every particle weight is zero
  double max_clamp_excess = 0.0;
  double wall_clock_ms = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> log_weights;
};

inline EstimateSummary summarize_log_weights(std::vector<double> log_weights,
                                             std::uint64_t seed) {
  EstimateSummary out;
  const WeightStats ws = weight_statistics(log_weights);
  out.estimate = ws.mean;
  out.log_estimate = ws.log_mean;
  out.weight_variance = ws.variance;
  out.ess = ws.ess;
  out.particles = static_cast<long>(log_weights.size());
  out.zero_weights = ws.zero_count;
  out.degenerate = ws.zero_count == out.particles;
  out.seed = seed;
  out.log_weights = std::move(log_weights);
  return out;
}

}  // namespace tips
