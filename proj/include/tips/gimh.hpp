#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tips/errors.hpp"
#include "tips/rng.hpp"
#include "tips/stats.hpp"

namespace tips {

// Independent exponential priors, one rate per parameter component.
struct ExponentialPrior {
  std::vector<double> rates;

  double log_density(std::span<const double> theta) const {
    if (theta.size() != rates.size())
      throw std::invalid_argument("prior dimension mismatch");
    double total = 0.0;
    for (std::size_t i = 0; i < rates.size(); ++i) {
      if (!(theta[i] > 0.0))
        return -std::numeric_limits<double>::infinity();
      total += std::log(rates[i]) - rates[i] * theta[i];
    }
    return total;
  }
};

// Deterministic core of the one-component multiplicative random walk:
// the multiplier applied to the chosen component for uniform draw u.
inline double multiplicative_factor(double u, double scale) {
  return std::exp(scale * (u - 0.5));
}

template <typename T>
struct MultiplicativeStep {
  std::vector<T> proposed;
  std::size_t component = 0;
  // log q(theta | theta') - log q(theta' | theta) for this move, which for
  // the multiplicative family equals the log of the applied multiplier.
  double log_hastings = 0.0;
};

// Applies the multiplier for draw u to one chosen component. Split out from
// the randomized wrapper so the involution property (applying with u then
// 1 - u restores theta exactly) can be exercised deterministically.
inline MultiplicativeStep<double> apply_multiplicative(
    std::vector<double> theta, std::size_t component, double u, double scale) {
  if (component >= theta.size())
    throw std::invalid_argument("apply_multiplicative: component out of range");
  if (!(scale > 0.0))
    throw std::invalid_argument("apply_multiplicative: scale must be > 0");
  const double m = multiplicative_factor(u, scale);
  theta[component] *= m;
  return {std::move(theta), component, std::log(m)};
}

// Proposes theta' by multiplying one uniformly chosen component by
// exp(scale * (u - 1/2)).
inline MultiplicativeStep<double> multiplicative_proposal(
    const std::vector<double>& theta, double scale, RngStream& rng) {
  if (theta.empty())
    throw std::invalid_argument("multiplicative_proposal: empty parameter");
  const std::size_t component = rng.uniform_index(theta.size());
  return apply_multiplicative(theta, component, rng.uniform01(), scale);
}

struct GimhOptions {
  long iterations = 1000;
  // Per-component width of the multiplicative random walk.
  double proposal_scale = 2.0 * std::log(1.2);
  // Attempts at estimating the initial marginal likelihood before the run
  // is declared unstartable.
  int init_retries = 10;
  // Validation-only switch: re-estimates the retained marginal likelihood
  // every iteration instead of keeping it fixed between acceptances. This
  // breaks the exactness of the sampler (the stationary law becomes
  // overdispersed) and exists solely so tests can demonstrate why the
  // retained estimate must never be refreshed.
  bool refresh_retained = false;

  void validate() const {
    if (iterations < 1)
      throw std::invalid_argument("gimh iterations must be >= 1");
    if (!(proposal_scale > 0.0))
      throw std::invalid_argument("gimh proposal scale must be > 0");
    if (init_retries < 1)
      throw std::invalid_argument("gimh init retries must be >= 1");
  }
};

// One chain record. Index 0 holds the initial state (accepted = false by
// convention), so acceptance counts divide by samples.size() - 1.
struct GimhSample {
  std::vector<double> params;
  double log_z = -std::numeric_limits<double>::infinity();
  bool accepted = false;
};

// Pseudo-marginal Metropolis-Hastings: the marginal likelihood of the data
// at each parameter value is replaced by an unbiased estimate, drawn with
// fresh seeds per proposal, and the estimate of the retained state is kept
// until the next acceptance. LogMarginal is called as
// log_marginal(theta, seed) -> double and must be deterministic in (theta,
// seed).
template <typename LogMarginal>
std::vector<GimhSample> gimh_chain(std::vector<double> init,
                                   const ExponentialPrior& prior,
                                   LogMarginal&& log_marginal,
                                   const GimhOptions& options,
                                   std::uint64_t master_seed) {
  options.validate();
  if (init.empty()) throw std::invalid_argument("gimh_chain: empty init");
  constexpr double neg_inf = -std::numeric_limits<double>::infinity();
  double log_prior = prior.log_density(init);
  if (log_prior == neg_inf)
    throw std::invalid_argument("gimh_chain: init outside prior support");

  double log_z = neg_inf;
  for (int attempt = 0; attempt < options.init_retries; ++attempt) {
    log_z = log_marginal(init, derive_seed(master_seed, 0, 100 + attempt));
    if (std::isfinite(log_z)) break;
  }
  if (!std::isfinite(log_z))
    throw StartupError(
        "gimh_chain: initial marginal-likelihood estimate stayed non-finite "
        "after " +
        std::to_string(options.init_retries) + " attempts");

  std::vector<GimhSample> samples;
  samples.reserve(static_cast<std::size_t>(options.iterations) + 1);
  samples.push_back({init, log_z, false});

  std::vector<double> theta = std::move(init);
  RngStream walk(master_seed, 0xC0FFEE);
  for (long t = 1; t <= options.iterations; ++t) {
    const std::uint64_t ut = static_cast<std::uint64_t>(t);
    if (options.refresh_retained)
      log_z = log_marginal(theta, derive_seed(master_seed, ut, 2));
    auto step = multiplicative_proposal(theta, options.proposal_scale, walk);
    const double log_prior_prop = prior.log_density(step.proposed);
    double log_z_prop = neg_inf;
    if (log_prior_prop != neg_inf)
      log_z_prop =
          log_marginal(step.proposed, derive_seed(master_seed, ut, 1));
    const double log_ratio = (log_prior_prop + log_z_prop + step.log_hastings) -
                             (log_prior + log_z);
    const double u = walk.uniform01();
    const bool accept = std::isfinite(log_ratio)
                            ? std::log(u) < log_ratio
                            : log_ratio == std::numeric_limits<double>::infinity();
    if (accept) {
      theta = std::move(step.proposed);
      log_prior = log_prior_prop;
      log_z = log_z_prop;
    }
    samples.push_back({theta, log_z, accept});
  }
  return samples;
}

struct ChainDiagnostics {
  double acceptance_rate = 0.0;
  std::vector<double> parameter_ess;
  // Prefix iteration counts (roughly 20 of them, ending at the full chain)
  // and, for each prefix and parameter, the 2.5 / 25 / 50 / 75 / 97.5
  // percent quantiles of that parameter over the prefix.
  std::vector<std::size_t> prefix_lengths;
  std::vector<std::vector<std::array<double, 5>>> prefix_quantiles;
};

inline ChainDiagnostics chain_diagnostics(
    const std::vector<GimhSample>& samples) {
  if (samples.size() < 10)
    throw std::invalid_argument("chain_diagnostics: need at least 10 records");
  ChainDiagnostics out;
  std::size_t accepted = 0;
  for (std::size_t i = 1; i < samples.size(); ++i)
    if (samples[i].accepted) ++accepted;
  out.acceptance_rate =
      static_cast<double>(accepted) / static_cast<double>(samples.size() - 1);

  const std::size_t dim = samples.front().params.size();
  std::vector<std::vector<double>> series(dim);
  for (auto& s : series) s.reserve(samples.size());
  for (const auto& sample : samples)
    for (std::size_t p = 0; p < dim; ++p)
      series[p].push_back(sample.params[p]);
  for (std::size_t p = 0; p < dim; ++p)
    out.parameter_ess.push_back(chain_ess(series[p]));

  constexpr std::size_t kPoints = 20;
  constexpr std::array<double, 5> kLevels = {0.025, 0.25, 0.5, 0.75, 0.975};
  const std::size_t n = samples.size();
  std::size_t previous = 0;
  for (std::size_t j = 1; j <= kPoints; ++j) {
    const std::size_t len = std::max<std::size_t>(2, n * j / kPoints);
    if (len == previous || len > n) continue;
    previous = len;
    std::vector<std::array<double, 5>> row(dim);
    for (std::size_t p = 0; p < dim; ++p) {
      std::vector<double> prefix(series[p].begin(),
                                 series[p].begin() + static_cast<long>(len));
      for (std::size_t q = 0; q < kLevels.size(); ++q)
        row[p][q] = quantile(prefix, kLevels[q]);
    }
    out.prefix_lengths.push_back(len);
    out.prefix_quantiles.push_back(std::move(row));
  }
  return out;
}

}  // namespace tips
