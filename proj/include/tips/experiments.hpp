#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "tips/ctmc.hpp"
#include "tips/estimator.hpp"
#include "tips/finite_model.hpp"
#include "tips/potential.hpp"
#include "tips/rng.hpp"
#include "tips/string_model.hpp"

namespace tips {

// One observed endpoint pair: the chain was seen at `start`, then `horizon`
// time units later at `end`. States are stored rendered so datasets
// round-trip through JSON for any model family.
struct EndpointRecord {
  std::string start;
  std::string end;
  double horizon = 0.0;
};

inline nlohmann::ordered_json dataset_to_json(
    const std::vector<EndpointRecord>& records) {
  nlohmann::ordered_json out;
  out["records"] = nlohmann::ordered_json::array();
  for (const auto& r : records)
    out["records"].push_back(
        {{"start", r.start}, {"end", r.end}, {"horizon", r.horizon}});
  return out;
}

inline std::vector<EndpointRecord> dataset_from_json(
    const nlohmann::ordered_json& doc) {
  if (!doc.is_object() || !doc.contains("records") ||
      !doc.at("records").is_array())
    throw std::invalid_argument("dataset: expected {\"records\": [...]}");
  std::vector<EndpointRecord> out;
  for (const auto& r : doc.at("records")) {
    EndpointRecord rec;
    rec.start = r.at("start").get<std::string>();
    rec.end = r.at("end").get<std::string>();
    rec.horizon = r.at("horizon").get<double>();
    if (!(rec.horizon > 0.0))
      throw std::invalid_argument("dataset: horizons must be > 0");
    out.push_back(std::move(rec));
  }
  return out;
}

// Marginal-likelihood estimator for one parametric model family, ready to
// drive gimh_chain. The callable is deterministic in (theta, seed); each
// observation gets its own derived seed so particle noise is independent
// across observations.
struct FamilyMarginal {
  std::function<double(const std::vector<double>&, std::uint64_t)> log_marginal;
  std::vector<std::string> parameter_names;
  // Whether the per-observation stationary start-state factor is included
  // (it is whenever the family has a tractable stationary law).
  bool includes_statio = true;
};

struct FamilyOptions {
  ProposalConfig proposal;
  long particles = 64;
  int workers = 1;
};

// Two states "a" and "b" flipping into each other at a common unknown rate.
inline FiniteModel two_state_flip_model(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("two_state_flip_model: rate must be > 0");
  return FiniteModel({"a", "b"}, {lambda, lambda},
                     {{{1, 1.0}}, {{0, 1.0}}});
}

inline int two_state_index(const std::string& name) {
  if (name == "a") return 0;
  if (name == "b") return 1;
  throw std::invalid_argument("two-state record state must be a or b, got " +
                              name);
}

// log p^(data | lambda) for the flip family: per record, the stationary
// start mass (1/2 regardless of lambda) times an estimated transition
// probability. theta = (lambda).
inline FamilyMarginal two_state_flip_marginal(std::vector<EndpointRecord> data,
                                              FamilyOptions options) {
  if (data.empty())
    throw std::invalid_argument("two_state_flip_marginal: empty dataset");
  for (const auto& r : data) {
    two_state_index(r.start);
    two_state_index(r.end);
    if (!(r.horizon > 0.0))
      throw std::invalid_argument("two_state_flip_marginal: bad horizon");
  }
  FamilyMarginal out;
  out.parameter_names = {"lambda"};
  out.log_marginal = [data = std::move(data), options](
                         const std::vector<double>& theta,
                         std::uint64_t seed) -> double {
    constexpr double neg_inf = -std::numeric_limits<double>::infinity();
    if (theta.size() != 1 || !(theta[0] > 0.0) || !std::isfinite(theta[0]))
      return neg_inf;
    const FiniteModel model = two_state_flip_model(theta[0]);
    TipsOptions tips;
    tips.proposal = options.proposal;
    tips.particles = options.particles;
    tips.workers = options.workers;
    tips.keep_log_weights = false;
    double total = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
      const TargetPotential<int> pot(
          [](const int& x, const int& y) { return x == y ? 0L : 1L; },
          two_state_index(data[i].end));
      const auto summary =
          tips_estimate(model, pot, two_state_index(data[i].start),
                        data[i].horizon, tips, derive_seed(seed, i));
      if (!std::isfinite(summary.log_estimate)) return neg_inf;
      total += std::log(0.5) + summary.log_estimate;
    }
    return total;
  };
  return out;
}

// log p^(data | lambda_pt, mu_pt) for the point-indel string family with
// substitution rate held fixed and slipped-strand motion switched off. The
// stationary start factor is the uniform-letters law with Poisson(lambda_pt
// / mu_pt) length. theta = (lambda_pt, mu_pt).
//
// options.particles is the per-record budget on average: weight dispersion
// varies wildly across records (an unchanged endpoint needs a handful of
// particles, a distance-5 excursion needs hundreds), so the constructor runs
// a short pilot at the prior-mean rates and splits the total budget across
// records in proportion to the pilot log-estimate spread, with a small
// per-record floor. The counts are frozen before the first call, so every
// estimate stays unbiased and GIMH exactness is untouched.
inline FamilyMarginal string_point_indel_marginal(
    std::vector<EndpointRecord> data, double theta_sub,
    FamilyOptions options) {
  if (data.empty())
    throw std::invalid_argument("string_point_indel_marginal: empty dataset");
  if (!(theta_sub >= 0.0) || !std::isfinite(theta_sub))
    throw std::invalid_argument(
        "string_point_indel_marginal: substitution rate must be >= 0");
  for (const auto& r : data)
    if (!(r.horizon > 0.0))
      throw std::invalid_argument("string_point_indel_marginal: bad horizon");

  const long floor_particles = std::min<long>(options.particles, 8);
  std::vector<long> allocation(data.size(), options.particles);
  if (data.size() > 1 && options.particles > floor_particles) {
    StringParams pilot_params;
    pilot_params.theta_sub = theta_sub;
    pilot_params.lambda_pt = 1.0;
    pilot_params.mu_pt = 1.0;
    pilot_params.lambda_ssm = 0.0;
    pilot_params.mu_ssm = 0.0;
    const StringModel pilot_model(pilot_params);
    constexpr int kPilotReps = 6;
    constexpr long kPilotParticles = 16;
    // A pilot rep that loses every particle marks the record as hard rather
    // than cheap; 4.0 is an arbitrary large log-variance.
    constexpr double kFailedPilotSpread = 2.0;
    std::vector<double> spread(data.size(), 0.0);
    double spread_total = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
      const TargetPotential<std::string> pot(
          [](const std::string& x, const std::string& y) {
            return levenshtein_distance(x, y);
          },
          data[i].end);
      TipsOptions pilot;
      pilot.proposal = options.proposal;
      pilot.particles = kPilotParticles;
      pilot.workers = options.workers;
      pilot.keep_log_weights = false;
      std::vector<double> logs;
      bool failed = false;
      for (int r = 0; r < kPilotReps; ++r) {
        const auto summary =
            tips_estimate(pilot_model, pot, data[i].start, data[i].horizon,
                          pilot, derive_seed(0x9a11oc ^ 0, i, r));
        if (!std::isfinite(summary.log_estimate)) {
          failed = true;
          break;
        }
        logs.push_back(summary.log_estimate);
      }
      if (failed) {
        spread[i] = kFailedPilotSpread;
      } else {
        double mean = 0.0;
        for (double v : logs) mean += v;
        mean /= static_cast<double>(logs.size());
        double var = 0.0;
        for (double v : logs) var += (v - mean) * (v - mean);
        var /= static_cast<double>(logs.size() - 1);
        spread[i] = std::sqrt(var);
      }
      spread_total += spread[i];
    }
    if (spread_total > 0.0) {
      const double extra =
          static_cast<double>(data.size()) *
          static_cast<double>(options.particles - floor_particles);
      for (std::size_t i = 0; i < data.size(); ++i)
        allocation[i] =
            floor_particles +
            std::lround(extra * spread[i] / spread_total);
    }
  }

  FamilyMarginal out;
  out.parameter_names = {"lambda_pt", "mu_pt"};
  out.log_marginal = [data = std::move(data), theta_sub, options,
                      allocation = std::move(allocation)](
                         const std::vector<double>& theta,
                         std::uint64_t seed) -> double {
    constexpr double neg_inf = -std::numeric_limits<double>::infinity();
    if (theta.size() != 2) return neg_inf;
    for (double v : theta)
      if (!(v > 0.0) || !std::isfinite(v)) return neg_inf;
    StringParams params;
    params.theta_sub = theta_sub;
    params.lambda_pt = theta[0];
    params.mu_pt = theta[1];
    params.lambda_ssm = 0.0;
    params.mu_ssm = 0.0;
    const StringModel model(params);
    TipsOptions tips;
    tips.proposal = options.proposal;
    tips.particles = options.particles;
    tips.workers = options.workers;
    tips.keep_log_weights = false;
    double total = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
      const TargetPotential<std::string> pot(
          [](const std::string& x, const std::string& y) {
            return levenshtein_distance(x, y);
          },
          data[i].end);
      const auto summary = tips_estimate(model, pot, data[i].start,
                                         data[i].horizon, tips,
                                         derive_seed(seed, i));
      if (!std::isfinite(summary.log_estimate)) return neg_inf;
      total += model.log_stationary(data[i].start) + summary.log_estimate;
    }
    return total;
  };
  return out;
}

// Draws endpoint datasets from the families themselves: stationary start,
// then a forward simulation over the horizon.
inline std::vector<EndpointRecord> simulate_two_state_flip(
    double lambda, double horizon, long records, std::uint64_t seed) {
  if (records < 0)
    throw std::invalid_argument("simulate_two_state_flip: records < 0");
  const FiniteModel model = two_state_flip_model(lambda);
  std::vector<EndpointRecord> out;
  out.reserve(static_cast<std::size_t>(records));
  for (long i = 0; i < records; ++i) {
    RngStream rng(seed, static_cast<std::uint64_t>(i));
    const int start = rng.uniform01() < 0.5 ? 0 : 1;
    const auto traj = forward_simulate(model, start, horizon, rng);
    out.push_back({model.render(start), model.render(traj.path.states.back()),
                   horizon});
  }
  return out;
}

inline std::vector<EndpointRecord> simulate_string_point_indel(
    const StringParams& params, double horizon, long records,
    std::uint64_t seed) {
  if (records < 0)
    throw std::invalid_argument("simulate_string_point_indel: records < 0");
  const StringModel model(params);
  if (!model.has_stationary())
    throw std::invalid_argument(
        "simulate_string_point_indel: family has no stationary law "
        "(needs mu_pt > 0 and no slipped-strand motion)");
  static constexpr char kAlphabet[] = {'A', 'C', 'G', 'T'};
  std::vector<EndpointRecord> out;
  out.reserve(static_cast<std::size_t>(records));
  for (long i = 0; i < records; ++i) {
    RngStream rng(seed, static_cast<std::uint64_t>(i));
    const long length = rng.poisson(params.lambda_pt / params.mu_pt);
    std::string start;
    for (long j = 0; j < length; ++j)
      start.push_back(kAlphabet[rng.uniform_index(4)]);
    const auto traj = forward_simulate(model, start, horizon, rng);
    out.push_back({start, traj.path.states.back(), horizon});
  }
  return out;
}

}  // namespace tips
