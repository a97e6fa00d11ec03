#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "support.hpp"
#include "tips/ctmc.hpp"
#include "tips/errors.hpp"
#include "tips/exact.hpp"
#include "tips/finite_model.hpp"
#include "tips/rna_model.hpp"
#include "tips/rng.hpp"
#include "tips/string_model.hpp"

using namespace tips;

namespace {

template <CtmcModel M>
void check_kernel_normalization(const M& model,
                                const std::vector<typename M::state_type>& states) {
  for (const auto& s : states) {
    const double lambda = model.rate(s);
    const auto options = model.neighbors(s);
    if (lambda <= 0.0) {
      CHECK(options.empty());
      continue;
    }
    REQUIRE(!options.empty());
    double total = 0.0;
    for (const auto& t : options) {
      CHECK(t.prob > 0.0);
      CHECK(!(t.state == s));
      total += t.prob;
    }
    CHECK(std::abs(total - 1.0) < 1e-9);
  }
}

template <CtmcModel M>
void check_trajectory_invariants(const M& model,
                                 const typename M::state_type& start,
                                 double horizon, std::uint64_t seed,
                                 long replicates) {
  for (long r = 0; r < replicates; ++r) {
    RngStream rng(seed, static_cast<std::uint64_t>(r));
    const auto traj = forward_simulate(model, start, horizon, rng);
    const auto& states = traj.path.states;
    REQUIRE(!states.empty());
    REQUIRE(traj.path.rates.size() == states.size());
    REQUIRE(traj.holding_times.size() == states.size());
    double elapsed = 0.0;
    for (std::size_t i = 0; i < states.size(); ++i) {
      CHECK(traj.path.rates[i] == model.rate(states[i]));
      if (i + 1 < states.size()) {
        CHECK(!(states[i] == states[i + 1]));
        CHECK(traj.holding_times[i] > 0.0);
        elapsed += traj.holding_times[i];
      }
    }
    CHECK(elapsed <= horizon);
    if (model.rate(states.back()) > 0.0) {
      CHECK(traj.holding_times.back() > 0.0);
      CHECK(elapsed + traj.holding_times.back() > horizon);
    } else {
      CHECK(traj.holding_times.back() ==
            doctest::Approx(horizon - elapsed).epsilon(1e-12));
    }
  }
}

}  // namespace

TEST_CASE("every bundled model exposes a normalized jump kernel") {
  {
    const auto m = testutil::two_state();
    check_kernel_normalization(m, {0, 1});
  }
  {
    const auto m = testutil::birth_death(6);
    check_kernel_normalization(m, {0, 1, 2, 3, 4, 5});
  }
  for (int i = 0; i < 10; ++i) {
    const auto m = testutil::random_dense_model(3, i);
    std::vector<int> all;
    for (long s = 0; s < m.size(); ++s) all.push_back(static_cast<int>(s));
    check_kernel_normalization(m, all);
  }
  {
    const StringModel m(testutil::reference_string_params());
    const auto space = enumerate_reachable(m, std::string("CAG"), 400);
    check_kernel_normalization(m, space.states);
  }
  {
    const RnaModel m(testutil::kFoldSequence, RnaParams{});
    const auto space = enumerate_reachable(
        m, std::string(std::string(testutil::kFoldSequence).size(), '.'), 200);
    REQUIRE(space.closed);
    check_kernel_normalization(m, space.states);
  }
}

TEST_CASE("simulated trajectories satisfy the timing invariants") {
  check_trajectory_invariants(testutil::two_state(), 0, 1.0, 101, 10000);
  check_trajectory_invariants(testutil::birth_death(6), 2, 2.0, 102, 10000);
  check_trajectory_invariants(StringModel(testutil::reference_string_params()),
                              std::string("CAG"), 0.5, 103, 10000);
  const RnaModel rna(testutil::kFoldSequence, RnaParams{});
  check_trajectory_invariants(
      rna, std::string(std::string(testutil::kFoldSequence).size(), '.'), 0.3,
      104, 10000);
}

TEST_CASE("zero horizon and absorbing starts") {
  RngStream rng(5, 0);
  const auto m = testutil::two_state();
  const auto still = forward_simulate(m, 0, 0.0, rng);
  CHECK(still.path.states.size() == 1);
  CHECK(still.path.states[0] == 0);
  CHECK(still.holding_times.size() == 1);
  CHECK(still.holding_times[0] > 0.0);

  const FiniteModel trap({"live", "dead"}, {1.0, 0.0}, {{{1, 1.0}}, {}});
  const auto parked = forward_simulate(trap, 1, 5.0, rng);
  CHECK(parked.path.states.size() == 1);
  CHECK(parked.holding_times.size() == 1);
  CHECK(parked.holding_times[0] == 5.0);

  // Long horizons drain into the absorbing state and stay there.
  const auto drained = forward_simulate(trap, 0, 50.0, rng);
  CHECK(drained.path.states.back() == 1);
  CHECK(drained.path.rates.back() == 0.0);
}

TEST_CASE("forward simulation reproduces the two-state law") {
  const auto m = testutil::two_state();
  const double expected = testutil::two_state_cross_probability(1.0, 1.0);
  CHECK(expected == doctest::Approx(0.43233).epsilon(1e-4));
  const long n = 100000;
  const auto summary = forward_sampling_estimate(m, 0, 1, 1.0, n, 2024);
  const double se = std::sqrt(expected * (1.0 - expected) / n);
  CHECK(std::abs(summary.estimate - expected) < 3.0 * se);
  CHECK(summary.particles == n);
  // Indicator weights: sample variance n/(n-1) * p(1-p), ESS = K * p.
  CHECK(summary.weight_variance ==
        doctest::Approx(summary.estimate * (1.0 - summary.estimate) * n /
                        (n - 1.0))
            .epsilon(1e-9));
  CHECK(summary.ess == doctest::Approx(n * summary.estimate).epsilon(1e-9));
}

TEST_CASE("forward sampling at zero horizon is the endpoint indicator") {
  const auto m = testutil::two_state();
  CHECK(forward_sampling_estimate(m, 0, 0, 0.0, 64, 7).estimate == 1.0);
  CHECK(forward_sampling_estimate(m, 0, 1, 0.0, 64, 7).estimate == 0.0);
}

TEST_CASE("jump chain log probability") {
  const auto m = testutil::birth_death(6);
  JumpChainPath<int> single;
  single.states = {3};
  single.rates = {m.rate(3)};
  CHECK(jump_chain_log_probability(m, single) == 0.0);

  JumpChainPath<int> climb;
  climb.states = {1, 2, 3};
  climb.rates = {m.rate(1), m.rate(2), m.rate(3)};
  CHECK(jump_chain_log_probability(m, climb) ==
        doctest::Approx(std::log(0.25)).epsilon(1e-12));

  JumpChainPath<int> skip;
  skip.states = {0, 2};
  skip.rates = {m.rate(0), m.rate(2)};
  CHECK(std::isinf(jump_chain_log_probability(m, skip)));
  CHECK(jump_chain_log_probability(m, skip) < 0.0);

  CHECK_THROWS_AS(jump_chain_log_probability(m, JumpChainPath<int>{}),
                  std::invalid_argument);
}

TEST_CASE("time rescaling leaves endpoint probabilities invariant") {
  const auto base = testutil::random_dense_model(5, 0);
  const double c = 3.7;
  std::vector<std::string> names;
  std::vector<double> rates;
  std::vector<std::vector<Transition<int>>> adj;
  for (long i = 0; i < base.size(); ++i) {
    names.push_back(base.render(static_cast<int>(i)));
    rates.push_back(c * base.rate(static_cast<int>(i)));
    adj.push_back(base.neighbors(static_cast<int>(i)));
  }
  const FiniteModel scaled(std::move(names), std::move(rates), std::move(adj));

  const double horizon = 0.9;
  const int start = 0;
  const int end = static_cast<int>(base.size()) - 1;
  const auto space_base = enumerate_reachable(base, start);
  const auto space_scaled = enumerate_reachable(scaled, start);
  const double p_base =
      exact_transition_probability(space_base, start, end, horizon);
  const double p_scaled =
      exact_transition_probability(space_scaled, start, end, horizon / c);
  CHECK(std::abs(p_base - p_scaled) <= 1e-10 * p_base);

  const long k = 20000;
  const auto fs_base = forward_sampling_estimate(base, start, end, horizon, k, 31);
  const auto fs_scaled =
      forward_sampling_estimate(scaled, start, end, horizon / c, k, 32);
  const double joint_se =
      std::sqrt(fs_base.estimate * (1.0 - fs_base.estimate) / k +
                fs_scaled.estimate * (1.0 - fs_scaled.estimate) / k);
  CHECK(std::abs(fs_base.estimate - fs_scaled.estimate) < 4.0 * joint_se);
  CHECK(std::abs(fs_base.estimate - p_base) <
        4.0 * std::sqrt(p_base * (1.0 - p_base) / k));
}

TEST_CASE("step cap and argument validation") {
  RngStream rng(9, 0);
  const auto m = testutil::two_state();
  CHECK_THROWS_AS(forward_simulate(m, 0, 1e6, rng, 50), StepCapError);
  CHECK_THROWS_AS(forward_simulate(m, 0, -1.0, rng), std::invalid_argument);
  CHECK_THROWS_AS(forward_sampling_estimate(m, 0, 1, 1.0, 0, 1),
                  std::invalid_argument);
}
