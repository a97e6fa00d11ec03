#pragma once

// Shared fixtures for the test suite: small hand-built chains, randomized
// dense finite models, and the reference parameter sets used throughout.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "tips/finite_model.hpp"
#include "tips/potential.hpp"
#include "tips/rng.hpp"
#include "tips/string_model.hpp"

namespace testutil {

// Two states a <-> b with the given flip rates.
inline tips::FiniteModel two_state(double up = 1.0, double down = 1.0) {
  return tips::FiniteModel({"a", "b"}, {up, down}, {{{1, 1.0}}, {{0, 1.0}}});
}

// Closed-form transition probability for the symmetric two-state chain:
// P(X_T = other | X_0, flip rate lambda each way).
inline double two_state_cross_probability(double lambda, double horizon) {
  return 0.5 * (1.0 - std::exp(-2.0 * lambda * horizon));
}

// Birth-death chain on {0..n-1}: up rate `birth`, down rate `death`,
// reflecting at the ends.
inline tips::FiniteModel birth_death(int n, double birth = 1.0,
                                     double death = 1.0) {
  std::vector<std::string> names;
  std::vector<double> rates;
  std::vector<std::vector<tips::Transition<int>>> adj(
      static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    names.push_back(std::to_string(i));
    double total = 0.0;
    if (i + 1 < n) total += birth;
    if (i > 0) total += death;
    rates.push_back(total);
    auto& row = adj[static_cast<std::size_t>(i)];
    if (i + 1 < n) row.push_back({i + 1, birth / total});
    if (i > 0) row.push_back({i - 1, death / total});
  }
  return tips::FiniteModel(std::move(names), std::move(rates), std::move(adj));
}

// Random dense chain with 2..10 states: every ordered pair gets a jump rate
// in [0.1, 5] with probability 0.7, plus a cycle edge so the chain is
// strongly connected. Rates span a couple of orders of magnitude, which is
// what the estimator comparisons want to see.
inline tips::FiniteModel random_dense_model(std::uint64_t seed, int index) {
  tips::RngStream rng(seed, static_cast<std::uint64_t>(index));
  const int n = 2 + static_cast<int>(rng.uniform_index(9));
  std::vector<std::vector<double>> k(
      static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n), 0.0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      if (j == (i + 1) % n || rng.uniform01() < 0.7)
        k[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
            0.1 + 4.9 * rng.uniform01();
    }
  std::vector<std::string> names;
  std::vector<double> rates;
  std::vector<std::vector<tips::Transition<int>>> adj(
      static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    names.push_back("s" + std::to_string(i));
    double total = 0.0;
    for (int j = 0; j < n; ++j)
      total += k[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    rates.push_back(total);
    for (int j = 0; j < n; ++j) {
      const double kij = k[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      if (kij > 0.0) adj[static_cast<std::size_t>(i)].push_back({j, kij / total});
    }
  }
  return tips::FiniteModel(std::move(names), std::move(rates), std::move(adj));
}

// The reference parameter set used for the sequence-evolution examples.
inline tips::StringParams reference_string_params() {
  tips::StringParams p;
  p.theta_sub = 0.03;
  p.lambda_pt = 0.05;
  p.mu_pt = 0.2;
  p.lambda_ssm = 2.0;
  p.mu_ssm = 2.0;
  p.ssm_max_len = 3;
  return p;
}

inline tips::TargetPotential<std::string> levenshtein_potential(
    std::vector<std::string> targets) {
  return tips::set_potential<std::string>(
      [](const std::string& x, const std::string& y) {
        return tips::levenshtein_distance(x, y);
      },
      std::move(targets));
}

// 12-mer whose fold space has exactly 70 secondary structures and a unique
// deepest one, and a second 12-mer with 48 structures.
inline const char* kFoldSequence = "UCUUCAGAAGCA";
inline const char* kFoldDeepest = "((((...))).)";
inline const char* kFoldSequenceSmall = "ACGGACACGUCU";

}  // namespace testutil
