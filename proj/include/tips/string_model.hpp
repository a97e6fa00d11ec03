#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "tips/ctmc.hpp"

namespace tips {

// Rates of the string edit process over the DNA alphabet. Per state x of
// length m with k(x) tandem-repeat deletion sites:
//   lambda(x) = m * theta_sub + lambda_pt + m * mu_pt
//             + lambda_ssm + k(x) * mu_ssm.
// theta_sub: per-site substitution rate (uniform over the 3 alternatives);
// lambda_pt: total point-insertion rate (uniform over position and letter);
// mu_pt: per-site point-deletion rate;
// lambda_ssm: total slipped-strand duplication rate (uniform over candidate
//   (position, length <= ssm_max_len) sites);
// mu_ssm: per-site slipped-strand deletion rate.
struct StringParams {
  double theta_sub = 0.0;
  double lambda_pt = 0.0;
  double mu_pt = 0.0;
  double lambda_ssm = 0.0;
  double mu_ssm = 0.0;
  int ssm_max_len = 3;
};

bool is_dna(std::string_view s);

// Number of (position, length) sites where the preceding length-L block is
// repeated immediately, i.e. x[j .. j+L-1] == x[j-L .. j-1], L <= max_len.
long ssm_deletion_count(std::string_view x, int max_len);

// Classic edit distance (unit-cost substitution, insertion, deletion).
long levenshtein_distance(std::string_view a, std::string_view b);

class StringModel {
 public:
  using state_type = std::string;

  explicit StringModel(StringParams params);

  double rate(const std::string& x) const;

  // Jump-chain successors in lexicographic order, rates of moves producing
  // the same string merged. When the duplication move has no candidate site
  // (empty string) its rate is not part of the enumerated mass and the
  // remaining move classes are renormalized accordingly.
  std::vector<Transition<std::string>> neighbors(const std::string& x) const;

  std::string render(const std::string& x) const { return x.empty() ? "-" : x; }

  // Closed-form stationary law exists only without slipped-strand moves:
  // length ~ Poisson(lambda_pt / mu_pt), letters i.i.d. uniform.
  bool has_stationary() const;
  double log_stationary(const std::string& x) const;

  const StringParams& params() const { return params_; }

 private:
  StringParams params_;
};

}  // namespace tips
