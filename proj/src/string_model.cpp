#include "tips/string_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace tips {

namespace {
constexpr std::string_view kAlphabet = "ACGT";
}

bool is_dna(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) {
    return kAlphabet.find(c) != std::string_view::npos;
  });
}

long ssm_deletion_count(std::string_view x, int max_len) {
  const long m = static_cast<long>(x.size());
  long count = 0;
  for (long len = 1; len <= max_len; ++len)
    for (long j = len; j + len <= m; ++j)
      if (x.substr(static_cast<std::size_t>(j - len),
                   static_cast<std::size_t>(len)) ==
          x.substr(static_cast<std::size_t>(j), static_cast<std::size_t>(len)))
        ++count;
  return count;
}

long levenshtein_distance(std::string_view a, std::string_view b) {
  const std::size_t n = b.size();
  std::vector<long> row(n + 1);
  for (std::size_t j = 0; j <= n; ++j) row[j] = static_cast<long>(j);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    long diag = row[0];
    row[0] = static_cast<long>(i);
    for (std::size_t j = 1; j <= n; ++j) {
      const long subst = diag + (a[i - 1] == b[j - 1] ? 0 : 1);
      diag = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, subst});
    }
  }
  return row[n];
}

StringModel::StringModel(StringParams params) : params_(params) {
  auto ok = [](double v) { return v >= 0.0 && std::isfinite(v); };
  if (!ok(params_.theta_sub) || !ok(params_.lambda_pt) || !ok(params_.mu_pt) ||
      !ok(params_.lambda_ssm) || !ok(params_.mu_ssm))
    throw std::invalid_argument("string model: rates must be finite and >= 0");
  if (params_.ssm_max_len < 1)
    throw std::invalid_argument("string model: ssm_max_len must be >= 1");
}

double StringModel::rate(const std::string& x) const {
  if (!is_dna(x)) throw std::invalid_argument("string model: non-DNA state");
  const double m = static_cast<double>(x.size());
  return m * params_.theta_sub + params_.lambda_pt + m * params_.mu_pt +
         params_.lambda_ssm +
         static_cast<double>(ssm_deletion_count(x, params_.ssm_max_len)) *
             params_.mu_ssm;
}

std::vector<Transition<std::string>> StringModel::neighbors(
    const std::string& x) const {
  if (!is_dna(x)) throw std::invalid_argument("string model: non-DNA state");
  const long m = static_cast<long>(x.size());
  std::map<std::string, double> moves;

  // Substitutions: per site, uniformly one of the 3 other letters.
  if (params_.theta_sub > 0.0)
    for (long i = 0; i < m; ++i)
      for (char c : kAlphabet) {
        if (c == x[static_cast<std::size_t>(i)]) continue;
        std::string y = x;
        y[static_cast<std::size_t>(i)] = c;
        moves[y] += params_.theta_sub / 3.0;
      }

  // Point insertions: total mass lambda_pt over (m + 1) positions x 4
  // letters.
  if (params_.lambda_pt > 0.0) {
    const double each = params_.lambda_pt / (4.0 * static_cast<double>(m + 1));
    for (long i = 0; i <= m; ++i)
      for (char c : kAlphabet) {
        std::string y = x;
        y.insert(y.begin() + i, c);
        moves[y] += each;
      }
  }

  // Point deletions: mu_pt per site.
  if (params_.mu_pt > 0.0)
    for (long i = 0; i < m; ++i) {
      std::string y = x;
      y.erase(y.begin() + i);
      moves[y] += params_.mu_pt;
    }

  // Slipped-strand duplications: copy the block x[j-len .. j-1] in place at
  // position j; total mass lambda_ssm over all candidate sites.
  if (params_.lambda_ssm > 0.0) {
    long candidates = 0;
    for (long len = 1; len <= params_.ssm_max_len; ++len)
      if (m >= len) candidates += m - len + 1;
    if (candidates > 0) {
      const double each = params_.lambda_ssm / static_cast<double>(candidates);
      for (long len = 1; len <= params_.ssm_max_len; ++len)
        for (long j = len; j <= m; ++j) {
          std::string y = x;
          y.insert(static_cast<std::size_t>(j),
                   x.substr(static_cast<std::size_t>(j - len),
                            static_cast<std::size_t>(len)));
          moves[y] += each;
        }
    }
  }

  // Slipped-strand deletions: remove the repeated block.
  if (params_.mu_ssm > 0.0)
    for (long len = 1; len <= params_.ssm_max_len; ++len)
      for (long j = len; j + len <= m; ++j)
        if (x.compare(static_cast<std::size_t>(j), static_cast<std::size_t>(len),
                      x, static_cast<std::size_t>(j - len),
                      static_cast<std::size_t>(len)) == 0) {
          std::string y = x;
          y.erase(static_cast<std::size_t>(j), static_cast<std::size_t>(len));
          moves[y] += params_.mu_ssm;
        }

  moves.erase(x);  // guard: a jump must change the state
  double total = 0.0;
  for (const auto& [y, r] : moves) total += r;
  std::vector<Transition<std::string>> out;
  out.reserve(moves.size());
  if (total > 0.0)
    for (auto& [y, r] : moves) out.push_back({y, r / total});
  return out;
}

bool StringModel::has_stationary() const {
  return params_.lambda_ssm == 0.0 && params_.mu_ssm == 0.0 &&
         params_.mu_pt > 0.0;
}

double StringModel::log_stationary(const std::string& x) const {
  if (!has_stationary())
    throw std::invalid_argument(
        "string model: no closed-form stationary law with slipped-strand "
        "moves enabled");
  if (!is_dna(x)) throw std::invalid_argument("string model: non-DNA state");
  const double c = params_.lambda_pt / params_.mu_pt;
  const double m = static_cast<double>(x.size());
  if (x.empty()) return -c;
  if (c == 0.0) return -std::numeric_limits<double>::infinity();
  return -c + m * std::log(c) - std::lgamma(m + 1.0) - m * std::log(4.0);
}

}  // namespace tips
