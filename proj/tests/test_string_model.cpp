#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "support.hpp"
#include "tips/rng.hpp"
#include "tips/string_model.hpp"

using namespace tips;

namespace {

constexpr const char* kAlphabet = "ACGT";

std::string random_string(RngStream& rng, int max_len) {
  const long len = rng.uniform_index(static_cast<std::uint64_t>(max_len + 1));
  std::string s;
  for (long i = 0; i < len; ++i)
    s.push_back(kAlphabet[rng.uniform_index(4)]);
  return s;
}

// Independent tandem-repeat scan, written directly from the definition.
long repeat_site_scan(const std::string& x, int max_len) {
  long count = 0;
  const long m = static_cast<long>(x.size());
  for (long j = 1; j < m; ++j)
    for (long len = 1; len <= max_len; ++len) {
      if (j - len < 0 || j + len > m) continue;
      if (x.compare(static_cast<std::size_t>(j), static_cast<std::size_t>(len),
                    x, static_cast<std::size_t>(j - len),
                    static_cast<std::size_t>(len)) == 0)
        ++count;
    }
  return count;
}

// Independent edit-distance table.
long dp_edit_distance(const std::string& a, const std::string& b) {
  const std::size_t n = a.size(), m = b.size();
  std::vector<long> row(m + 1);
  for (std::size_t j = 0; j <= m; ++j) row[j] = static_cast<long>(j);
  for (std::size_t i = 1; i <= n; ++i) {
    long diag = row[0];
    row[0] = static_cast<long>(i);
    for (std::size_t j = 1; j <= m; ++j) {
      const long sub = diag + (a[i - 1] == b[j - 1] ? 0 : 1);
      diag = row[j];
      row[j] = std::min({sub, row[j] + 1, row[j - 1] + 1});
    }
  }
  return row[m];
}

// Every string one edit move away from x, generated without reference to
// the model's own enumeration.
std::set<std::string> brute_force_products(const std::string& x, int max_len) {
  std::set<std::string> out;
  const std::size_t m = x.size();
  for (std::size_t i = 0; i < m; ++i)
    for (const char c : std::string(kAlphabet)) {
      if (c == x[i]) continue;
      std::string y = x;
      y[i] = c;
      out.insert(y);
    }
  for (std::size_t i = 0; i <= m; ++i)
    for (const char c : std::string(kAlphabet))
      out.insert(std::string(x).insert(i, 1, c));
  for (std::size_t i = 0; i < m; ++i)
    out.insert(std::string(x).erase(i, 1));
  for (std::size_t j = 1; j <= m; ++j)
    for (std::size_t len = 1; len <= static_cast<std::size_t>(max_len); ++len) {
      if (len > j) continue;
      std::string y = x;
      y.insert(j, x.substr(j - len, len));
      out.insert(y);
    }
  for (std::size_t j = 1; j < m; ++j)
    for (std::size_t len = 1; len <= static_cast<std::size_t>(max_len); ++len) {
      if (len > j || j + len > m) continue;
      if (x.compare(j, len, x, j - len, len) == 0)
        out.insert(std::string(x).erase(j, len));
    }
  out.erase(x);
  return out;
}

}  // namespace

TEST_CASE("holding rates match the displayed sum") {
  const StringModel m(testutil::reference_string_params());
  CHECK(m.rate("") == doctest::Approx(2.05).epsilon(1e-12));
  CHECK(m.rate("CAG") == doctest::Approx(2.74).epsilon(1e-12));

  // Appending a fresh character to a repeat-free string adds exactly the
  // per-base substitution and deletion rates.
  CHECK(m.rate("ACGT") - m.rate("ACG") ==
        doctest::Approx(0.03 + 0.2).epsilon(1e-12));
  CHECK(m.rate("AC") - m.rate("A") == doctest::Approx(0.23).epsilon(1e-12));

  // Repeat sites add mu_ssm each.
  CHECK(m.rate("AAA") ==
        doctest::Approx(3 * 0.03 + 0.05 + 3 * 0.2 + 2.0 + 2 * 2.0)
            .epsilon(1e-12));
}

TEST_CASE("tandem repeat site counting") {
  CHECK(ssm_deletion_count("ACGT", 3) == 0);
  CHECK(ssm_deletion_count("TATA", 3) == 1);
  CHECK(ssm_deletion_count("AAA", 3) == 2);
  CHECK(ssm_deletion_count("", 3) == 0);
  CHECK(ssm_deletion_count("A", 3) == 0);

  RngStream rng(811, 0);
  for (int i = 0; i < 2000; ++i) {
    const auto s = random_string(rng, 14);
    CHECK(ssm_deletion_count(s, 3) == repeat_site_scan(s, 3));
    CHECK(ssm_deletion_count(s, 1) == repeat_site_scan(s, 1));
  }
}

TEST_CASE("edit distance against an independent table") {
  CHECK(levenshtein_distance("CAG", "CAG") == 0);
  CHECK(levenshtein_distance("CAG", "CG") == 1);
  CHECK(levenshtein_distance("", "ACGT") == 4);
  CHECK(levenshtein_distance("KITTEN", "SITTING") == 3);

  RngStream rng(821, 0);
  for (int i = 0; i < 1000; ++i) {
    const auto a = random_string(rng, 9);
    const auto b = random_string(rng, 9);
    const long d = levenshtein_distance(a, b);
    CHECK(d == dp_edit_distance(a, b));
    CHECK(d == levenshtein_distance(b, a));
  }
}

TEST_CASE("neighbor masses on hand-checked states") {
  const StringModel m(testutil::reference_string_params());

  const auto find_mass = [](const std::vector<Transition<std::string>>& options,
                            const std::string& y) {
    for (const auto& t : options)
      if (t.state == y) return t.prob;
    return 0.0;
  };

  // Deleting one character of CAG: mu_pt over the total rate.
  const auto cag = m.neighbors("CAG");
  CHECK(find_mass(cag, "AG") == doctest::Approx(0.2 / 2.74).epsilon(1e-12));
  CHECK(find_mass(cag, "CG") == doctest::Approx(0.2 / 2.74).epsilon(1e-12));
  CHECK(find_mass(cag, "CA") == doctest::Approx(0.2 / 2.74).epsilon(1e-12));
  // One substitution product: theta_sub split over the three alternatives.
  CHECK(find_mass(cag, "AAG") ==
        doctest::Approx(0.03 / (3 * 2.74)).epsilon(1e-12));

  // The empty string only has point insertions; the duplication mass is
  // renormalized away, leaving the four single letters at 1/4 each.
  const auto empty = m.neighbors("");
  REQUIRE(empty.size() == 4);
  for (const auto& t : empty) {
    CHECK(t.state.size() == 1);
    CHECK(t.prob == doctest::Approx(0.25).epsilon(1e-12));
  }

  // "CCA" out of "CA" merges two point insertions with one duplication.
  const double lambda_ca = m.rate("CA");
  CHECK(lambda_ca == doctest::Approx(2.51).epsilon(1e-12));
  const double expected_cca =
      2.0 * (0.05 / (4.0 * 3.0 * lambda_ca)) + 2.0 / (3.0 * lambda_ca);
  CHECK(find_mass(m.neighbors("CA"), "CCA") ==
        doctest::Approx(expected_cca).epsilon(1e-12));
}

TEST_CASE("neighbor distributions are normalized and self-free") {
  const StringModel m(testutil::reference_string_params());
  RngStream rng(853, 0);
  for (int i = 0; i < 1000; ++i) {
    const auto x = random_string(rng, 12);
    const auto options = m.neighbors(x);
    REQUIRE(!options.empty());
    double total = 0.0;
    for (const auto& t : options) {
      CHECK(t.prob > 0.0);
      CHECK(t.state != x);
      total += t.prob;
    }
    CHECK(std::abs(total - 1.0) < 1e-9);
    // Lexicographic successor order, no duplicates.
    for (std::size_t j = 1; j < options.size(); ++j)
      CHECK(options[j - 1].state < options[j].state);
  }
}

TEST_CASE("total lengthening mass is independent of the string length") {
  // Without duplication moves, the only lengthening moves are point
  // insertions, whose total mass is lambda_pt / lambda(x) whatever m is.
  StringParams plain = testutil::reference_string_params();
  plain.lambda_ssm = 0.0;
  plain.mu_ssm = 0.0;
  const StringModel m(plain);
  for (const std::string x : {"A", "AC", "ACGT", "ACGTACGT"}) {
    double lengthening = 0.0;
    for (const auto& t : m.neighbors(x))
      if (t.state.size() > x.size()) lengthening += t.prob;
    CHECK(lengthening == doctest::Approx(0.05 / m.rate(x)).epsilon(1e-12));
  }

  // With duplications the lengthening mass is (lambda_pt + lambda_ssm) / lambda.
  const StringModel full(testutil::reference_string_params());
  for (const std::string x : {"A", "CAG", "TATA"}) {
    double lengthening = 0.0;
    for (const auto& t : full.neighbors(x))
      if (t.state.size() > x.size()) lengthening += t.prob;
    CHECK(lengthening ==
          doctest::Approx((0.05 + 2.0) / full.rate(x)).epsilon(1e-12));
  }
}

TEST_CASE("neighbor supports match brute-force move generation") {
  const StringModel m(testutil::reference_string_params());
  RngStream rng(863, 0);
  std::vector<std::string> states = {"", "A", "AA", "TATA", "ACGT", "CCCC"};
  for (int i = 0; i < 60; ++i) states.push_back(random_string(rng, 4));
  for (const auto& x : states) {
    const auto expected = brute_force_products(x, 3);
    std::set<std::string> got;
    for (const auto& t : m.neighbors(x)) got.insert(t.state);
    // The empty string keeps only its insertion products.
    if (x.empty()) {
      CHECK(got == std::set<std::string>{"A", "C", "G", "T"});
      continue;
    }
    CHECK(got == expected);
  }
}

TEST_CASE("stationary law of the point-indel submodel") {
  StringParams plain;
  plain.theta_sub = 0.1;
  plain.lambda_pt = 2.0;
  plain.mu_pt = 0.5;
  const StringModel m(plain);
  REQUIRE(m.has_stationary());

  // Length weight at the empty string is the Poisson zero class.
  CHECK(m.log_stationary("") == doctest::Approx(-4.0).epsilon(1e-12));

  // Summed over lengths (4^m strings of mass (1/4)^m each), the Poisson
  // pmf over string lengths is recovered and sums to one.
  double total = 0.0;
  double mean = 0.0;
  std::string x;
  for (int len = 0; len <= 200; ++len) {
    const double pmf_len =
        std::exp(m.log_stationary(x) + len * std::log(4.0));
    total += pmf_len;
    mean += len * pmf_len;
    x.push_back('A');
  }
  CHECK(std::abs(total - 1.0) < 1e-12);
  CHECK(mean == doctest::Approx(4.0).epsilon(1e-10));

  const StringModel ssm(testutil::reference_string_params());
  CHECK_FALSE(ssm.has_stationary());
  CHECK_THROWS_AS(ssm.log_stationary("A"), std::logic_error);
}

TEST_CASE("levenshtein potential is valid on sampled neighborhoods") {
  const StringModel m(testutil::reference_string_params());
  const auto pot = testutil::levenshtein_potential({"ACGTA"});
  RngStream rng(877, 0);
  std::vector<std::string> states = {"ACGTA"};
  while (states.size() < 1000) states.push_back(random_string(rng, 12));
  const auto report =
      validate_potential(m, pot, std::span<const std::string>(states));
  CHECK(report.states_checked == 1000);
  CHECK(report.valid());
  CHECK(report.violation_count == 0);
  // Multi-character duplications move the edit distance by up to 3 in one
  // jump, so the unit-step condition is only advisory here.
  CHECK_FALSE(report.unit_steps);
  for (long d : report.observed_deltas) {
    CHECK(d >= -3);
    CHECK(d <= 3);
  }
}

TEST_CASE("invalid parameters and inputs are rejected") {
  StringParams bad = testutil::reference_string_params();
  bad.theta_sub = -0.1;
  CHECK_THROWS_AS(StringModel{bad}, std::invalid_argument);
  bad = testutil::reference_string_params();
  bad.ssm_max_len = 0;
  CHECK_THROWS_AS(StringModel{bad}, std::invalid_argument);

  CHECK(is_dna("ACGT"));
  CHECK(is_dna(""));
  CHECK_FALSE(is_dna("ACGU"));
  CHECK_FALSE(is_dna("acgt"));

  const StringModel m(testutil::reference_string_params());
  CHECK_THROWS_AS(m.rate("ACGU"), std::invalid_argument);
  CHECK_THROWS_AS(m.neighbors("XYZ"), std::invalid_argument);
}
