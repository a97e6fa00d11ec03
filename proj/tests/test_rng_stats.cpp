#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "tips/rng.hpp"
#include "tips/stats.hpp"

using namespace tips;

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

TEST_CASE("seed derivation is deterministic and separates inputs") {
  CHECK(derive_seed(1, 2, 3) == derive_seed(1, 2, 3));
  CHECK(derive_seed(1, 2) == derive_seed(1, 2, 0));
  CHECK(derive_seed(1, 2) != derive_seed(1, 3));
  CHECK(derive_seed(1, 2) != derive_seed(2, 2));
  CHECK(derive_seed(1, 2, 3) != derive_seed(1, 3, 2));

  // No collisions over a realistic block of (stream, substream) labels.
  std::vector<std::uint64_t> seen;
  for (std::uint64_t a = 0; a < 200; ++a)
    for (std::uint64_t b = 0; b < 20; ++b) seen.push_back(derive_seed(7, a, b));
  std::sort(seen.begin(), seen.end());
  CHECK(std::adjacent_find(seen.begin(), seen.end()) == seen.end());
}

TEST_CASE("streams replay exactly and differ across ids") {
  RngStream a(42, 0), b(42, 0), c(42, 1);
  bool all_equal = true;
  bool any_equal_to_c = false;
  for (int i = 0; i < 100; ++i) {
    const auto va = a.next_u64();
    if (va != b.next_u64()) all_equal = false;
    if (va == c.next_u64()) any_equal_to_c = true;
  }
  CHECK(all_equal);
  CHECK_FALSE(any_equal_to_c);
}

TEST_CASE("uniform01 stays in the half-open unit interval") {
  RngStream rng(9, 0);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("exponential draws have the configured mean") {
  RngStream rng(11, 0);
  const double rate = 2.5;
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) sum += rng.exponential(rate);
  const double mean = sum / n;
  // SE of the mean is (1/rate)/sqrt(n) = 0.0009; allow 5 SE.
  CHECK(mean == doctest::Approx(1.0 / rate).epsilon(0.012));
  CHECK_THROWS_AS(rng.exponential(0.0), std::invalid_argument);
  CHECK_THROWS_AS(rng.exponential(-1.0), std::invalid_argument);
}

TEST_CASE("geometric counts match their pmf") {
  RngStream rng(13, 0);
  CHECK(rng.geometric_count(1.0) == 1);

  const double beta = 0.3;
  const int n = 200000;
  std::vector<long> counts(8, 0);
  for (int i = 0; i < n; ++i) {
    const long k = rng.geometric_count(beta);
    REQUIRE(k >= 1);
    if (k <= 7) ++counts[static_cast<std::size_t>(k)];
  }
  for (long k = 1; k <= 5; ++k) {
    const double p = std::exp(geometric_log_pmf(k, beta));
    const double observed = static_cast<double>(counts[static_cast<std::size_t>(k)]) / n;
    const double se = std::sqrt(p * (1.0 - p) / n);
    CHECK(std::abs(observed - p) < 5.0 * se);
  }
  CHECK(geometric_log_pmf(1, 0.3) == doctest::Approx(std::log(0.3)));
  CHECK(geometric_log_pmf(3, 0.3) ==
        doctest::Approx(std::log(0.3 * 0.7 * 0.7)));
  CHECK(geometric_log_pmf(0, 0.3) == kNegInf);
  CHECK(geometric_log_pmf(1, 1.0) == 0.0);
  CHECK(geometric_log_pmf(2, 1.0) == kNegInf);
}

TEST_CASE("poisson inversion has the right mean at small rates") {
  RngStream rng(17, 0);
  const double mean = 3.2;
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) sum += static_cast<double>(rng.poisson(mean));
  CHECK(sum / n == doctest::Approx(mean).epsilon(0.01));
  CHECK(rng.poisson(0.0) == 0);
}

TEST_CASE("uniform_index covers its range") {
  RngStream rng(19, 0);
  std::vector<long> hits(5, 0);
  for (int i = 0; i < 50000; ++i)
    ++hits[static_cast<std::size_t>(rng.uniform_index(5))];
  for (long h : hits) CHECK(h > 8000);
  CHECK_THROWS_AS(rng.uniform_index(0), std::invalid_argument);
}

TEST_CASE("log_sum_exp handles frozen values and empty input") {
  const std::vector<double> v = {std::log(1.0), std::log(2.0), std::log(3.0)};
  CHECK(log_sum_exp(v) == doctest::Approx(std::log(6.0)).epsilon(1e-12));
  CHECK(log_sum_exp({}) == kNegInf);
  const std::vector<double> with_zero = {kNegInf, std::log(2.0)};
  CHECK(log_sum_exp(with_zero) == doctest::Approx(std::log(2.0)));
  const std::vector<double> all_zero = {kNegInf, kNegInf};
  CHECK(log_sum_exp(all_zero) == kNegInf);
  // Shift robustness: values around -1000 must not underflow to -inf.
  const std::vector<double> tiny = {-1000.0, -1000.0};
  CHECK(log_sum_exp(tiny) == doctest::Approx(-1000.0 + std::log(2.0)));
}

TEST_CASE("weight statistics reproduce hand-computed values") {
  const std::vector<double> lw = {std::log(1.0), std::log(2.0), std::log(3.0)};
  const auto ws = weight_statistics(lw);
  CHECK(ws.mean == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(ws.log_mean == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(ws.variance == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ws.ess == doctest::Approx(36.0 / 14.0).epsilon(1e-12));
  CHECK(ws.zero_count == 0);
}

TEST_CASE("weight statistics count and survive zero weights") {
  const std::vector<double> lw = {kNegInf, std::log(4.0), kNegInf,
                                  std::log(2.0)};
  const auto ws = weight_statistics(lw);
  CHECK(ws.zero_count == 2);
  CHECK(ws.mean == doctest::Approx(1.5));

  const std::vector<double> dead = {kNegInf, kNegInf};
  const auto gone = weight_statistics(dead);
  CHECK(gone.zero_count == 2);
  CHECK(gone.mean == 0.0);
  CHECK(gone.log_mean == kNegInf);
  CHECK(gone.ess == 0.0);

  CHECK_THROWS_AS(weight_statistics({}), std::invalid_argument);
}

TEST_CASE("quantile interpolates between order statistics") {
  std::vector<double> v = {4.0, 1.0, 3.0, 2.0};
  CHECK(quantile(v, 0.0) == 1.0);
  CHECK(quantile(v, 1.0) == 4.0);
  CHECK(quantile(v, 0.5) == doctest::Approx(2.5));
  CHECK(quantile(v, 0.25) == doctest::Approx(1.75));
  CHECK(quantile({5.0}, 0.5) == 5.0);
  CHECK_THROWS_AS(quantile({}, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(quantile({1.0}, 1.5), std::invalid_argument);
}

TEST_CASE("chain ess floors at 1 for constant chains") {
  const std::vector<double> flat(100, 3.0);
  CHECK(chain_ess(flat) == 1.0);
  const std::vector<double> single = {1.0};
  CHECK(chain_ess(single) == 1.0);
  CHECK(chain_ess({}) == 0.0);
}

TEST_CASE("chain ess is close to n for independent draws") {
  RngStream rng(23, 0);
  std::vector<double> x;
  for (int i = 0; i < 20000; ++i) x.push_back(rng.uniform01());
  const double ess = chain_ess(x);
  CHECK(ess > 0.85 * x.size());
  CHECK(ess <= static_cast<double>(x.size()));
}

TEST_CASE("chain ess shrinks under strong positive correlation") {
  RngStream rng(29, 0);
  std::vector<double> x;
  double state = 0.0;
  for (int i = 0; i < 20000; ++i) {
    state = 0.95 * state + (rng.uniform01() - 0.5);
    x.push_back(state);
  }
  // AR(1) with phi = 0.95 has an integrated autocorrelation time around
  // (1 + phi) / (1 - phi) = 39.
  const double ess = chain_ess(x);
  CHECK(ess < 0.1 * x.size());
  CHECK(ess > 1.0);
}
