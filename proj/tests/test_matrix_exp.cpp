#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

#include "tips/matrix_exp.hpp"
#include "tips/rng.hpp"

using namespace tips;

TEST_CASE("exponential of the zero matrix is the identity") {
  const Eigen::MatrixXd z = Eigen::MatrixXd::Zero(4, 4);
  const Eigen::MatrixXd e = matrix_exponential(z);
  CHECK((e - Eigen::MatrixXd::Identity(4, 4)).norm() == 0.0);
}

TEST_CASE("scalar and diagonal cases reduce to exp") {
  Eigen::MatrixXd a(1, 1);
  a << -3.25;
  CHECK(matrix_exponential(a)(0, 0) ==
        doctest::Approx(std::exp(-3.25)).epsilon(1e-14));

  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(3, 3);
  d(0, 0) = 1.0;
  d(1, 1) = -2.0;
  d(2, 2) = 0.5;
  const Eigen::MatrixXd e = matrix_exponential(d);
  CHECK(e(0, 0) == doctest::Approx(std::exp(1.0)).epsilon(1e-14));
  CHECK(e(1, 1) == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
  CHECK(e(2, 2) == doctest::Approx(std::exp(0.5)).epsilon(1e-14));
  CHECK(std::abs(e(0, 1)) == 0.0);
}

TEST_CASE("nilpotent matrices terminate the series exactly") {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2, 2);
  a(0, 1) = 1.0;
  const Eigen::MatrixXd e = matrix_exponential(a);
  CHECK(e(0, 0) == doctest::Approx(1.0));
  CHECK(e(0, 1) == doctest::Approx(1.0));
  CHECK(e(1, 0) == doctest::Approx(0.0));
  CHECK(e(1, 1) == doctest::Approx(1.0));

  // Large norm forces the scaling-and-squaring path; the result is still
  // I + A because A squares to zero.
  a(0, 1) = 4096.0;
  const Eigen::MatrixXd big = matrix_exponential(a);
  CHECK(big(0, 1) == doctest::Approx(4096.0).epsilon(1e-12));
  CHECK(big(1, 0) == 0.0);
}

TEST_CASE("rotation generator produces sine and cosine") {
  const double theta = 1.0;
  Eigen::MatrixXd a(2, 2);
  a << 0.0, -theta, theta, 0.0;
  const Eigen::MatrixXd e = matrix_exponential(a);
  CHECK(e(0, 0) == doctest::Approx(std::cos(theta)).epsilon(1e-14));
  CHECK(e(0, 1) == doctest::Approx(-std::sin(theta)).epsilon(1e-14));
  CHECK(e(1, 0) == doctest::Approx(std::sin(theta)).epsilon(1e-14));
  CHECK(e(1, 1) == doctest::Approx(std::cos(theta)).epsilon(1e-14));
}

TEST_CASE("exp(A) exp(-A) recovers the identity") {
  RngStream rng(101, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform_index(6));
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = 4.0 * (rng.uniform01() - 0.5);
    const Eigen::MatrixXd prod =
        matrix_exponential(a) * matrix_exponential(-a);
    CHECK((prod - Eigen::MatrixXd::Identity(n, n)).norm() < 1e-11);
  }
}

TEST_CASE("agrees with an independent implementation on random matrices") {
  RngStream rng(102, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + static_cast<int>(rng.uniform_index(8));
    const double scale = std::pow(10.0, -1.0 + 3.0 * rng.uniform01());
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        a(i, j) = scale * (rng.uniform01() - 0.5);
    const Eigen::MatrixXd mine = matrix_exponential(a);
    const Eigen::MatrixXd reference = a.exp();
    const double denom = std::max(1.0, reference.norm());
    CHECK((mine - reference).norm() / denom < 1e-12);
  }
}

TEST_CASE("generator exponentials are stochastic matrices") {
  RngStream rng(103, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform_index(7));
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      double total = 0.0;
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        q(i, j) = rng.uniform01() * 3.0;
        total += q(i, j);
      }
      q(i, i) = -total;
    }
    const Eigen::MatrixXd p = matrix_exponential(1.7 * q);
    for (int i = 0; i < n; ++i) {
      double row = 0.0;
      for (int j = 0; j < n; ++j) {
        CHECK(p(i, j) >= -1e-13);
        row += p(i, j);
      }
      CHECK(row == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("rejects non-square and non-finite input") {
  CHECK_THROWS_AS(matrix_exponential(Eigen::MatrixXd::Zero(2, 3)),
                  std::invalid_argument);
  Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(2, 2);
  bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(matrix_exponential(bad), std::invalid_argument);
  bad(0, 0) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(matrix_exponential(bad), std::invalid_argument);
  CHECK(matrix_exponential(Eigen::MatrixXd()).size() == 0);
}
