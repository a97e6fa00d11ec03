#include "tips/matrix_exp.hpp"

#include <cmath>
#include <stdexcept>

namespace tips {

namespace {

using Eigen::MatrixXd;

// Numerator coefficients of the [m/m] diagonal rational approximants to
// exp(x); the denominator coefficients are the same with alternating signs.
const double kB3[] = {120.0, 60.0, 12.0, 1.0};
const double kB5[] = {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
const double kB7[] = {17297280.0, 8648640.0, 1995840.0, 277200.0,
                      25200.0,    1512.0,    56.0,      1.0};
const double kB9[] = {17643225600.0, 8821612800.0, 2075673600.0, 302702400.0,
                      30270240.0,    2162160.0,    110880.0,     3960.0,
                      90.0,          1.0};
const double kB13[] = {64764752532480000.0,
                       32382376266240000.0,
                       7771770303897600.0,
                       1187353796428800.0,
                       129060195264000.0,
                       10559470521600.0,
                       670442572800.0,
                       33522128640.0,
                       1323241920.0,
                       40840800.0,
                       960960.0,
                       16380.0,
                       182.0,
                       1.0};

// 1-norm bounds under which each degree meets the backward-error target.
constexpr double kTheta3 = 1.495585217958292e-2;
constexpr double kTheta5 = 2.539398330063230e-1;
constexpr double kTheta7 = 9.504178996162932e-1;
constexpr double kTheta9 = 2.097847961257068e0;
constexpr double kTheta13 = 5.371920351148152e0;

double one_norm(const MatrixXd& a) {
  if (a.cols() == 0) return 0.0;
  return a.cwiseAbs().colwise().sum().maxCoeff();
}

// exp(a) ~ (-u + v)^{-1} (u + v) where u collects the odd and v the even
// powers weighted by the coefficient table.
MatrixXd pade_low(const MatrixXd& a, const double* b, int m) {
  const long n = a.rows();
  const MatrixXd id = MatrixXd::Identity(n, n);
  const MatrixXd a2 = a * a;
  MatrixXd even = MatrixXd::Zero(n, n);
  MatrixXd odd = MatrixXd::Zero(n, n);
  MatrixXd pow = id;  // a^(2k)
  for (int k = 0; 2 * k <= m; ++k) {
    even += b[2 * k] * pow;
    if (2 * k + 1 <= m) odd += b[2 * k + 1] * pow;
    if (2 * k + 2 <= m) pow = pow * a2;
  }
  const MatrixXd u = a * odd;
  return (even - u).partialPivLu().solve(even + u);
}

MatrixXd pade13(const MatrixXd& a) {
  const long n = a.rows();
  const double* b = kB13;
  const MatrixXd id = MatrixXd::Identity(n, n);
  const MatrixXd a2 = a * a;
  const MatrixXd a4 = a2 * a2;
  const MatrixXd a6 = a4 * a2;
  const MatrixXd u =
      a * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 +
           b[3] * a2 + b[1] * id);
  const MatrixXd v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 +
                     b[4] * a4 + b[2] * a2 + b[0] * id;
  return (v - u).partialPivLu().solve(v + u);
}

}  // namespace

Eigen::MatrixXd matrix_exponential(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols())
    throw std::invalid_argument("matrix_exponential: matrix must be square");
  if (!a.allFinite())
    throw std::invalid_argument("matrix_exponential: non-finite entries");
  const long n = a.rows();
  if (n == 0) return MatrixXd(0, 0);

  const double nrm = one_norm(a);
  if (nrm <= kTheta3) return pade_low(a, kB3, 3);
  if (nrm <= kTheta5) return pade_low(a, kB5, 5);
  if (nrm <= kTheta7) return pade_low(a, kB7, 7);
  if (nrm <= kTheta9) return pade_low(a, kB9, 9);

  int squarings = 0;
  double scaled = nrm;
  while (scaled > kTheta13) {
    scaled *= 0.5;
    ++squarings;
  }
  MatrixXd r = pade13(a / std::ldexp(1.0, squarings));
  for (int i = 0; i < squarings; ++i) r = r * r;
  return r;
}

}  // namespace tips
