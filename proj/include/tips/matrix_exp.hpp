#pragma once

#include <Eigen/Dense>

namespace tips {

// Dense matrix exponential by scaling and squaring with diagonal rational
// approximants of degree 3/5/7/9/13, the degree and the scaling power chosen
// from the 1-norm so the backward error stays at unit-roundoff level.
// Throws std::invalid_argument for non-square or non-finite input.
Eigen::MatrixXd matrix_exponential(const Eigen::MatrixXd& a);

}  // namespace tips
