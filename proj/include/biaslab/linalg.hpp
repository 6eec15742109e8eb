#pragma once

#include <string_view>

#include <Eigen/Dense>

namespace biaslab::linalg {

/// Condition numbers above this are treated as singular.
inline constexpr double kMaxCondition = 1e12;

/// Inverse of a symmetric positive definite matrix (a covariance or Gram
/// block).  The matrix is rescaled to unit diagonal before the condition
/// check so that variable scale does not count as collinearity.
/// Throws SingularDesign naming `context`.
Eigen::MatrixXd inverse_spd(const Eigen::MatrixXd& m, std::string_view context);

/// Solves m * x = rhs under the same guard.
Eigen::VectorXd solve_spd(const Eigen::MatrixXd& m, const Eigen::VectorXd& rhs, std::string_view context);

}  // namespace biaslab::linalg
