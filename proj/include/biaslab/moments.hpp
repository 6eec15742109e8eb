#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace biaslab {

/// Count, means and centered cross-product sums of a set of variables:
/// everything least squares needs.
struct Moments {
    std::size_t n = 0;
    Eigen::VectorXd mean;
    Eigen::MatrixXd comoment;  // sum_i (x_i - mean)(x_i - mean)^T

    explicit Moments(std::size_t width = 0)
        : mean(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(width))),
          comoment(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(width), static_cast<Eigen::Index>(width))) {}

    std::size_t width() const noexcept { return static_cast<std::size_t>(mean.size()); }

    /// Streaming (Welford) update with one row.
    void add(std::span<const double> row);
    /// Pairwise combination (Chan et al.); order-sensitive only in rounding.
    void merge(const Moments& other);

    Eigen::MatrixXd covariance() const;
};

struct RegressionResult {
    std::vector<std::string> regressors;
    std::vector<double> coefficients;
    std::vector<double> standard_errors;
    Eigen::MatrixXd coefficient_covariance;  // slopes only, regressor order
    double intercept = 0.0;
    double intercept_se = 0.0;
    double residual_variance = 0.0;
    std::size_t n_used = 0;

    /// Throws UnknownColumn.
    double coefficient(std::string_view name) const;
    double standard_error(std::string_view name) const;
};

/// OLS with intercept from precomputed moments; `names` labels the moment
/// columns.  Classical (homoskedastic) standard errors.  Throws
/// UnknownColumn, SingularDesign, InsufficientData.
RegressionResult ols_from_moments(const Moments& m, std::span<const std::string> names, std::string_view response,
                                  std::span<const std::string> regressors);

}  // namespace biaslab
