#include "biaslab/moments.hpp"

#include <algorithm>
#include <cmath>

#include "biaslab/error.hpp"
#include "biaslab/linalg.hpp"

namespace biaslab {
namespace {

std::size_t find_name(std::span<const std::string> names, std::string_view name) {
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw Error(ErrorKind::UnknownColumn, "no column '" + std::string(name) + "'");
    return static_cast<std::size_t>(it - names.begin());
}

}  // namespace

void Moments::add(std::span<const double> row) {
    const auto k = mean.size();
    ++n;
    const double inv_n = 1.0 / static_cast<double>(n);
    const double weight = static_cast<double>(n - 1) * inv_n;
    // Cross products first: they need the deviations from the old mean.
    for (Eigen::Index j = 0; j < k; ++j) {
        const double dj = row[static_cast<std::size_t>(j)] - mean(j);
        for (Eigen::Index i = 0; i < k; ++i)
            comoment(i, j) += weight * (row[static_cast<std::size_t>(i)] - mean(i)) * dj;
    }
    for (Eigen::Index i = 0; i < k; ++i) mean(i) += (row[static_cast<std::size_t>(i)] - mean(i)) * inv_n;
}

void Moments::merge(const Moments& other) {
    if (other.n == 0) return;
    if (n == 0) {
        *this = other;
        return;
    }
    const double na = static_cast<double>(n);
    const double nb = static_cast<double>(other.n);
    const double total = na + nb;
    const Eigen::VectorXd delta = other.mean - mean;
    mean += delta * (nb / total);
    comoment += other.comoment + (na * nb / total) * (delta * delta.transpose());
    n += other.n;
}

Eigen::MatrixXd Moments::covariance() const {
    return n > 1 ? Eigen::MatrixXd(comoment / static_cast<double>(n - 1)) : Eigen::MatrixXd::Zero(mean.size(), mean.size());
}

double RegressionResult::coefficient(std::string_view name) const {
    return coefficients[find_name(regressors, name)];
}

double RegressionResult::standard_error(std::string_view name) const {
    return standard_errors[find_name(regressors, name)];
}

RegressionResult ols_from_moments(const Moments& m, std::span<const std::string> names, std::string_view response,
                                  std::span<const std::string> regressors) {
    const std::size_t y = find_name(names, response);
    std::vector<std::size_t> idx;
    for (const auto& r : regressors) {
        const std::size_t i = find_name(names, r);
        if (i == y || std::find(idx.begin(), idx.end(), i) != idx.end())
            throw Error(ErrorKind::SingularDesign, "regressor '" + r + "' repeated or equal to the response");
        idx.push_back(i);
    }
    const auto k = static_cast<Eigen::Index>(idx.size());
    if (m.n < idx.size() + 2)
        throw Error(ErrorKind::InsufficientData, "need at least " + std::to_string(idx.size() + 2) + " rows, have " +
                                                     std::to_string(m.n));
    Eigen::MatrixXd sxx(k, k);
    Eigen::VectorXd sxy(k);
    Eigen::VectorXd xbar(k);
    const auto yi = static_cast<Eigen::Index>(y);
    for (Eigen::Index a = 0; a < k; ++a) {
        const auto ia = static_cast<Eigen::Index>(idx[static_cast<std::size_t>(a)]);
        sxy(a) = m.comoment(ia, yi);
        xbar(a) = m.mean(ia);
        for (Eigen::Index b = 0; b < k; ++b) sxx(a, b) = m.comoment(ia, static_cast<Eigen::Index>(idx[static_cast<std::size_t>(b)]));
    }
    const Eigen::MatrixXd inv = linalg::inverse_spd(sxx, "least squares");
    const Eigen::VectorXd beta = inv * sxy;
    const double rss = std::max(0.0, m.comoment(yi, yi) - beta.dot(sxy));
    const double dof = static_cast<double>(m.n) - static_cast<double>(k) - 1.0;

    RegressionResult out;
    out.regressors.assign(regressors.begin(), regressors.end());
    out.residual_variance = rss / dof;
    out.coefficient_covariance = out.residual_variance * inv;
    for (Eigen::Index a = 0; a < k; ++a) {
        out.coefficients.push_back(beta(a));
        out.standard_errors.push_back(std::sqrt(std::max(0.0, out.coefficient_covariance(a, a))));
    }
    out.intercept = m.mean(yi) - beta.dot(xbar);
    out.intercept_se = std::sqrt(out.residual_variance * (1.0 / static_cast<double>(m.n) + xbar.dot(inv * xbar)));
    out.n_used = m.n;
    return out;
}

}  // namespace biaslab
