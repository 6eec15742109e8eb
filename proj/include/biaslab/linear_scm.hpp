#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "biaslab/causal_graph.hpp"
#include "biaslab/model_spec.hpp"

namespace biaslab {

/// Covariance over named variables.
struct CovarianceMatrix {
    std::vector<std::string> names;
    Eigen::MatrixXd values;

    std::size_t index(std::string_view name) const;
    double operator()(std::string_view a, std::string_view b) const;
};

/// Values assigned to nodes, e.g. the (x, z) of E(Y | x, z).
struct EvaluationPoint {
    std::map<std::string, double> assignments;

    /// Throws UnknownNode for assignments outside the graph.
    void validate(const CausalGraph& graph) const;
};

/// Linear recursive SCM with independent zero-mean disturbances:
///   v = sum_{p in pa(v)} b[v,p] * p + e_v,   Var(e_v) = psi_v.
/// Immutable; the implied covariance is computed once at construction.
class LinearSCM {
public:
    /// `coefficient(child, parent)` layout; `noise` indexed by node id.
    LinearSCM(CausalGraph graph, Eigen::MatrixXd coefficients, Eigen::VectorXd noise, bool standardized);

    const CausalGraph& graph() const noexcept { return graph_; }
    bool standardized() const noexcept { return standardized_; }

    double coefficient(std::string_view parent, std::string_view child) const;
    const Eigen::MatrixXd& coefficients() const noexcept { return coef_; }
    double noise_variance(std::string_view node) const;
    const Eigen::VectorXd& noise_variances() const noexcept { return noise_; }
    const Eigen::MatrixXd& covariance() const noexcept { return sigma_; }

private:
    CausalGraph graph_;
    Eigen::MatrixXd coef_;
    Eigen::VectorXd noise_;
    Eigen::MatrixXd sigma_;
    bool standardized_;
};

/// Builds the model, deriving residual variances when the spec is
/// standardized.  Throws CyclicGraph, UnknownNode, DuplicateEdge,
/// InfeasibleStandardization.
LinearSCM build_model(const ModelSpec& spec);

CovarianceMatrix implied_covariance(const LinearSCM& model);

/// Sum over directed paths of coefficient products: d/dx E(outcome | do(x)).
double total_effect(const LinearSCM& model, std::string_view treatment, std::string_view outcome);

/// Coefficient of `regressor` in the population least-squares projection of
/// `outcome` on {regressor} + conditioning.  Throws SingularDesign,
/// InvalidArgument when the sets overlap.
double partial_regression_slope(const LinearSCM& model, std::string_view outcome, std::string_view regressor,
                                std::span<const std::string> conditioning);

/// Same projection on an arbitrary covariance matrix.
double partial_regression_slope(const CovarianceMatrix& cov, std::string_view outcome, std::string_view regressor,
                                std::span<const std::string> conditioning);

/// E(target | assignments) under jointly Gaussian disturbances.
double conditional_expectation(const LinearSCM& model, std::string_view target, const EvaluationPoint& point);

/// E(target | do(assignments)): the model with the assigned nodes' equations
/// replaced by constants.
double interventional_expectation(const LinearSCM& model, std::string_view target, const EvaluationPoint& point);

/// Covariance after keeping only units with `node` in [center - h, center + h]
/// (Gaussian truncation of one coordinate).
CovarianceMatrix band_selected_covariance(const LinearSCM& model, std::string_view node, double center,
                                          double half_width);

double partial_correlation(const CovarianceMatrix& cov, std::string_view a, std::string_view b,
                           std::span<const std::string> given);

}  // namespace biaslab
