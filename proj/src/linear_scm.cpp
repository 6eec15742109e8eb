#include "biaslab/linear_scm.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "biaslab/error.hpp"
#include "biaslab/linalg.hpp"

namespace biaslab {
namespace {

constexpr double kFeasibilitySlack = 1e-12;

// Covariance by forward recursion over a topological order:
//   Cov(v, w) = sum_p b[v,p] Cov(p, w)  for w processed before v,
//   Var(v)    = sum_p b[v,p] Cov(p, v) + psi_v.
// With `derive` set, psi_v is chosen so that Var(v) = 1.
Eigen::MatrixXd forward_covariance(const CausalGraph& g, const Eigen::MatrixXd& coef, Eigen::VectorXd& noise,
                                   bool derive) {
    const auto n = static_cast<Eigen::Index>(g.size());
    Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(n, n);
    std::vector<NodeId> done;
    for (NodeId v : g.topological_order()) {
        const auto vi = static_cast<Eigen::Index>(v);
        for (NodeId w : done) {
            double s = 0.0;
            for (NodeId p : g.parents(v)) s += coef(vi, static_cast<Eigen::Index>(p)) * sigma(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(w));
            sigma(vi, static_cast<Eigen::Index>(w)) = s;
            sigma(static_cast<Eigen::Index>(w), vi) = s;
        }
        double explained = 0.0;
        for (NodeId p : g.parents(v)) explained += coef(vi, static_cast<Eigen::Index>(p)) * sigma(static_cast<Eigen::Index>(p), vi);
        if (derive) {
            double residual = 1.0 - explained;
            if (residual < -kFeasibilitySlack)
                throw Error(ErrorKind::InfeasibleStandardization,
                            "node '" + g.name(v) + "': parents explain variance " + std::to_string(explained) +
                                " > 1 (deficit " + std::to_string(-residual) + ")");
            noise(vi) = std::max(residual, 0.0);
        }
        sigma(vi, vi) = explained + noise(vi);
        done.push_back(v);
    }
    return sigma;
}

double std_normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }
double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

}  // namespace

std::size_t CovarianceMatrix::index(std::string_view name) const {
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw Error(ErrorKind::UnknownNode, "unknown node '" + std::string(name) + "'");
    return static_cast<std::size_t>(it - names.begin());
}

double CovarianceMatrix::operator()(std::string_view a, std::string_view b) const {
    return values(static_cast<Eigen::Index>(index(a)), static_cast<Eigen::Index>(index(b)));
}

void EvaluationPoint::validate(const CausalGraph& graph) const {
    for (const auto& [name, value] : assignments) {
        (void)graph.id(name);
        if (!std::isfinite(value))
            throw Error(ErrorKind::InvalidArgument, "non-finite assignment for '" + name + "'");
    }
}

LinearSCM::LinearSCM(CausalGraph graph, Eigen::MatrixXd coefficients, Eigen::VectorXd noise, bool standardized)
    : graph_(std::move(graph)), coef_(std::move(coefficients)), noise_(std::move(noise)), standardized_(standardized) {
    const auto n = static_cast<Eigen::Index>(graph_.size());
    if (coef_.rows() != n || coef_.cols() != n || noise_.size() != n)
        throw Error(ErrorKind::InvalidArgument, "coefficient/noise dimensions do not match the graph");
    for (Eigen::Index c = 0; c < n; ++c) {
        if (!(noise_(c) >= 0.0) || !std::isfinite(noise_(c)))
            throw Error(ErrorKind::InvalidArgument, "noise variance of '" + graph_.name(static_cast<NodeId>(c)) +
                                                        "' must be finite and nonnegative");
        for (Eigen::Index p = 0; p < n; ++p) {
            if (!std::isfinite(coef_(c, p))) throw Error(ErrorKind::InvalidArgument, "non-finite coefficient");
            if (coef_(c, p) != 0.0 && !graph_.has_edge(static_cast<NodeId>(p), static_cast<NodeId>(c)))
                throw Error(ErrorKind::InvalidArgument, "coefficient on a non-edge");
        }
    }
    sigma_ = forward_covariance(graph_, coef_, noise_, false);
    if (standardized_) {
        for (Eigen::Index i = 0; i < n; ++i)
            if (std::abs(sigma_(i, i) - 1.0) > 1e-9)
                throw Error(ErrorKind::InfeasibleStandardization,
                            "node '" + graph_.name(static_cast<NodeId>(i)) + "' does not have unit variance");
    }
}

double LinearSCM::coefficient(std::string_view parent, std::string_view child) const {
    return coef_(static_cast<Eigen::Index>(graph_.id(child)), static_cast<Eigen::Index>(graph_.id(parent)));
}

double LinearSCM::noise_variance(std::string_view node) const {
    return noise_(static_cast<Eigen::Index>(graph_.id(node)));
}

LinearSCM build_model(const ModelSpec& spec) {
    CausalGraph graph = spec.graph();
    const auto n = static_cast<Eigen::Index>(graph.size());
    Eigen::MatrixXd coef = Eigen::MatrixXd::Zero(n, n);
    for (const auto& e : spec.edges) {
        if (!std::isfinite(e.coefficient))
            throw Error(ErrorKind::InvalidArgument, "non-finite coefficient on " + e.parent + " -> " + e.child);
        coef(static_cast<Eigen::Index>(graph.id(e.child)), static_cast<Eigen::Index>(graph.id(e.parent))) =
            e.coefficient;
    }
    Eigen::VectorXd noise = Eigen::VectorXd::Ones(n);
    if (spec.standardized) {
        (void)forward_covariance(graph, coef, noise, true);
    } else {
        for (const auto& [name, v] : spec.noise_variances) {
            if (!(v >= 0.0)) throw Error(ErrorKind::InvalidArgument, "negative noise variance for '" + name + "'");
            noise(static_cast<Eigen::Index>(graph.id(name))) = v;
        }
    }
    return LinearSCM(std::move(graph), std::move(coef), std::move(noise), spec.standardized);
}

CovarianceMatrix implied_covariance(const LinearSCM& model) {
    CovarianceMatrix out;
    for (const auto& node : model.graph().nodes()) out.names.push_back(node.name);
    out.values = model.covariance();
    return out;
}

double total_effect(const LinearSCM& model, std::string_view treatment, std::string_view outcome) {
    const auto& g = model.graph();
    const NodeId x = g.id(treatment);
    const NodeId y = g.id(outcome);
    std::vector<double> effect(g.size(), 0.0);
    effect[x] = 1.0;
    for (NodeId v : g.topological_order()) {
        if (v == x) continue;
        double s = 0.0;
        for (NodeId p : g.parents(v))
            s += model.coefficients()(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(p)) * effect[p];
        effect[v] = s;
    }
    return effect[y];
}

double partial_regression_slope(const CovarianceMatrix& cov, std::string_view outcome, std::string_view regressor,
                                std::span<const std::string> conditioning) {
    std::vector<std::size_t> idx{cov.index(regressor)};
    const std::size_t y = cov.index(outcome);
    if (idx[0] == y) throw Error(ErrorKind::InvalidArgument, "outcome and regressor coincide");
    for (const auto& c : conditioning) {
        const std::size_t i = cov.index(c);
        if (i == y || std::find(idx.begin(), idx.end(), i) != idx.end())
            throw Error(ErrorKind::InvalidArgument, "conditioning set must exclude outcome, regressor and repeats");
        idx.push_back(i);
    }
    const auto k = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXd sxx(k, k);
    Eigen::VectorXd sxy(k);
    for (Eigen::Index i = 0; i < k; ++i) {
        sxy(i) = cov.values(static_cast<Eigen::Index>(idx[i]), static_cast<Eigen::Index>(y));
        for (Eigen::Index j = 0; j < k; ++j)
            sxx(i, j) = cov.values(static_cast<Eigen::Index>(idx[i]), static_cast<Eigen::Index>(idx[j]));
    }
    return linalg::solve_spd(sxx, sxy, "partial regression")(0);
}

double partial_regression_slope(const LinearSCM& model, std::string_view outcome, std::string_view regressor,
                                std::span<const std::string> conditioning) {
    return partial_regression_slope(implied_covariance(model), outcome, regressor, conditioning);
}

double conditional_expectation(const LinearSCM& model, std::string_view target, const EvaluationPoint& point) {
    point.validate(model.graph());
    if (const auto it = point.assignments.find(std::string(target)); it != point.assignments.end())
        return it->second;
    const auto t = static_cast<Eigen::Index>(model.graph().id(target));
    const auto k = static_cast<Eigen::Index>(point.assignments.size());
    if (k == 0) return 0.0;
    std::vector<Eigen::Index> idx;
    Eigen::VectorXd values(k);
    for (const auto& [name, v] : point.assignments) {
        values(static_cast<Eigen::Index>(idx.size())) = v;
        idx.push_back(static_cast<Eigen::Index>(model.graph().id(name)));
    }
    const auto& s = model.covariance();
    Eigen::MatrixXd saa(k, k);
    Eigen::VectorXd sta(k);
    for (Eigen::Index i = 0; i < k; ++i) {
        sta(i) = s(t, idx[static_cast<std::size_t>(i)]);
        for (Eigen::Index j = 0; j < k; ++j) saa(i, j) = s(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
    }
    return sta.dot(linalg::solve_spd(saa, values, "conditional expectation"));
}

double interventional_expectation(const LinearSCM& model, std::string_view target, const EvaluationPoint& point) {
    point.validate(model.graph());
    const auto& g = model.graph();
    std::vector<double> mean(g.size(), 0.0);
    std::vector<bool> fixed(g.size(), false);
    for (const auto& [name, v] : point.assignments) {
        const NodeId id = g.id(name);
        mean[id] = v;
        fixed[id] = true;
    }
    for (NodeId v : g.topological_order()) {
        if (fixed[v]) continue;
        double s = 0.0;
        for (NodeId p : g.parents(v))
            s += model.coefficients()(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(p)) * mean[p];
        mean[v] = s;
    }
    return mean[g.id(target)];
}

CovarianceMatrix band_selected_covariance(const LinearSCM& model, std::string_view node, double center,
                                          double half_width) {
    if (!(half_width > 0.0)) throw Error(ErrorKind::InvalidArgument, "band half-width must be positive");
    CovarianceMatrix cov = implied_covariance(model);
    const auto s = static_cast<Eigen::Index>(cov.index(node));
    const double var_s = cov.values(s, s);
    if (!(var_s > 0.0)) throw Error(ErrorKind::NonpositiveVariance, "selection variable has zero variance");
    const double sd = std::sqrt(var_s);
    const double lo = (center - half_width) / sd;
    const double hi = (center + half_width) / sd;
    const double mass = std_normal_cdf(hi) - std_normal_cdf(lo);
    if (!(mass > 0.0)) throw Error(ErrorKind::EmptySelection, "band has zero probability");
    // Unbounded ends contribute zero to the moment terms.
    const auto term = [](double a) { return std::isfinite(a) ? a * std_normal_pdf(a) : 0.0; };
    const double d_pdf = std_normal_pdf(lo) - std_normal_pdf(hi);
    const double truncated =
        var_s * (1.0 + (term(lo) - term(hi)) / mass - (d_pdf / mass) * (d_pdf / mass));
    const Eigen::VectorXd col = cov.values.col(s);
    cov.values += ((truncated - var_s) / (var_s * var_s)) * (col * col.transpose());
    return cov;
}

double partial_correlation(const CovarianceMatrix& cov, std::string_view a, std::string_view b,
                           std::span<const std::string> given) {
    std::vector<std::size_t> idx{cov.index(a), cov.index(b)};
    if (idx[0] == idx[1]) throw Error(ErrorKind::InvalidArgument, "partial correlation of a variable with itself");
    for (const auto& g : given) {
        const std::size_t i = cov.index(g);
        if (std::find(idx.begin(), idx.end(), i) != idx.end())
            throw Error(ErrorKind::InvalidArgument, "conditioning set overlaps the pair");
        idx.push_back(i);
    }
    const auto k = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXd sub(k, k);
    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = 0; j < k; ++j)
            sub(i, j) = cov.values(static_cast<Eigen::Index>(idx[static_cast<std::size_t>(i)]),
                                   static_cast<Eigen::Index>(idx[static_cast<std::size_t>(j)]));
    const Eigen::MatrixXd prec = linalg::inverse_spd(sub, "partial correlation");
    return -prec(0, 1) / std::sqrt(prec(0, 0) * prec(1, 1));
}

}  // namespace biaslab
