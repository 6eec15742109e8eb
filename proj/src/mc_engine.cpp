#include "biaslab/mc_engine.hpp"

#include <algorithm>
#include <cmath>

#include "biaslab/error.hpp"
#include "biaslab/linalg.hpp"

namespace biaslab::mc {
namespace {

std::vector<std::string> node_names(const LinearSCM& model) {
    std::vector<std::string> names;
    for (const auto& n : model.graph().nodes()) names.push_back(n.name);
    return names;
}

std::vector<std::string> with_front(std::string_view first, std::span<const std::string> rest) {
    std::vector<std::string> out{std::string(first)};
    out.insert(out.end(), rest.begin(), rest.end());
    return out;
}

bool is_subset(std::span<const std::string> small, std::span<const std::string> big) {
    return std::all_of(small.begin(), small.end(),
                       [&](const std::string& s) { return std::find(big.begin(), big.end(), s) != big.end(); });
}

double pass_tolerance(double se) { return std::max(kSigmaTolerance * se, kAbsoluteTolerance); }

}  // namespace

void SimConfig::validate() const {
    if (n < 2) throw Error(ErrorKind::InvalidArgument, "sample size must be at least 2");
    if (replications < 1) throw Error(ErrorKind::InvalidArgument, "replications must be at least 1");
    if (!(selection_band > 0.0)) throw Error(ErrorKind::InvalidArgument, "selection band must be positive");
    if (!(min_abs_x >= 0.0)) throw Error(ErrorKind::InvalidArgument, "min_abs_x must be nonnegative");
}

Dataset sample(const LinearSCM& model, const SimConfig& config, std::size_t replication) {
    config.validate();
    const kernels::LinearRowGenerator gen(model, config.disturbance);
    auto cols = kernels::parallel::generate(gen, rng::stream_key(config.seed, replication), config.n);
    return Dataset(node_names(model), std::move(cols));
}

Dataset sample(const bias::NonlinearOutcomeModel& model, const SimConfig& config, std::size_t replication) {
    config.validate();
    const kernels::NonlinearRowGenerator gen(model, config.min_abs_x);
    auto cols = kernels::parallel::generate(gen, rng::stream_key(config.seed, replication), config.n);
    return Dataset({"Z", "U", "X", "Y"}, std::move(cols));
}

Moments moments(const Dataset& data) { return moments(data, data.names()); }

Moments moments(const Dataset& data, std::span<const std::string> names) {
    std::vector<std::span<const double>> cols;
    for (const auto& n : names) cols.push_back(data.column(n));
    return kernels::parallel::column_moments(cols);
}

RegressionResult ols(const Dataset& data, std::string_view response, std::span<const std::string> regressors) {
    const std::vector<std::string> names = with_front(response, regressors);
    return ols_from_moments(moments(data, names), names, response, regressors);
}

Dataset select_band(const Dataset& data, std::string_view s, double center, double half_width) {
    if (!(half_width > 0.0)) throw Error(ErrorKind::InvalidArgument, "band half-width must be positive");
    const auto col = data.column(s);
    std::vector<std::size_t> keep;
    for (std::size_t r = 0; r < col.size(); ++r)
        if (std::abs(col[r] - center) <= half_width) keep.push_back(r);
    if (keep.empty())
        throw Error(ErrorKind::EmptySelection, "no rows with |" + std::string(s) + " - " + std::to_string(center) +
                                                   "| <= " + std::to_string(half_width));
    return data.take(keep);
}

SlopeChange slope_change(const Moments& m, std::span<const std::string> names, std::string_view response,
                         std::string_view regressor, std::span<const std::string> added,
                         std::span<const std::string> base) {
    const std::vector<std::string> short_design = with_front(regressor, base);
    std::vector<std::string> long_design = short_design;
    long_design.insert(long_design.end(), added.begin(), added.end());

    const RegressionResult shorter = ols_from_moments(m, names, response, short_design);
    const RegressionResult longer = ols_from_moments(m, names, response, long_design);

    const auto k = static_cast<Eigen::Index>(added.size());
    Eigen::VectorXd pi(k);
    for (Eigen::Index j = 0; j < k; ++j)
        pi(j) = ols_from_moments(m, names, added[static_cast<std::size_t>(j)], short_design).coefficient(regressor);
    const Eigen::Index offset = static_cast<Eigen::Index>(short_design.size());
    const Eigen::MatrixXd v = longer.coefficient_covariance.block(offset, offset, k, k);

    SlopeChange out;
    out.without = shorter.coefficient(regressor);
    out.with = longer.coefficient(regressor);
    out.delta = out.with - out.without;
    out.se = std::sqrt(std::max(0.0, pi.dot(v * pi)));
    return out;
}

ExperimentReport bias_experiment(const LinearSCM& model, const ExperimentSpec& spec, const SimConfig& config) {
    config.validate();
    const auto& g = model.graph();
    (void)g.id(spec.treatment);
    (void)g.id(spec.outcome);
    if (spec.conditioning_sets.empty()) throw Error(ErrorKind::InvalidArgument, "no conditioning sets given");
    for (const auto& set : spec.conditioning_sets) (void)g.ids(set);

    const std::vector<std::string> names = node_names(model);
    const kernels::LinearRowGenerator gen(model, config.disturbance);
    kernels::RowFilter filter;
    CovarianceMatrix design_cov = implied_covariance(model);
    if (spec.selection) {
        if (!std::isfinite(config.selection_band))
            throw Error(ErrorKind::InvalidArgument, "selection requires a finite band half-width");
        filter = {true, g.id(spec.selection->node), spec.selection->center - config.selection_band,
                  spec.selection->center + config.selection_band};
        design_cov = band_selected_covariance(model, spec.selection->node, spec.selection->center,
                                              config.selection_band);
    }

    ExperimentReport report;
    report.spec = spec;
    report.config = config;
    report.causal_effect = total_effect(model, spec.treatment, spec.outcome);

    const std::size_t sets = spec.conditioning_sets.size();
    const std::size_t reps = config.replications;
    std::vector<double> slope(reps * sets), se(reps * sets);
    std::vector<std::vector<SlopeChange>> change(sets, std::vector<SlopeChange>(reps));
    double rows_used = 0.0;
    for (std::size_t r = 0; r < reps; ++r) {
        const Moments m = kernels::parallel::stream_moments(gen, rng::stream_key(config.seed, r), config.n, filter);
        if (m.n == 0) throw Error(ErrorKind::EmptySelection, "no simulated rows survive the selection band");
        rows_used += static_cast<double>(m.n);
        for (std::size_t k = 0; k < sets; ++k) {
            const auto design = with_front(spec.treatment, spec.conditioning_sets[k]);
            const RegressionResult fit = ols_from_moments(m, names, spec.outcome, design);
            slope[r * sets + k] = fit.coefficients.front();
            se[r * sets + k] = fit.standard_errors.front();
            const auto& base = spec.conditioning_sets.front();
            const auto& cur = spec.conditioning_sets[k];
            if (k > 0 && is_subset(base, cur)) {
                std::vector<std::string> added;
                for (const auto& v : cur)
                    if (std::find(base.begin(), base.end(), v) == base.end()) added.push_back(v);
                if (!added.empty())
                    change[k][r] = slope_change(m, names, spec.outcome, spec.treatment, added, base);
            }
        }
    }

    const double dr = static_cast<double>(reps);
    std::vector<double> analytic(sets);
    for (std::size_t k = 0; k < sets; ++k) {
        ExperimentRow row;
        row.conditioning = spec.conditioning_sets[k];
        double sum = 0.0, se_sq = 0.0;
        for (std::size_t r = 0; r < reps; ++r) {
            sum += slope[r * sets + k];
            se_sq += se[r * sets + k] * se[r * sets + k];
        }
        row.mean_slope = sum / dr;
        row.mc_se = std::sqrt(se_sq) / dr;
        if (reps > 1) {
            double ss = 0.0;
            for (std::size_t r = 0; r < reps; ++r) ss += std::pow(slope[r * sets + k] - row.mean_slope, 2);
            row.spread_sd = std::sqrt(ss / (dr - 1.0));
        }
        row.analytic = partial_regression_slope(design_cov, spec.outcome, spec.treatment, row.conditioning);
        row.analytic_limit = row.analytic;
        if (spec.selection) {
            auto limit_set = row.conditioning;
            if (std::find(limit_set.begin(), limit_set.end(), spec.selection->node) == limit_set.end())
                limit_set.push_back(spec.selection->node);
            row.analytic_limit = partial_regression_slope(model, spec.outcome, spec.treatment, limit_set);
        }
        analytic[k] = row.analytic;
        row.z_score = row.mc_se > 0.0 ? (row.mean_slope - row.analytic) / row.mc_se : 0.0;
        row.tolerance = pass_tolerance(row.mc_se);
        row.pass = std::abs(row.mean_slope - row.analytic) <= row.tolerance;
        row.mean_rows_used = rows_used / dr;
        report.rows.push_back(std::move(row));
    }

    for (std::size_t k = 1; k < sets; ++k) {
        const auto& base = spec.conditioning_sets.front();
        const auto& cur = spec.conditioning_sets[k];
        if (!is_subset(base, cur) || cur.size() == base.size()) continue;
        ChangeRow c;
        c.from = base;
        c.to = cur;
        double sum = 0.0, se_sq = 0.0;
        for (const auto& sc : change[k]) {
            sum += sc.delta;
            se_sq += sc.se * sc.se;
        }
        c.mean_delta = sum / dr;
        c.se = std::sqrt(se_sq) / dr;
        c.analytic = analytic[k] - analytic[0];
        c.z_score = c.se > 0.0 ? (c.mean_delta - c.analytic) / c.se : 0.0;
        c.pass = std::abs(c.mean_delta - c.analytic) <= pass_tolerance(c.se);
        report.changes.push_back(std::move(c));
    }
    report.per_replication_slopes = std::move(slope);
    return report;
}

NonlinearReport bias_experiment(const bias::NonlinearOutcomeModel& model, std::span<const EvaluationPoint> points,
                                const SimConfig& config, BinOptions bins) {
    config.validate();
    model.validate();
    if (!(bins.width > 0.0) || !(bins.step > 0.0))
        throw Error(ErrorKind::InvalidArgument, "bin width and step must be positive");

    using G = kernels::NonlinearRowGenerator;
    std::vector<kernels::BinBox> boxes;
    const double hw = bins.width / 2.0;
    std::vector<std::pair<double, double>> xz;
    for (const auto& p : points) {
        const auto x_it = p.assignments.find("X");
        const auto z_it = p.assignments.find("Z");
        if (x_it == p.assignments.end() || z_it == p.assignments.end() || p.assignments.size() != 2)
            throw Error(ErrorKind::InvalidArgument, "nonlinear evaluation points must assign exactly X and Z");
        const double x = x_it->second, z = z_it->second;
        xz.emplace_back(x, z);
        for (double dx : {0.0, -bins.step, bins.step}) {
            kernels::BinBox b;
            b.value_column = G::kY;
            b.x_column = G::kX;
            b.x_lo = x + dx - hw;
            b.x_hi = x + dx + hw;
            boxes.push_back(b);
            b.use_second = true;
            b.z_column = G::kZ;
            b.z_lo = z - hw;
            b.z_hi = z + hw;
            boxes.push_back(b);
        }
    }

    const G gen(model, config.min_abs_x);
    std::vector<kernels::BinSums> acc(boxes.size());
    for (std::size_t r = 0; r < config.replications; ++r) {
        const auto part = kernels::parallel::stream_bins(gen, rng::stream_key(config.seed, r), config.n, boxes);
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i].merge(part[i]);
    }

    const auto level = [](const kernels::BinSums& s, double analytic) {
        BinnedEstimate e{s.mean(), s.standard_error(), analytic, analytic, s.count, false};
        e.pass = std::isfinite(e.value) && std::abs(e.value - e.target) <= pass_tolerance(e.se);
        return e;
    };
    const auto slope = [&](const kernels::BinSums& lo, const kernels::BinSums& hi, double analytic, double target) {
        BinnedEstimate e;
        e.value = (hi.mean() - lo.mean()) / (2.0 * bins.step);
        e.se = std::hypot(hi.standard_error(), lo.standard_error()) / (2.0 * bins.step);
        e.analytic = analytic;
        e.target = target;
        e.count = lo.count + hi.count;
        e.pass = std::isfinite(e.value) && std::abs(e.value - e.target) <= pass_tolerance(e.se);
        return e;
    };
    const double h = bins.step;

    NonlinearReport report;
    report.config = config;
    report.bins = bins;
    for (std::size_t i = 0; i < xz.size(); ++i) {
        const auto [x, z] = xz[i];
        const auto* b = &acc[i * 6];  // x0, x0z, x-, x-z, x+, x+z
        const bias::NonlinearSlopes s = bias::nonlinear_slopes(model, x, z);
        NonlinearPointRow row;
        row.x = x;
        row.z = z;
        row.a1 = s.a1;
        row.mean_given_x = level(b[0], bias::nonlinear_mean_given_x(model, x));
        row.mean_given_xz = level(b[1], bias::nonlinear_mean_given_xz(model, x, z));
        row.a2 = slope(b[2], b[4], s.a2,
                       (bias::nonlinear_mean_given_x(model, x + h) - bias::nonlinear_mean_given_x(model, x - h)) /
                           (2.0 * h));
        row.a3 = slope(b[3], b[5], s.a3,
                       (bias::nonlinear_mean_given_xz(model, x + h, z) -
                        bias::nonlinear_mean_given_xz(model, x - h, z)) /
                           (2.0 * h));
        report.rows.push_back(row);
    }
    return report;
}

}  // namespace biaslab::mc
