#include "biaslab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

#include "biaslab/error.hpp"
#include "biaslab/kernels.hpp"
#include "biaslab/linear_scm.hpp"
#include "biaslab/moments.hpp"

namespace biaslab::diag {
namespace {

constexpr std::size_t kMinRows = 30;

std::vector<std::string> distinct_columns(const Dataset& data, const std::vector<std::string>& names) {
    std::set<std::string> seen;
    for (const auto& n : names) {
        (void)data.column_index(n);
        if (!seen.insert(n).second) throw Error(ErrorKind::InvalidArgument, "column '" + n + "' used twice");
    }
    return names;
}

std::vector<std::span<const double>> views(const Dataset& data, const std::vector<std::string>& names) {
    std::vector<std::span<const double>> out;
    for (const auto& n : names) out.push_back(data.column(n));
    return out;
}

double t_statistic(double r, double dof) {
    if (dof <= 0.0) return 0.0;
    const double one_minus = std::max(1.0 - r * r, 1e-300);
    return r * std::sqrt(dof / one_minus);
}

}  // namespace

std::string_view to_string(Verdict v) noexcept {
    return v == Verdict::ConfoundingSuspected ? "ConfoundingSuspected" : "NoEvidenceOfConfounding";
}

std::string_view to_string(Advice a) noexcept {
    switch (a) {
        case Advice::Retain: return "Retain";
        case Advice::Discard: return "Discard";
        case Advice::Indeterminate: return "Indeterminate";
    }
    return "Indeterminate";
}

void SensitivityOptions::validate() const {
    if (!(k > 0.0)) throw Error(ErrorKind::InvalidArgument, "k must be positive");
    if (resamples < 2) throw Error(ErrorKind::InvalidArgument, "need at least 2 bootstrap resamples");
}

SensitivityVerdict iv_sensitivity_test(const Dataset& data, std::string_view x, std::string_view y,
                                       std::string_view z, const std::vector<std::string>& extra,
                                       SensitivityOptions options) {
    options.validate();
    std::vector<std::string> names{std::string(y), std::string(x), std::string(z)};
    names.insert(names.end(), extra.begin(), extra.end());
    distinct_columns(data, names);
    if (data.rows() < kMinRows)
        throw Error(ErrorKind::InsufficientData,
                    "need at least " + std::to_string(kMinRows) + " rows, have " + std::to_string(data.rows()));

    std::vector<std::string> short_design{std::string(x)};
    short_design.insert(short_design.end(), extra.begin(), extra.end());
    std::vector<std::string> long_design{std::string(x), std::string(z)};
    long_design.insert(long_design.end(), extra.begin(), extra.end());

    const auto slopes = [&](const Moments& m) {
        return std::pair{ols_from_moments(m, names, y, short_design).coefficients.front(),
                         ols_from_moments(m, names, y, long_design).coefficients.front()};
    };

    const auto cols = views(data, names);
    SensitivityVerdict v;
    std::tie(v.slope_without_iv, v.slope_with_iv) = slopes(kernels::parallel::column_moments(cols));
    v.delta = v.slope_with_iv - v.slope_without_iv;

    const auto boot = kernels::parallel::bootstrap_moments(cols, options.seed, options.resamples);
    std::vector<double> deltas;
    deltas.reserve(boot.size());
    for (const auto& m : boot) {
        const auto [a, b] = slopes(m);
        deltas.push_back(b - a);
    }
    double mean = 0.0;
    for (double d : deltas) mean += d;
    mean /= static_cast<double>(deltas.size());
    double ss = 0.0;
    for (double d : deltas) ss += (d - mean) * (d - mean);
    v.delta_se = std::sqrt(ss / static_cast<double>(deltas.size() - 1));

    v.verdict = std::abs(v.delta) > options.k * v.delta_se ? Verdict::ConfoundingSuspected
                                                             : Verdict::NoEvidenceOfConfounding;
    v.k = options.k;
    v.resamples = options.resamples;
    v.n = data.rows();
    v.caveats = {
        "A change in the slope is read as confounding only if " + std::string(z) +
            " really is an instrument; that is an assumption about the world and is not checked from the data.",
        "In nonlinear models " + std::string(z) +
            " can create bias of its own, so a change does not prove that confounding was present.",
        "With finely tuned parameters confounding bias can stay unchanged when " + std::string(z) +
            " is added, so no change does not rule confounding out.",
    };
    return v;
}

std::vector<CovariateAdvice> covariate_screen(const Dataset& data, std::string_view x, std::string_view y,
                                              const std::vector<std::string>& candidates, ScreenOptions options) {
    if (!(options.negligible_t > 0.0)) throw Error(ErrorKind::InvalidArgument, "negligible_t must be positive");
    if (candidates.empty()) throw Error(ErrorKind::InvalidArgument, "no candidate covariates given");
    std::vector<std::string> names{std::string(x), std::string(y)};
    names.insert(names.end(), candidates.begin(), candidates.end());
    distinct_columns(data, names);
    const std::size_t n = data.rows();
    if (n < names.size() + 2)
        throw Error(ErrorKind::InsufficientData, "too few rows for " + std::to_string(candidates.size()) + " candidates");

    const Moments m = kernels::parallel::column_moments(views(data, names));
    const CovarianceMatrix cov{names, m.covariance()};
    const double dn = static_cast<double>(n);

    std::vector<CovariateAdvice> out;
    for (const auto& c : candidates) {
        CovariateAdvice a;
        a.covariate = c;
        const double vc = cov(c, c), vx = cov(x, x);
        if (!(vc > 0.0) || !(vx > 0.0))
            throw Error(ErrorKind::SingularDesign, "column '" + c + "' or '" + std::string(x) + "' is constant");
        a.treatment_association = cov(c, x) / std::sqrt(vc * vx);
        a.treatment_t = t_statistic(a.treatment_association, dn - 2.0);

        std::vector<std::string> given{std::string(x)};
        for (const auto& other : candidates)
            if (other != c) given.push_back(other);
        a.outcome_association = partial_correlation(cov, c, y, given);
        a.outcome_t = t_statistic(a.outcome_association, dn - 2.0 - static_cast<double>(given.size()));

        const double cut = options.negligible_t;
        if (std::abs(a.outcome_t) >= cut)
            a.advice = Advice::Retain;
        else if (std::abs(a.treatment_t) >= cut && std::abs(a.outcome_association) <= std::abs(a.treatment_association))
            a.advice = Advice::Discard;
        else
            a.advice = Advice::Indeterminate;
        out.push_back(std::move(a));
    }
    return out;
}

}  // namespace biaslab::diag
