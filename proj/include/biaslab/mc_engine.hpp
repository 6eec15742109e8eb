#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "biaslab/analytic_bias.hpp"
#include "biaslab/dataset.hpp"
#include "biaslab/kernels.hpp"
#include "biaslab/linear_scm.hpp"
#include "biaslab/moments.hpp"

namespace biaslab::mc {

using kernels::Disturbance;

/// Default acceptance rule for empirical-vs-analytic comparisons:
/// |difference| <= max(kSigmaTolerance * SE, kAbsoluteTolerance).
inline constexpr double kSigmaTolerance = 4.0;
inline constexpr double kAbsoluteTolerance = 0.02;

struct SimConfig {
    std::size_t n = 100'000;
    std::uint64_t seed = 0;
    std::size_t replications = 1;
    /// Half-width h used when conditioning on a selection variable.
    double selection_band = std::numeric_limits<double>::infinity();
    Disturbance disturbance = Disturbance::Gaussian;
    /// Reciprocal models only: rows with |X| below this are discarded.
    double min_abs_x = 0.5;

    /// Throws InvalidArgument.
    void validate() const;
};

/// Replication r of a model: rows in topological order, latent columns
/// included.  Identical (model, config, r) give a bit-identical Dataset.
Dataset sample(const LinearSCM& model, const SimConfig& config, std::size_t replication = 0);
/// Columns Z, U, X, Y.
Dataset sample(const bias::NonlinearOutcomeModel& model, const SimConfig& config, std::size_t replication = 0);

/// Moments of all columns (parallel kernel).
Moments moments(const Dataset& data);
/// Moments of the named columns, in order.
Moments moments(const Dataset& data, std::span<const std::string> names);

/// Least squares with intercept.  Throws UnknownColumn, SingularDesign.
RegressionResult ols(const Dataset& data, std::string_view response, std::span<const std::string> regressors);

/// Rows with |s - center| <= half_width.  Throws EmptySelection.
Dataset select_band(const Dataset& data, std::string_view s, double center, double half_width);

/// Change in the `regressor` coefficient when `added` join the base
/// regressors.  Uses b_short - b_long = pi' b_added, where pi holds the
/// `regressor` coefficients of the added variables regressed on the short
/// design; se treats pi as fixed.
struct SlopeChange {
    double without = 0.0;
    double with = 0.0;
    double delta = 0.0;  // with - without
    double se = 0.0;
};

SlopeChange slope_change(const Moments& m, std::span<const std::string> names, std::string_view response,
                         std::string_view regressor, std::span<const std::string> added,
                         std::span<const std::string> base = {});

// ---------------------------------------------------------------------------
// Experiments

/// Keep units with |node - center| <= SimConfig::selection_band.
struct SelectionSpec {
    std::string node;
    double center = 0.0;
};

struct ExperimentSpec {
    std::string treatment = "X";
    std::string outcome = "Y";
    std::vector<std::vector<std::string>> conditioning_sets;
    std::optional<SelectionSpec> selection;
};

struct ExperimentRow {
    std::vector<std::string> conditioning;
    double mean_slope = 0.0;
    double mc_se = 0.0;       // pooled OLS standard error of the mean slope
    double spread_sd = 0.0;   // sd of slopes across replications
    double analytic = 0.0;    // expected slope under the simulated design
    double analytic_limit = 0.0;  // point-conditioning value (equals analytic without selection)
    double z_score = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    double mean_rows_used = 0.0;
};

/// Slope of set k relative to set 0 (only when set 0 is nested in set k).
struct ChangeRow {
    std::vector<std::string> from;
    std::vector<std::string> to;
    double mean_delta = 0.0;
    double se = 0.0;
    double analytic = 0.0;
    double z_score = 0.0;
    bool pass = false;
};

struct ExperimentReport {
    ExperimentSpec spec;
    SimConfig config;
    double causal_effect = 0.0;
    std::vector<ExperimentRow> rows;
    std::vector<ChangeRow> changes;
    std::vector<double> per_replication_slopes;  // row-major: replication x set
};

/// Per conditioning set: mean X slope across replications, its Monte Carlo
/// SE, the analytic counterpart and the z-score of the discrepancy.
/// Replications are aggregated in index order.
ExperimentReport bias_experiment(const LinearSCM& model, const ExperimentSpec& spec, const SimConfig& config);

/// Binned local estimates for the nonlinear model at (x, z) points.
struct BinOptions {
    double width = 0.1;  // side of each bin
    double step = 0.15;  // finite-difference half-step
};

/// `analytic` is the exact population quantity; `target` is what the bin
/// estimator converges to (for slopes, the central difference of the exact
/// conditional mean at the bin centres).  `pass` compares value to target.
struct BinnedEstimate {
    double value = 0.0;
    double se = 0.0;
    double analytic = 0.0;
    double target = 0.0;
    std::size_t count = 0;
    bool pass = false;
};

struct NonlinearPointRow {
    double x = 0.0;
    double z = 0.0;
    BinnedEstimate mean_given_x;   // E(Y | x)
    BinnedEstimate mean_given_xz;  // E(Y | x, z)
    BinnedEstimate a2;             // d/dx E(Y | x)
    BinnedEstimate a3;             // d/dx E(Y | x, z)
    double a1 = 0.0;               // f'(x)
};

struct NonlinearReport {
    SimConfig config;
    BinOptions bins;
    std::vector<NonlinearPointRow> rows;
};

/// Points must assign X and Z.
NonlinearReport bias_experiment(const bias::NonlinearOutcomeModel& model, std::span<const EvaluationPoint> points,
                                const SimConfig& config, BinOptions bins = {});

}  // namespace biaslab::mc
