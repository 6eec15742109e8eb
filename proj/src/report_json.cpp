#include "biaslab/report_json.hpp"

#include <cmath>

namespace biaslab::io {
namespace {

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json to_json(const mc::BinnedEstimate& e) {
    return {{"value", number(e.value)}, {"se", number(e.se)},    {"analytic", number(e.analytic)},
            {"target", number(e.target)}, {"count", e.count}, {"pass", e.pass}};
}

json to_json(const mc::SimConfig& c) {
    return {{"n", c.n},
            {"seed", c.seed},
            {"replications", c.replications},
            {"selection_band", number(c.selection_band)},
            {"disturbance", c.disturbance == mc::Disturbance::Gaussian ? "gaussian" : "uniform"}};
}

json tolerance_rule() {
    return "max(" + std::to_string(static_cast<int>(mc::kSigmaTolerance)) + " * se, 0.02)";
}

}  // namespace

json to_json(const bias::BiasReport& r) {
    return {{"a1", number(r.a1)}, {"a2", number(r.a2)}, {"a3", number(r.a3)},
            {"b0", number(r.b0)}, {"bz", number(r.bz)}, {"amplification", number(r.amplification)},
            {"classification", bias::to_string(r.classification)}};
}

json to_json(const mc::ExperimentReport& r) {
    json rows = json::array();
    for (const auto& row : r.rows)
        rows.push_back({{"conditioning", row.conditioning},
                        {"mean_slope", number(row.mean_slope)},
                        {"mc_se", number(row.mc_se)},
                        {"spread_sd", number(row.spread_sd)},
                        {"analytic", number(row.analytic)},
                        {"analytic_limit", number(row.analytic_limit)},
                        {"z_score", number(row.z_score)},
                        {"tolerance", number(row.tolerance)},
                        {"pass", row.pass},
                        {"mean_rows_used", number(row.mean_rows_used)}});
    json changes = json::array();
    for (const auto& c : r.changes)
        changes.push_back({{"from", c.from},
                           {"to", c.to},
                           {"mean_delta", number(c.mean_delta)},
                           {"se", number(c.se)},
                           {"analytic", number(c.analytic)},
                           {"z_score", number(c.z_score)},
                           {"pass", c.pass}});
    json out = {{"treatment", r.spec.treatment},
                {"outcome", r.spec.outcome},
                {"config", to_json(r.config)},
                {"causal_effect", number(r.causal_effect)},
                {"tolerance_rule", tolerance_rule()},
                {"rows", rows},
                {"changes", changes}};
    if (r.spec.selection) out["selection"] = {{"node", r.spec.selection->node}, {"center", r.spec.selection->center}};
    return out;
}

json to_json(const mc::NonlinearReport& r) {
    json rows = json::array();
    for (const auto& p : r.rows)
        rows.push_back({{"x", p.x},
                        {"z", p.z},
                        {"a1", number(p.a1)},
                        {"mean_given_x", to_json(p.mean_given_x)},
                        {"mean_given_xz", to_json(p.mean_given_xz)},
                        {"a2", to_json(p.a2)},
                        {"a3", to_json(p.a3)}});
    return {{"config", to_json(r.config)},
            {"bin_width", r.bins.width},
            {"step", r.bins.step},
            {"tolerance_rule", tolerance_rule()},
            {"rows", rows}};
}

json to_json(const graph::PathReport& r) {
    json paths = json::array();
    for (const auto& p : r.open_paths)
        paths.push_back({{"nodes", p.nodes},
                         {"classification", graph::to_string(p.classification)},
                         {"through_outcome_disturbance", p.through_outcome_disturbance}});
    return {{"open_paths", paths},
            {"has_confounding_component", r.has_confounding_component},
            {"has_selection_component", r.has_selection_component},
            {"truncated", r.truncated}};
}

json to_json(const diag::SensitivityVerdict& v) {
    return {{"slope_without_iv", number(v.slope_without_iv)},
            {"slope_with_iv", number(v.slope_with_iv)},
            {"delta", number(v.delta)},
            {"delta_se", number(v.delta_se)},
            {"verdict", diag::to_string(v.verdict)},
            {"k", v.k},
            {"resamples", v.resamples},
            {"n", v.n},
            {"caveats", v.caveats}};
}

json to_json(const std::vector<diag::CovariateAdvice>& advice) {
    json out = json::array();
    for (const auto& a : advice)
        out.push_back({{"covariate", a.covariate},
                       {"treatment_association", number(a.treatment_association)},
                       {"outcome_association", number(a.outcome_association)},
                       {"treatment_t", number(a.treatment_t)},
                       {"outcome_t", number(a.outcome_t)},
                       {"advice", diag::to_string(a.advice)}});
    return out;
}

json to_json(const repro::Table& t) {
    json rows = json::array();
    for (const auto& r : t.rows)
        rows.push_back({{"label", r.label},
                        {"analytic", number(r.analytic)},
                        {"empirical", number(r.empirical)},
                        {"se", number(r.se)},
                        {"tolerance", number(r.tolerance)},
                        {"pass", r.pass},
                        {"note", r.note}});
    return {{"name", t.name}, {"title", t.title}, {"rows", rows}};
}

}  // namespace biaslab::io
