#include "biaslab/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "biaslab/analytic_bias.hpp"
#include "biaslab/diagnostics.hpp"
#include "biaslab/graph_analysis.hpp"
#include "biaslab/linear_scm.hpp"
#include "biaslab/mc_engine.hpp"
#include "biaslab/model_spec.hpp"
#include "biaslab/report_json.hpp"
#include "biaslab/reproduce.hpp"

namespace biaslab::cli {
namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using TextRows = std::vector<std::vector<std::string>>;

std::string num(double v) {
    if (std::isnan(v)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v == 0.0 ? 0.0 : v);
    return buf;
}

std::string join(const std::vector<std::string>& names, const char* sep = ",") {
    std::string s;
    for (std::size_t i = 0; i < names.size(); ++i) s += (i ? sep : "") + names[i];
    return s;
}

std::string set_label(const std::vector<std::string>& names) { return "{" + join(names) + "}"; }

void render_text(std::ostream& os, const std::vector<std::string>& header, const TextRows& rows) {
    std::vector<std::size_t> width(header.size());
    for (std::size_t j = 0; j < header.size(); ++j) width[j] = header[j].size();
    for (const auto& r : rows)
        for (std::size_t j = 0; j < r.size() && j < width.size(); ++j) width[j] = std::max(width[j], r[j].size());
    const auto line = [&](const std::vector<std::string>& cells) {
        std::string s;
        for (std::size_t j = 0; j < cells.size(); ++j) {
            s += cells[j];
            if (j + 1 < cells.size()) s += std::string(width[j] - cells[j].size() + 2, ' ');
        }
        os << s << '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
}

std::string csv_cell(std::string s) {
    std::replace(s.begin(), s.end(), ',', ';');
    return s;
}

void render_csv(std::ostream& os, const std::vector<std::string>& header, const TextRows& rows) {
    const auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t j = 0; j < cells.size(); ++j) os << (j ? "," : "") << csv_cell(cells[j]);
        os << '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
}

struct Common {
    std::string format = "table";
    std::string out_path;
};

struct Sim {
    std::size_t n = 100'000;
    std::size_t reps = 1;
    std::optional<std::uint64_t> seed;
    int threads = 0;
};

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
    if (flag) return *flag;
    if (const char* env = std::getenv("BIASLAB_SEED"); env && *env) {
        char* end = nullptr;
        errno = 0;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (errno != 0 || *end != '\0' || *env == '-')
            throw UsageError("BIASLAB_SEED must be a nonnegative integer, got '" + std::string(env) + "'");
        return v;
    }
    return 0;
}

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--format", c.format, "table, json or csv")
        ->check(CLI::IsMember({"table", "json", "csv"}))
        ->capture_default_str();
    sub->add_option("--out", c.out_path, "write the result to this file instead of standard output");
}

LinearSCM load_model(const std::string& path) { return build_model(load_model_spec(path)); }

// ---------------------------------------------------------------------------

std::string do_analyze(const std::string& model_path, const std::string& x, const std::string& y,
                       const std::vector<std::string>& condition, const std::string& select,
                       std::optional<double> band, double center, const std::string& format) {
    const LinearSCM model = load_model(model_path);
    std::vector<std::string> base;
    CovarianceMatrix cov = implied_covariance(model);
    if (!select.empty()) {
        (void)model.graph().id(select);
        if (band)
            cov = band_selected_covariance(model, select, center, *band);
        else
            base.push_back(select);
    }
    std::vector<std::string> with = base;
    for (const auto& c : condition)
        if (std::find(with.begin(), with.end(), c) == with.end()) with.push_back(c);

    bias::BiasReport r;
    r.a1 = total_effect(model, x, y);
    r.a2 = partial_regression_slope(cov, y, x, base);
    r.a3 = partial_regression_slope(cov, y, x, with);
    r.b0 = r.a2 - r.a1;
    r.bz = r.a3 - r.a1;
    r.amplification = r.b0 != 0.0 ? r.bz / r.b0 : std::numeric_limits<double>::quiet_NaN();
    r.classification = bias::classify(r.b0, r.bz);

    std::ostringstream os;
    if (format == "json") {
        os << io::to_json(r).dump(2) << '\n';
    } else {
        const std::vector<std::string> header{"a1", "a2", "a3", "b0", "bz", "amplification", "classification"};
        const std::vector<std::string> values{num(r.a1), num(r.a2), num(r.a3), num(r.b0), num(r.bz),
                                              num(r.amplification), std::string(bias::to_string(r.classification))};
        if (format == "csv") {
            render_csv(os, header, {values});
        } else {
            os << "treatment " << x << ", outcome " << y << ", without " << set_label(base) << ", with "
               << set_label(with) << '\n';
            TextRows rows;
            for (std::size_t i = 0; i < header.size(); ++i) rows.push_back({header[i], values[i]});
            render_text(os, {"quantity", "value"}, rows);
        }
    }
    return os.str();
}

std::string do_classify(double c0, double c1, double c2, double c3, double c4, const std::string& format) {
    const bias::BiasReport r = bias::imperfect_instrument_report(c0, c1, c2, c3, c4);
    const double threshold = bias::reducer_threshold(c1, c2, c3);
    // The literal rule divides by c3.
    const bool has_signed_rule = c3 != 0.0;
    const bool signed_rule = has_signed_rule && bias::signed_reducer_rule(c1, c2, c3, c4);
    std::ostringstream os;
    if (format == "json") {
        io::json j = {{"report", io::to_json(r)},
                      {"reducer_threshold_c4", std::isfinite(threshold) ? io::json(threshold) : io::json(nullptr)},
                      {"signed_rule_says_reducer", has_signed_rule ? io::json(signed_rule) : io::json(nullptr)}};
        os << j.dump(2) << '\n';
    } else {
        const std::vector<std::string> header{"b0", "bz", "amplification", "classification", "reducer_threshold_c4",
                                              "signed_rule_says_reducer"};
        const std::vector<std::string> values{num(r.b0),
                                              num(r.bz),
                                              num(r.amplification),
                                              std::string(bias::to_string(r.classification)),
                                              num(threshold),
                                              !has_signed_rule ? "undefined" : signed_rule ? "true" : "false"};
        if (format == "csv") {
            render_csv(os, header, {values});
        } else {
            TextRows rows;
            for (std::size_t i = 0; i < header.size(); ++i) rows.push_back({header[i], values[i]});
            render_text(os, {"quantity", "value"}, rows);
        }
    }
    return os.str();
}

std::string experiment_text(const mc::ExperimentReport& r, const std::string& format) {
    std::ostringstream os;
    if (format == "json") {
        os << io::to_json(r).dump(2) << '\n';
        return os.str();
    }
    const std::vector<std::string> header{"conditioning", "mean_slope", "mc_se",     "analytic",
                                          "z_score",      "tolerance",  "pass",      "rows_used"};
    TextRows rows;
    for (const auto& row : r.rows)
        rows.push_back({set_label(row.conditioning), num(row.mean_slope), num(row.mc_se), num(row.analytic),
                        num(row.z_score), num(row.tolerance), row.pass ? "pass" : "FAIL",
                        std::to_string(std::llround(row.mean_rows_used))});
    if (format == "csv") {
        render_csv(os, header, rows);
        return os.str();
    }
    os << "treatment " << r.spec.treatment << ", outcome " << r.spec.outcome << ", causal effect "
       << num(r.causal_effect) << "; n=" << r.config.n << " reps=" << r.config.replications
       << " seed=" << r.config.seed;
    if (r.spec.selection)
        os << "; selected on |" << r.spec.selection->node << " - " << num(r.spec.selection->center)
           << "| <= " << num(r.config.selection_band);
    os << "\ntolerance: max(4 * se, 0.02)\n";
    render_text(os, header, rows);
    if (!r.changes.empty()) {
        TextRows ch;
        for (const auto& c : r.changes)
            ch.push_back({set_label(c.from) + " -> " + set_label(c.to), num(c.mean_delta), num(c.se),
                          num(c.analytic), num(c.z_score), c.pass ? "pass" : "FAIL"});
        os << "\nslope change\n";
        render_text(os, {"sets", "mean_delta", "se", "analytic", "z_score", "pass"}, ch);
    }
    return os.str();
}

std::string separation_text(const graph::SeparationQuery& q, bool separated, const std::string& format) {
    std::ostringstream os;
    if (format == "json") {
        os << io::json{{"a", q.a}, {"b", q.b}, {"given", q.given}, {"separated", separated}}.dump(2) << '\n';
    } else if (format == "csv") {
        render_csv(os, {"a", "b", "given", "separated"}, {{q.a, q.b, join(q.given, " "), separated ? "true" : "false"}});
    } else {
        os << q.a << " _||_ " << q.b;
        if (!q.given.empty()) os << " | " << join(q.given);
        os << " : " << (separated ? "d-separated" : "d-connected") << '\n';
    }
    return os.str();
}

std::string taxonomy_text(const graph::TaxonomyQuery& q, const graph::PathReport& r,
                          const std::optional<graph::IvPrediction>& iv, const std::string& iv_name,
                          const std::string& format) {
    std::ostringstream os;
    if (format == "json") {
        io::json j = io::to_json(r);
        if (iv) j["iv_prediction"] = {{"iv", iv_name}, {"prediction", graph::to_string(*iv)}};
        os << j.dump(2) << '\n';
        return os.str();
    }
    TextRows rows;
    for (const auto& p : r.open_paths)
        rows.push_back({join(p.nodes, " - "), std::string(graph::to_string(p.classification)),
                        p.through_outcome_disturbance ? "yes" : "no"});
    if (format == "csv") {
        render_csv(os, {"path", "classification", "through_outcome_disturbance"}, rows);
        return os.str();
    }
    os << q.treatment << " -> " << q.outcome << " given " << set_label(q.conditioned) << '\n';
    if (rows.empty())
        os << "no open non-causal paths\n";
    else
        render_text(os, {"path", "classification", "through_outcome_disturbance"}, rows);
    os << "confounding component: " << (r.has_confounding_component ? "yes" : "no")
       << "\nselection component: " << (r.has_selection_component ? "yes" : "no") << '\n';
    if (r.truncated) os << "path enumeration truncated\n";
    if (iv) os << "adding " << iv_name << ": " << graph::to_string(*iv) << '\n';
    return os.str();
}

std::string diagnose_text(const diag::SensitivityVerdict& v, const std::vector<diag::CovariateAdvice>& screen,
                          const std::string& format) {
    std::ostringstream os;
    if (format == "json") {
        io::json j = io::to_json(v);
        if (!screen.empty()) j["screen"] = io::to_json(screen);
        os << j.dump(2) << '\n';
        return os.str();
    }
    const std::vector<std::string> header{"slope_without_iv", "slope_with_iv", "delta", "delta_se", "k", "verdict"};
    const std::vector<std::string> values{num(v.slope_without_iv), num(v.slope_with_iv), num(v.delta),
                                          num(v.delta_se),         num(v.k),             std::string(to_string(v.verdict))};
    TextRows advice;
    for (const auto& a : screen)
        advice.push_back({a.covariate, num(a.treatment_association), num(a.treatment_t), num(a.outcome_association),
                          num(a.outcome_t), std::string(diag::to_string(a.advice))});
    const std::vector<std::string> advice_header{"covariate", "treatment_assoc", "treatment_t",
                                                 "outcome_assoc", "outcome_t",     "advice"};
    if (format == "csv") {
        render_csv(os, header, {values});
        if (!advice.empty()) {
            os << '\n';
            render_csv(os, advice_header, advice);
        }
        return os.str();
    }
    TextRows rows;
    for (std::size_t i = 0; i < header.size(); ++i) rows.push_back({header[i], values[i]});
    os << "n=" << v.n << ", bootstrap resamples=" << v.resamples << '\n';
    render_text(os, {"quantity", "value"}, rows);
    os << "caveats:\n";
    for (const auto& c : v.caveats) os << "  - " << c << '\n';
    if (!advice.empty()) {
        os << "\ncovariate screen\n";
        render_text(os, advice_header, advice);
    }
    return os.str();
}

std::string reproduce_text(const std::vector<repro::Table>& tables, const std::string& format) {
    std::ostringstream os;
    if (format == "json") {
        io::json j = io::json::array();
        for (const auto& t : tables) j.push_back(io::to_json(t));
        os << j.dump(2) << '\n';
        return os.str();
    }
    const std::vector<std::string> header{"row", "analytic", "empirical", "se", "tolerance", "pass", "note"};
    if (format == "csv") {
        TextRows rows;
        for (const auto& t : tables)
            for (const auto& r : t.rows)
                rows.push_back({t.name, r.label, num(r.analytic), num(r.empirical), num(r.se), num(r.tolerance),
                                r.pass ? "pass" : "FAIL", r.note});
        std::vector<std::string> h{"table"};
        h.insert(h.end(), header.begin(), header.end());
        render_csv(os, h, rows);
        return os.str();
    }
    for (std::size_t i = 0; i < tables.size(); ++i) {
        const auto& t = tables[i];
        if (i) os << '\n';
        os << "[" << t.name << "] " << t.title << '\n';
        TextRows rows;
        for (const auto& r : t.rows)
            rows.push_back({r.label, num(r.analytic), num(r.empirical), num(r.se), num(r.tolerance),
                            r.pass ? "pass" : "FAIL", r.note});
        render_text(os, header, rows);
    }
    return os.str();
}

void emit(const std::string& text, const Common& c, std::ostream& out) {
    if (c.out_path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(c.out_path, std::ios::binary);
    if (!f) throw Error(ErrorKind::IoError, "cannot write '" + c.out_path + "'");
    f << text;
    if (!f) throw Error(ErrorKind::IoError, "write to '" + c.out_path + "' failed");
}

}  // namespace

int exit_code_for(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::InvalidArgument:
        case ErrorKind::InvalidQuery: return kExitUsage;
        case ErrorKind::InvariantViolation: return kExitInvariant;
        default: return kExitModelData;
    }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Bias amplification laboratory: closed forms, Monte Carlo checks and graph queries", "biaslab"};
    app.require_subcommand(1);

    Common common;
    Sim sim;
    std::string model_path, data_path, x = "X", y = "Y", z, select, iv, query, save_data;
    std::vector<std::string> condition, screen;
    std::optional<double> band;
    double center = 0.0;
    bool uniform = false;
    double c0 = 0, c1 = 0, c2 = 0, c3 = 0, c4 = 0;
    std::size_t resamples = 1000;
    double k = 4.0;
    repro::Options ro;
    std::vector<std::string> only;

    const auto condition_opt = [&](CLI::App* s) {
        s->add_option("--condition", condition, "comma-separated conditioning variables")->delimiter(',');
    };
    const auto seed_opt = [&](CLI::App* s) {
        s->add_option("--seed", sim.seed, "master seed (falls back to BIASLAB_SEED, then 0)");
    };

    auto* analyze = app.add_subcommand("analyze", "closed-form bias report for a linear model");
    analyze->add_option("--model", model_path, "model file")->required();
    analyze->add_option("--x", x, "treatment")->capture_default_str();
    analyze->add_option("--y", y, "outcome")->capture_default_str();
    condition_opt(analyze);
    analyze->add_option("--select", select, "selection variable conditioned on in both regressions");
    analyze->add_option("--band", band, "use a band of this half-width on the selection variable");
    analyze->add_option("--center", center, "center of the selection band")->capture_default_str();
    add_common(analyze, common);

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo slopes against their analytic values");
    simulate->add_option("--model", model_path, "model file")->required();
    simulate->add_option("--x", x, "treatment")->capture_default_str();
    simulate->add_option("--y", y, "outcome")->capture_default_str();
    condition_opt(simulate);
    simulate->add_option("--select", select, "selection variable");
    simulate->add_option("--band", band, "selection band half-width");
    simulate->add_option("--center", center, "center of the selection band")->capture_default_str();
    simulate->add_option("--n", sim.n, "rows per replication")->capture_default_str();
    simulate->add_option("--reps", sim.reps, "replications")->capture_default_str();
    seed_opt(simulate);
    simulate->add_flag("--uniform", uniform, "uniform instead of Gaussian disturbances");
    simulate->add_option("--save-data", save_data, "write replication 0 as CSV");
    simulate->add_option("--threads", sim.threads, "OpenMP threads (results do not depend on it)");
    add_common(simulate, common);

    auto* dsep = app.add_subcommand("dsep", "d-separation query, e.g. 'Y _||_ Z | X,S'");
    dsep->add_option("--model", model_path, "model file")->required();
    dsep->add_option("query", query, "A _||_ B | C,D")->required();
    add_common(dsep, common);

    auto* taxonomy = app.add_subcommand("taxonomy", "classify open paths, e.g. 'X -> Y | S1'");
    taxonomy->add_option("--model", model_path, "model file")->required();
    taxonomy->add_option("query", query, "X -> Y | S1,S2")->required();
    taxonomy->add_option("--iv", iv, "also predict the effect of adding this instrument");
    add_common(taxonomy, common);

    auto* classify = app.add_subcommand("classify", "amplifier or reducer for the imperfect instrument model");
    classify->add_option("--c0", c0, "X -> Y")->required();
    classify->add_option("--c1", c1, "U -> X")->required();
    classify->add_option("--c2", c2, "U -> Y")->required();
    classify->add_option("--c3", c3, "Z -> X")->required();
    classify->add_option("--c4", c4, "Z -> Y")->capture_default_str();
    add_common(classify, common);

    auto* diagnose = app.add_subcommand("diagnose", "IV-sensitivity test on a CSV dataset");
    diagnose->add_option("--data", data_path, "CSV file")->required();
    diagnose->add_option("--x", x, "treatment")->capture_default_str();
    diagnose->add_option("--y", y, "outcome")->capture_default_str();
    diagnose->add_option("--z", z, "believed instrument")->required();
    condition_opt(diagnose);
    diagnose->add_option("--resamples", resamples, "bootstrap resamples")->capture_default_str();
    diagnose->add_option("--k", k, "threshold in bootstrap SEs")->capture_default_str();
    diagnose->add_option("--screen", screen, "also screen these candidate covariates")->delimiter(',');
    seed_opt(diagnose);
    diagnose->add_option("--threads", sim.threads, "OpenMP threads");
    add_common(diagnose, common);

    auto* reproduce = app.add_subcommand("reproduce", "regenerate the analytic-versus-simulated tables");
    reproduce->add_option("--n", ro.n, "rows per replication, linear tables")->capture_default_str();
    reproduce->add_option("--nonlinear-n", ro.nonlinear_n, "rows per replication, nonlinear table")
        ->capture_default_str();
    reproduce->add_option("--reps", ro.replications, "replications")->capture_default_str();
    seed_opt(reproduce);
    reproduce->add_option("--only", only, "subset of tables")
        ->delimiter(',')
        ->check(CLI::IsMember({"amplification", "reducer", "nonlinear", "selection", "invariance"}));
    reproduce->add_option("--threads", sim.threads, "OpenMP threads");
    add_common(reproduce, common);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::Error& e) {
        if (e.get_exit_code() == 0) {
            std::ostringstream sink;
            app.exit(e, out, sink);
            return kExitOk;
        }
        err << "ERROR:" << kExitUsage << ":Usage: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        if (sim.threads < 0) throw UsageError("--threads must be positive");
        kernels::set_thread_count(sim.threads);
        if (analyze->parsed()) {
            if (band && select.empty()) throw UsageError("--band requires --select");
            emit(do_analyze(model_path, x, y, condition, select, band, center, common.format), common, out);
        } else if (simulate->parsed()) {
            if (band.has_value() != !select.empty()) throw UsageError("--select and --band go together");
            const LinearSCM model = load_model(model_path);
            mc::SimConfig cfg;
            cfg.n = sim.n;
            cfg.replications = sim.reps;
            cfg.seed = resolve_seed(sim.seed);
            cfg.disturbance = uniform ? mc::Disturbance::Uniform : mc::Disturbance::Gaussian;
            if (band) cfg.selection_band = *band;
            mc::ExperimentSpec spec;
            spec.treatment = x;
            spec.outcome = y;
            spec.conditioning_sets.push_back({});
            if (!condition.empty()) spec.conditioning_sets.push_back(condition);
            if (!select.empty()) spec.selection = mc::SelectionSpec{select, center};
            const auto report = mc::bias_experiment(model, spec, cfg);
            if (!save_data.empty()) {
                Dataset d = mc::sample(model, cfg, 0);
                if (spec.selection) d = mc::select_band(d, select, center, *band);
                write_csv(d, save_data);
            }
            emit(experiment_text(report, common.format), common, out);
        } else if (dsep->parsed()) {
            const LinearSCM model = load_model(model_path);
            const auto q = graph::parse_separation_query(query);
            emit(separation_text(q, graph::d_separated(model.graph(), q), common.format), common, out);
        } else if (taxonomy->parsed()) {
            const LinearSCM model = load_model(model_path);
            const auto q = graph::parse_taxonomy_query(query);
            const auto report = graph::bias_taxonomy(model.graph(), q.treatment, q.outcome, q.conditioned);
            std::optional<graph::IvPrediction> pred;
            if (!iv.empty())
                pred = graph::iv_effect_prediction(model.graph(), q.treatment, q.outcome, iv, q.conditioned);
            emit(taxonomy_text(q, report, pred, iv, common.format), common, out);
        } else if (classify->parsed()) {
            emit(do_classify(c0, c1, c2, c3, c4, common.format), common, out);
        } else if (diagnose->parsed()) {
            const Dataset data = read_csv(std::filesystem::path(data_path));
            diag::SensitivityOptions opt;
            opt.k = k;
            opt.resamples = resamples;
            opt.seed = resolve_seed(sim.seed);
            const auto verdict = diag::iv_sensitivity_test(data, x, y, z, condition, opt);
            std::vector<diag::CovariateAdvice> advice;
            if (!screen.empty()) advice = diag::covariate_screen(data, x, y, screen);
            emit(diagnose_text(verdict, advice, common.format), common, out);
        } else if (reproduce->parsed()) {
            ro.seed = resolve_seed(sim.seed);
            ro.validate();
            std::vector<repro::Table> tables;
            const auto wanted = [&](const char* name) {
                return only.empty() || std::find(only.begin(), only.end(), name) != only.end();
            };
            if (wanted("amplification")) tables.push_back(repro::amplification_table(ro));
            if (wanted("reducer")) tables.push_back(repro::reducer_table(ro));
            if (wanted("nonlinear")) tables.push_back(repro::nonlinear_table(ro));
            if (wanted("selection")) tables.push_back(repro::selection_table(ro));
            if (wanted("invariance")) tables.push_back(repro::invariance_table(ro));
            emit(reproduce_text(tables, common.format), common, out);
            std::vector<std::string> failed;
            for (const auto& t : tables)
                for (const auto& r : t.rows)
                    if (!r.pass) failed.push_back(t.name + ": " + r.label);
            if (!failed.empty()) {
                err << "ERROR:" << kExitInvariant << ":InvariantViolation: " << failed.size()
                    << " row(s) outside tolerance: " << join(failed, "; ") << '\n';
                return kExitInvariant;
            }
        }
    } catch (const UsageError& e) {
        err << "ERROR:" << kExitUsage << ":Usage: " << e.what() << '\n';
        return kExitUsage;
    } catch (const Error& e) {
        const int code = exit_code_for(e.kind());
        err << "ERROR:" << code << ":" << e.what() << '\n';
        return code;
    } catch (const std::exception& e) {
        err << "ERROR:" << kExitInvariant << ":InvariantViolation: " << e.what() << '\n';
        return kExitInvariant;
    }
    return kExitOk;
}

}  // namespace biaslab::cli
