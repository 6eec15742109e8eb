#include "biaslab/reproduce.hpp"

#include <cmath>
#include <cstdio>

#include "biaslab/analytic_bias.hpp"
#include "biaslab/error.hpp"
#include "biaslab/figures.hpp"
#include "biaslab/mc_engine.hpp"

namespace biaslab::repro {
namespace {

constexpr double kC0 = 0.3, kC1 = 0.5, kC2 = 0.4, kC3 = 0.6;
constexpr double kBand = 0.05;

std::string fmt(const char* pattern, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, a);
    return buf;
}

std::string fmt(const char* pattern, double a, double b) {
    char buf[96];
    std::snprintf(buf, sizeof buf, pattern, a, b);
    return buf;
}

std::string fmt(const char* pattern, double a, double b, double c) {
    char buf[128];
    std::snprintf(buf, sizeof buf, pattern, a, b, c);
    return buf;
}

Row judged(std::string label, double analytic, double empirical, double se, std::string note = {}) {
    Row r;
    r.label = std::move(label);
    r.analytic = analytic;
    r.empirical = empirical;
    r.se = se;
    r.tolerance = std::max(mc::kSigmaTolerance * se, mc::kAbsoluteTolerance);
    r.pass = std::isfinite(empirical) && std::abs(empirical - analytic) <= r.tolerance;
    r.note = std::move(note);
    return r;
}

mc::SimConfig config(const Options& o, std::uint64_t salt) {
    mc::SimConfig c;
    c.n = o.n;
    c.replications = o.replications;
    c.seed = o.seed * 1000003ULL + salt;
    return c;
}

}  // namespace

void Options::validate() const {
    if (n < 1000 || nonlinear_n < 1000) throw Error(ErrorKind::InvalidArgument, "n must be at least 1000");
    if (replications < 2) throw Error(ErrorKind::InvalidArgument, "reproduce needs at least 2 replications");
}

Table amplification_table(const Options& o) {
    Table t{"amplification", "bz/b0 against 1/(1-c3^2); c0=0.3, c1=0.5, c2=0.4", {}};
    std::uint64_t salt = 100;
    for (double c3 : {0.0, 0.3, 0.6, 0.8}) {
        const LinearSCM model = figures::instrument_model(kC0, kC1, kC2, c3);
        const auto rep = mc::bias_experiment(model, {"X", "Y", {{}, {"Z"}}, {}}, config(o, salt++));
        const auto& s = rep.per_replication_slopes;
        const std::size_t reps = o.replications;
        std::vector<double> ratio(reps);
        double mean = 0.0;
        for (std::size_t r = 0; r < reps; ++r) {
            ratio[r] = (s[2 * r + 1] - kC0) / (s[2 * r] - kC0);
            mean += ratio[r];
        }
        mean /= static_cast<double>(reps);
        double ss = 0.0;
        for (double v : ratio) ss += (v - mean) * (v - mean);
        const double se = std::sqrt(ss / static_cast<double>(reps - 1) / static_cast<double>(reps));
        const auto report = bias::linear_bias_pair(kC0, kC1, kC2, c3);
        t.rows.push_back(judged(fmt("c3=%.2f", c3), report.amplification, mean, se,
                                fmt("b0=%.4f bz=%.4f", report.b0, report.bz)));
    }
    return t;
}

Table reducer_table(const Options& o) {
    Table t{"reducer", "imperfect instrument, c4 sweep; threshold c4* = " +
                           fmt("%.4f", bias::reducer_threshold(kC1, kC2, kC3)),
            {}};
    std::uint64_t salt = 200;
    for (double c4 : {0.0, 0.1, 0.15, 0.1875, 0.2, 0.25, 0.3}) {
        const LinearSCM model = figures::imperfect_instrument_model(kC0, kC1, kC2, kC3, c4);
        const auto rep = mc::bias_experiment(model, {"X", "Y", {{}, {"Z"}}, {}}, config(o, salt++));
        const auto an = bias::imperfect_instrument_report(kC0, kC1, kC2, kC3, c4);
        const double b0 = rep.rows[0].mean_slope - rep.causal_effect;
        const double bz = rep.rows[1].mean_slope - rep.causal_effect;
        const std::string cls = "analytic " + std::string(bias::to_string(an.classification)) + ", empirical " +
                                std::string(bias::to_string(bias::classify(b0, bz)));
        t.rows.push_back(judged(fmt("b0 c4=%.4f", c4), an.b0, b0, rep.rows[0].mc_se, cls));
        t.rows.push_back(judged(fmt("bz c4=%.4f", c4), an.bz, bz, rep.rows[1].mc_se, cls));
    }
    return t;
}

Table nonlinear_table(const Options& o) {
    Table t{"nonlinear", "f(x)=x, g(x)=1/x, c1=0.5, c3=0.6; binned finite differences, |X| >= 0.5", {}};
    bias::NonlinearOutcomeModel model;
    model.c1 = kC1;
    model.c3 = kC3;
    model.f = bias::FunctionSpec::polynomial({0.0, 1.0});
    model.g = bias::FunctionSpec::reciprocal(1.0);
    model.outcome_noise_variance = 0.1;

    std::vector<EvaluationPoint> points;
    for (double x : {0.8, 1.0, 1.5})
        for (double z : {0.0, 0.5, 1.0}) points.push_back({{{"X", x}, {"Z", z}}});
    mc::SimConfig cfg = config(o, 300);
    cfg.n = o.nonlinear_n;
    const auto rep = mc::bias_experiment(model, points, cfg);
    for (const auto& r : rep.rows) {
        const auto an = bias::nonlinear_bias_pair(model, r.x, r.z);
        if (r.z == 0.0) {
            Row row = judged(fmt("b0 x=%.2f", r.x), an.b0, r.a2.value - r.a1, r.a2.se);
            row.pass = r.a2.pass;
            row.tolerance += std::abs(r.a2.target - r.a2.analytic);
            row.note = fmt("finite-difference target %.4f", r.a2.target - r.a1);
            t.rows.push_back(row);
        }
        Row row = judged(fmt("bz x=%.2f z=%.2f", r.x, r.z), an.bz, r.a3.value - r.a1, r.a3.se);
        row.pass = r.a3.pass;
        row.tolerance += std::abs(r.a3.target - r.a3.analytic);
        row.note = fmt("finite-difference target %.4f", r.a3.target - r.a1) + ", " +
                   std::string(bias::to_string(an.classification));
        t.rows.push_back(row);
    }
    return t;
}

Table selection_table(const Options& o) {
    Table t{"selection", "c0=0.5, selection band |S| <= 0.05; empirical = slope - c0", {}};
    const double c0 = 0.5;
    std::uint64_t salt = 400;
    for (double b1 : {-0.3, 0.0, 0.3})
        for (double b2 : {0.0, 0.2, 0.4}) {
            const LinearSCM model = figures::selection_model(c0, b1, b2);
            mc::SimConfig cfg = config(o, salt++);
            cfg.selection_band = kBand;
            const auto rep = mc::bias_experiment(model, {"X", "Y", {{}}, mc::SelectionSpec{"S", 0.0}}, cfg);
            const auto& row = rep.rows[0];
            t.rows.push_back(judged(fmt("beta1=%.2f beta2=%.2f", b1, b2), bias::selection_bias(c0, b1, b2),
                                    row.mean_slope - c0, row.mc_se,
                                    fmt("band-expected %.5f", row.analytic - c0)));
        }
    return t;
}

Table invariance_table(const Options& o) {
    Table t{"invariance", "change in the X slope when Z is added, selected on |S| <= 0.05", {}};
    std::uint64_t salt = 500;
    const double grid[][3] = {{0.5, 0.3, 0.4}, {0.3, -0.2, 0.5}, {0.5, 0.4, 0.4}, {0.2, 0.5, -0.3}};
    for (const auto& p : grid) {
        const LinearSCM model = figures::selection_model(p[0], p[1], p[2]);
        mc::SimConfig cfg = config(o, salt++);
        cfg.selection_band = kBand;
        const auto rep = mc::bias_experiment(model, {"X", "Y", {{}, {"Z"}}, mc::SelectionSpec{"S", 0.0}}, cfg);
        const auto& c = rep.changes.at(0);
        t.rows.push_back(judged(fmt("c0=%.2f beta1=%.2f beta2=%.2f", p[0], p[1], p[2]), c.analytic, c.mean_delta,
                                c.se, fmt("slope without Z %.4f", rep.rows[0].mean_slope)));
    }
    return t;
}

std::vector<Table> reproduce_all(const Options& o) {
    o.validate();
    return {amplification_table(o), reducer_table(o), nonlinear_table(o), selection_table(o), invariance_table(o)};
}

}  // namespace biaslab::repro
