// Acceptance run: one line per criterion, nonzero exit if any fails.
// Optional arguments select criteria by number, e.g. `acceptance 1 4`.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "biaslab/analytic_bias.hpp"
#include "biaslab/error.hpp"
#include "biaslab/figures.hpp"
#include "biaslab/graph_analysis.hpp"
#include "biaslab/linear_scm.hpp"
#include "biaslab/mc_engine.hpp"
#include "biaslab/model_spec.hpp"

using namespace biaslab;

namespace {

struct Result {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& why) {
        if (!ok) {
            if (pass) detail << "first failure: " << why << "; ";
            pass = false;
        }
    }
};

std::string model_path(const std::string& name) { return std::string(BIASLAB_SOURCE_DIR) + "/models/" + name; }

mc::SimConfig config(std::size_t n, std::uint64_t seed, std::size_t reps = 1) {
    mc::SimConfig c;
    c.n = n;
    c.seed = seed;
    c.replications = reps;
    return c;
}

double z_score(double value, double target, double se) { return std::abs(value - target) / se; }

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

// 1 ---------------------------------------------------------------------------
void amplification_identity(Result& r) {
    const double grid12[] = {-0.5, -0.2, 0.0, 0.2, 0.5};
    const double grid3[] = {0.0, 0.3, 0.6, 0.8};
    const double c0 = 0.3;
    double worst_identity = 0.0, worst_z = 0.0;
    int points = 0;
    std::uint64_t seed = 100;
    for (double c1 : grid12)
        for (double c2 : grid12)
            for (double c3 : grid3) {
                bias::BiasReport rep;
                try {
                    rep = bias::linear_bias_pair(c0, c1, c2, c3);
                } catch (const Error&) {
                    continue;  // infeasible corner
                }
                ++points;
                const double gap = std::abs(rep.bz * (1.0 - c3 * c3) - rep.b0);
                worst_identity = std::max(worst_identity, gap);
                r.require(gap <= 1e-12, "identity at c1=" + fmt(c1) + " c2=" + fmt(c2) + " c3=" + fmt(c3));

                // Five replications are five independent seeds of the stream.
                const auto ex = mc::bias_experiment(figures::instrument_model(c0, c1, c2, c3),
                                                    {"X", "Y", {{}, {"Z"}}, {}}, config(1'000'000, seed++, 5));
                const double targets[] = {rep.a2, rep.a3};
                for (int k = 0; k < 2; ++k) {
                    const double z = z_score(ex.rows[static_cast<std::size_t>(k)].mean_slope, targets[k],
                                             ex.rows[static_cast<std::size_t>(k)].mc_se);
                    worst_z = std::max(worst_z, z);
                    r.require(z <= 4.0, std::string(k ? "A3" : "A2") + " at c1=" + fmt(c1) + " c2=" + fmt(c2) +
                                            " c3=" + fmt(c3) + " z=" + fmt(z));
                }
            }
    r.detail << points << " feasible points, max identity gap " << fmt(worst_identity) << ", max |z| " << fmt(worst_z);
}

// 2 ---------------------------------------------------------------------------
void u_projection(Result& r) {
    std::mt19937_64 gen(2);
    std::uniform_real_distribution<double> u(-0.7, 0.7);
    double worst = 0.0;
    for (int draw = 0; draw < 5; ++draw) {
        double c1, c3;
        do {
            c1 = u(gen);
            c3 = u(gen);
        } while (c1 * c1 + c3 * c3 >= 0.95);
        const auto proj = bias::u_projection(c1, c3);
        const double expect_beta = c1 / (1 - c3 * c3), expect_alpha = -c1 * c3 / (1 - c3 * c3);
        r.require(std::abs(proj.beta - expect_beta) < 1e-14 && std::abs(proj.alpha - expect_alpha) < 1e-14,
                  "closed form");
        const Dataset d = mc::sample(figures::instrument_model(0.3, c1, 0.4, c3), config(1'000'000, 200 + draw));
        const std::vector<std::string> xz{"X", "Z"};
        const auto fit = mc::ols(d, "U", xz);
        const double zb = z_score(fit.coefficient("X"), proj.beta, fit.standard_error("X"));
        const double za = z_score(fit.coefficient("Z"), proj.alpha, fit.standard_error("Z"));
        worst = std::max({worst, zb, za});
        r.require(zb <= 4 && za <= 4, "draw " + std::to_string(draw) + " z=" + fmt(std::max(zb, za)));
    }
    r.detail << "5 draws, max |z| " << fmt(worst);
}

// 3 ---------------------------------------------------------------------------
void reducer_threshold(Result& r) {
    const double c0 = 0.3, c1 = 0.5, c2 = 0.4, c3 = 0.6;
    const double threshold = bias::reducer_threshold(c1, c2, c3);
    r.require(std::abs(threshold - 0.1875) < 1e-12, "threshold " + fmt(threshold));
    // Analytic flip: dense sweep on both sides of the threshold.
    for (int i = -40; i <= 40; ++i) {
        const double c4 = threshold + 0.005 * i;
        const auto rep = bias::imperfect_instrument_report(c0, c1, c2, c3, c4);
        const bool bz_wins = std::abs(rep.bz) > std::abs(rep.b0);
        const bias::Classification expect = i < 0    ? bias::Classification::Amplifier
                                            : i == 0 ? bias::Classification::Neutral
                                                     : bias::Classification::Reducer;
        r.require(rep.classification == expect, "class at c4=" + fmt(c4));
        if (i != 0) r.require(bz_wins == (i < 0), "|bz| vs |b0| at c4=" + fmt(c4));
    }

    double worst = 0.0;
    std::uint64_t seed = 300;
    for (double c4 : {0.0, 0.1, 0.15, 0.1875, 0.2, 0.25, 0.3}) {
        const auto rep = bias::imperfect_instrument_report(c0, c1, c2, c3, c4);
        r.require(std::abs(rep.b0 - (c1 * c2 + c3 * c4)) < 1e-12, "b0 closed form");
        const auto ex = mc::bias_experiment(figures::imperfect_instrument_model(c0, c1, c2, c3, c4),
                                            {"X", "Y", {{}, {"Z"}}, {}}, config(1'000'000, seed++, 2));
        const double b0 = std::abs(ex.rows[0].mean_slope - c0);
        const double z = z_score(b0, std::abs(rep.b0), ex.rows[0].mc_se);
        worst = std::max(worst, z);
        r.require(z <= 4.0, "|b0| at c4=" + fmt(c4) + " z=" + fmt(z));
        if (std::abs(c4 - threshold) > 0.04) {
            const double bz = std::abs(ex.rows[1].mean_slope - c0);
            r.require((bz > b0) == (c4 < threshold), "empirical side at c4=" + fmt(c4));
        }
    }
    r.detail << "threshold " << fmt(threshold) << ", 81-point analytic sweep, max |b0| z " << fmt(worst);
}

// 4 ---------------------------------------------------------------------------
void nonlinear_new_bias(Result& r) {
    bias::NonlinearOutcomeModel m;
    m.c1 = 0.5;
    m.c3 = 0.6;
    m.f = bias::FunctionSpec::polynomial({0.0, 1.0});
    m.g = bias::FunctionSpec::reciprocal(1.0);
    m.outcome_noise_variance = 0.1;
    const auto exact = bias::nonlinear_bias_pair(m, 1.0, 1.0);
    r.require(std::abs(exact.b0) < 1e-12 && std::abs(exact.bz - 0.46875) < 1e-12, "closed form");

    mc::BinOptions bins;
    bins.width = 0.1;
    bins.step = 0.2;
    auto c = config(10'000'000, 400);
    c.min_abs_x = 0.5;
    const std::vector<EvaluationPoint> pt{{{{"X", 1.0}, {"Z", 1.0}}}};
    const auto rep = mc::bias_experiment(m, pt, c, bins);
    const auto& row = rep.rows.at(0);
    const double a1 = m.f.derivative(1.0);
    const double new_bias = row.a3.value - a1;
    r.require(std::abs(row.a2.value - a1) <= 0.05, "a2 " + fmt(row.a2.value));
    r.require(std::abs(new_bias - 0.469) <= 0.05, "a3 - f'(1) " + fmt(new_bias));
    r.detail << "a2 - f'(1) = " << fmt(row.a2.value - a1) << " (se " << fmt(row.a2.se) << "), a3 - f'(1) = "
             << fmt(new_bias) << " (se " << fmt(row.a3.se) << ", bin target " << fmt(row.a3.target - a1) << ")";
}

// 5 ---------------------------------------------------------------------------
void nonlinear_z0(Result& r) {
    bias::NonlinearOutcomeModel m;
    m.c1 = 0.5;
    m.c3 = 0.6;
    m.f = bias::FunctionSpec::polynomial({0.1, 1.0, -0.2});
    m.g = bias::FunctionSpec::polynomial({1.0, 0.5, 0.3, -0.1});
    double worst = 0.0, largest = 0.0;
    for (int i = 0; i <= 20; ++i) {
        const double x = -2.0 + 0.2 * i;
        const auto rep = bias::nonlinear_bias_pair(m, x, 0.0);
        const double gap = std::abs(rep.bz * (1 - m.c3 * m.c3) - rep.b0);
        worst = std::max(worst, gap);
        largest = std::max(largest, std::abs(rep.b0));
        r.require(gap <= 1e-12 * std::max(1.0, std::abs(rep.b0)), "x=" + fmt(x));
    }
    r.detail << "21 points, max gap " << fmt(worst) << " (|b0| up to " << fmt(largest) << ")";
}

// 6 ---------------------------------------------------------------------------
void selection_bias(Result& r) {
    std::mt19937_64 gen(6);
    std::uniform_real_distribution<double> u(-0.8, 0.8);
    int checked = 0;
    double worst = 0.0;
    while (checked < 50) {
        const double c0 = u(gen), b1 = u(gen), b2 = u(gen);
        double closed;
        try {
            closed = bias::selection_bias(c0, b1, b2);
        } catch (const Error&) {
            continue;
        }
        const std::vector<std::string> s{"S"};
        const double oracle = partial_regression_slope(figures::selection_model(c0, b1, b2), "Y", "X", s) - c0;
        worst = std::max(worst, std::abs(oracle - closed));
        r.require(std::abs(oracle - closed) <= 1e-10, "draw " + std::to_string(checked));
        ++checked;
    }

    // Band-conditioned slopes for one point, on common random numbers.
    const double c0 = 0.5;
    const LinearSCM m = figures::selection_model(c0, 0.3, 0.4);
    const double limit = bias::selection_bias(c0, 0.3, 0.4);
    double previous_gap = INFINITY;
    std::ostringstream trail;
    bool empirical_monotone = true;
    double previous_empirical = INFINITY;
    for (double h : {0.4, 0.2, 0.1, 0.05}) {
        auto c = config(4'000'000, 600, 4);
        c.selection_band = h;
        const auto ex = mc::bias_experiment(m, {"X", "Y", {{}}, mc::SelectionSpec{"S", 0.0}}, c);
        const auto& row = ex.rows[0];
        const double band_gap = std::abs(row.analytic - row.analytic_limit);
        const double empirical_gap = std::abs(row.mean_slope - c0 - limit);
        r.require(band_gap < previous_gap, "band-expected gap not shrinking at h=" + fmt(h));
        r.require(z_score(row.mean_slope, row.analytic, row.mc_se) <= 4.0, "estimate off its band value at h=" + fmt(h));
        empirical_monotone = empirical_monotone && empirical_gap <= previous_empirical;
        previous_gap = band_gap;
        previous_empirical = empirical_gap;
        trail << " h=" << fmt(h) << ": " << fmt(row.mean_slope - c0) << "+-" << fmt(row.mc_se) << " (band "
              << fmt(row.analytic - c0) << ")";
    }
    r.detail << "50 draws max gap " << fmt(worst) << "; limit " << fmt(limit) << ";" << trail.str()
             << "; raw estimates monotone: " << (empirical_monotone ? "yes" : "no");
}

// 7 ---------------------------------------------------------------------------
void iv_insensitivity(Result& r) {
    const LinearSCM m = build_model(load_model_spec(model_path("fig3.scm")));
    int within = 0;
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto c = config(1'000'000, 700 + seed);
        c.selection_band = 0.05;
        const auto ex = mc::bias_experiment(m, {"X", "Y", {{}, {"Z"}}, mc::SelectionSpec{"S", 0.0}}, c);
        const auto& ch = ex.changes.at(0);
        const double z = std::abs(ch.mean_delta) / ch.se;
        worst = std::max(worst, z);
        within += z < 4.0;
    }
    r.require(within >= 19, std::to_string(within) + "/20 within 4 SE");
    graph::SeparationQuery q{"Y", "Z", {"X", "S"}};
    const bool sep = graph::d_separated(m.graph(), q);
    r.require(sep, "Y and Z not separated by {X, S}");
    r.detail << within << "/20 seeds within 4 SE (max |z| " << fmt(worst) << "), Y _||_ Z | X,S: "
             << (sep ? "true" : "false");
}

// 8 ---------------------------------------------------------------------------
bool has_path(const graph::PathReport& rep, const std::vector<std::string>& nodes) {
    return std::any_of(rep.open_paths.begin(), rep.open_paths.end(),
                       [&](const graph::ClassifiedPath& p) { return p.nodes == nodes; });
}

void taxonomy(Result& r) {
    const CausalGraph g = load_model_spec(model_path("fig4.scm")).graph();
    const auto s1 = graph::bias_taxonomy(g, "X", "Y", {"S1"});
    const auto s2 = graph::bias_taxonomy(g, "X", "Y", {"S2"});
    const auto s3 = graph::bias_taxonomy(g, "X", "Y", {"S3"});
    r.require(s1.has_confounding_component && s1.has_selection_component, "S1 should show both");
    r.require(!s2.has_confounding_component && s2.has_selection_component, "S2 should be selection only");
    r.require(s3.has_confounding_component && !s3.has_selection_component, "S3 should be confounding only");

    const auto s2u2 = graph::bias_taxonomy(g, "X", "Y", {"S2", "U2"});
    r.require(s2u2.open_paths.empty(), "S2 with U2 leaves open paths");

    const auto s1u1 = graph::bias_taxonomy(g, "X", "Y", {"S1", "U1"});
    r.require(!s1u1.has_confounding_component && s1u1.has_selection_component, "S1 with U1 components");
    std::size_t selection_paths = 0;
    for (const auto& p : s1.open_paths) {
        if (p.classification == graph::PathClass::SelectionInduced) {
            ++selection_paths;
            r.require(has_path(s1u1, p.nodes), "selection path of S1 lost after adding U1");
        } else {
            r.require(!has_path(s1u1, p.nodes), "confounding path of S1 survives U1");
        }
    }
    r.require(selection_paths == s1u1.open_paths.size(), "U1 opened new paths");
    r.detail << "open paths S1/S2/S3: " << s1.open_paths.size() << "/" << s2.open_paths.size() << "/"
             << s3.open_paths.size() << "; S1+U1 keeps " << s1u1.open_paths.size() << " selection paths";
}

// 9 ---------------------------------------------------------------------------
void simpson(Result& r) {
    const double c0 = 0.3, c1 = 0.5, c2 = -0.5, c3 = 0.6;
    const auto rep = bias::linear_bias_pair(c0, c1, c2, c3);
    r.require(bias::simpson_reversal(c0, c1, c2, c3), "no analytic reversal");
    r.require(std::signbit(rep.a2) != std::signbit(rep.a3), "analytic signs agree");
    const auto ex = mc::bias_experiment(figures::instrument_model(c0, c1, c2, c3), {"X", "Y", {{}, {"Z"}}, {}},
                                        config(1'000'000, 900));
    const auto& a2 = ex.rows[0];
    const auto& a3 = ex.rows[1];
    r.require(z_score(a2.mean_slope, rep.a2, a2.mc_se) <= 4 && z_score(a3.mean_slope, rep.a3, a3.mc_se) <= 4,
              "estimates off the closed forms");
    r.require(a2.mean_slope > 4 * a2.mc_se && a3.mean_slope < -4 * a3.mc_se, "empirical signs not resolved");
    r.detail << "A2 " << fmt(rep.a2) << " vs " << fmt(a2.mean_slope) << "+-" << fmt(a2.mc_se) << ", A3 "
             << fmt(rep.a3) << " vs " << fmt(a3.mean_slope) << "+-" << fmt(a3.mc_se);
}

// 10 --------------------------------------------------------------------------
void attenuation(Result& r) {
    auto c = config(1'000'000, 1000);
    c.disturbance = mc::Disturbance::Uniform;
    const Dataset d = mc::sample(build_model(load_model_spec(model_path("unit_square.scm"))), c);
    const std::vector<std::string> x{"X"};
    const double slope = mc::ols(d, "U", x).coefficient("X");
    r.require(std::abs(slope - 0.5) <= 0.01, "slope " + fmt(slope));
    r.require(bias::attenuation_factor(1, 1, 1) == 0.5, "closed form");
    r.detail << "slope of U on X " << fmt(slope);
}

// 11 --------------------------------------------------------------------------
ModelSpec generic(ModelSpec s, std::mt19937_64& gen) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    s.standardized = false;
    s.noise_variances.clear();
    for (auto& e : s.edges) {
        const double mag = 0.2 + 0.6 * unit(gen);
        e.coefficient = unit(gen) < 0.5 ? -mag : mag;
    }
    for (const auto& v : s.variables) s.noise_variances[v.name] = 0.5 + unit(gen);
    return s;
}

void dsep_soundness(Result& r) {
    std::mt19937_64 gen(11);
    std::size_t separations = 0, queries = 0;
    double worst = 0.0;
    for (const char* name : {"fig1.scm", "fig2.scm", "fig3.scm", "fig4.scm"}) {
        const ModelSpec spec = load_model_spec(model_path(name));
        const CausalGraph g = spec.graph();
        std::vector<CovarianceMatrix> draws;
        for (int i = 0; i < 5; ++i) draws.push_back(implied_covariance(build_model(generic(spec, gen))));
        const std::size_t n = g.size();
        for (NodeId a = 0; a < n; ++a)
            for (NodeId b = a + 1; b < n; ++b) {
                std::vector<NodeId> others;
                for (NodeId v = 0; v < n; ++v)
                    if (v != a && v != b) others.push_back(v);
                for (std::size_t bits = 0; bits < (std::size_t{1} << others.size()); ++bits) {
                    graph::SeparationQuery q{g.name(a), g.name(b), {}};
                    for (std::size_t i = 0; i < others.size(); ++i)
                        if (bits >> i & 1) q.given.push_back(g.name(others[i]));
                    ++queries;
                    if (!graph::d_separated(g, q)) continue;
                    ++separations;
                    for (const auto& cov : draws) {
                        const double pc = std::abs(partial_correlation(cov, q.a, q.b, q.given));
                        worst = std::max(worst, pc);
                        r.require(pc < 1e-9, std::string(name) + ": " + q.a + " _||_ " + q.b);
                    }
                }
            }
    }
    r.detail << separations << " separations among " << queries << " queries, max |partial corr| " << fmt(worst);
}

struct Criterion {
    int id;
    const char* title;
    std::function<void(Result&)> run;
    double seconds_limit = 0.0;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria{
        {1, "amplification identity", amplification_identity, 60.0},
        {2, "U-projection", u_projection},
        {3, "reducer threshold", reducer_threshold},
        {4, "nonlinear new bias", nonlinear_new_bias, 180.0},
        {5, "nonlinear z=0 reduction", nonlinear_z0},
        {6, "selection bias", selection_bias},
        {7, "IV-insensitivity under selection", iv_insensitivity},
        {8, "bias taxonomy", taxonomy},
        {9, "Simpson reversal", simpson},
        {10, "attenuation", attenuation},
        {11, "d-separation soundness", dsep_soundness},
    };
    std::set<int> wanted;
    for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

    int failures = 0;
    for (const auto& c : criteria) {
        if (!wanted.empty() && !wanted.count(c.id)) continue;
        Result r;
        const auto start = std::chrono::steady_clock::now();
        try {
            c.run(r);
        } catch (const std::exception& e) {
            r.pass = false;
            r.detail << "exception: " << e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.seconds_limit > 0.0 && secs >= c.seconds_limit) {
            r.pass = false;
            r.detail << "; over the " << c.seconds_limit << " s budget";
        }
        failures += !r.pass;
        std::printf("%s A%d %s: %s [%.1f s]\n", r.pass ? "PASS" : "FAIL", c.id, c.title, r.detail.str().c_str(), secs);
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
