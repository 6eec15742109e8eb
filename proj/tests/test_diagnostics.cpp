#include <doctest.h>

#include <cmath>
#include <random>

#include "biaslab/diagnostics.hpp"
#include "biaslab/error.hpp"
#include "biaslab/figures.hpp"
#include "biaslab/mc_engine.hpp"
#include "support.hpp"

using namespace biaslab;
using namespace biaslab::diag;

namespace {

template <class F>
ErrorKind kind_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an exception");
    return ErrorKind::InvariantViolation;
}

Dataset draw(const LinearSCM& m, std::size_t n, std::uint64_t seed) {
    mc::SimConfig c;
    c.n = n;
    c.seed = seed;
    return mc::sample(m, c);
}

SensitivityOptions quick(std::uint64_t seed, std::size_t resamples = 200) {
    SensitivityOptions o;
    o.seed = seed;
    o.resamples = resamples;
    return o;
}

Dataset with_noise_column(const Dataset& d, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> normal;
    std::vector<std::string> names = d.names();
    std::vector<std::vector<double>> cols;
    for (const auto& n : names) cols.emplace_back(d.column(n).begin(), d.column(n).end());
    names.push_back("N");
    auto& noise = cols.emplace_back(d.rows());
    for (double& v : noise) v = normal(gen);
    return Dataset(names, cols);
}

}  // namespace

TEST_CASE("sensitivity test on the instrument model flags confounding") {
    const Dataset d = draw(figures::instrument_model(0.3, 0.5, 0.4, 0.6), 100'000, 1);
    const auto v = iv_sensitivity_test(d, "X", "Y", "Z", {}, quick(3));
    CHECK(v.verdict == Verdict::ConfoundingSuspected);
    CHECK(v.delta == doctest::Approx(v.slope_with_iv - v.slope_without_iv));
    CHECK(std::abs(v.delta - 0.1125) < 4 * v.delta_se);
    CHECK(v.delta_se > 0.0);
    CHECK(v.n == 100'000);
    CHECK(v.resamples == 200);
    CHECK(v.caveats.size() == 3);
}

TEST_CASE("sensitivity test on selected data finds nothing") {
    const Dataset full = draw(testing::load("fig3.scm"), 100'000, 2);
    const Dataset d = mc::select_band(full, "S", 0.0, 0.05);
    const auto v = iv_sensitivity_test(d, "X", "Y", "Z", {}, quick(4));
    CHECK(v.verdict == Verdict::NoEvidenceOfConfounding);
    CHECK(std::abs(v.delta) <= v.k * v.delta_se);
}

TEST_CASE("sensitivity test without a confounder finds nothing") {
    const Dataset d = draw(figures::instrument_model(0.3, 0.0, 0.4, 0.6), 100'000, 5);
    CHECK(iv_sensitivity_test(d, "X", "Y", "Z", {}, quick(6)).verdict == Verdict::NoEvidenceOfConfounding);
}

TEST_CASE("sensitivity test with extra conditioning") {
    // Conditioning on U closes the back door; Z then changes nothing.
    const Dataset d = draw(figures::instrument_model(0.3, 0.5, 0.4, 0.6), 50'000, 7);
    const auto v = iv_sensitivity_test(d, "X", "Y", "Z", {"U"}, quick(8));
    CHECK(v.verdict == Verdict::NoEvidenceOfConfounding);
    CHECK(std::abs(v.slope_without_iv - 0.3) < 0.02);
}

TEST_CASE("sensitivity test inputs and determinism") {
    const Dataset d = draw(testing::load("fig1.scm"), 2000, 9);
    const auto a = iv_sensitivity_test(d, "X", "Y", "Z", {}, quick(1, 50));
    const auto b = iv_sensitivity_test(d, "X", "Y", "Z", {}, quick(1, 50));
    CHECK(a.delta_se == b.delta_se);
    CHECK(a.delta_se != iv_sensitivity_test(d, "X", "Y", "Z", {}, quick(2, 50)).delta_se);

    auto strict = quick(1, 50);
    strict.k = std::abs(a.delta) / a.delta_se * 1.01;
    CHECK(iv_sensitivity_test(d, "X", "Y", "Z", {}, strict).verdict == Verdict::NoEvidenceOfConfounding);
    strict.k = std::abs(a.delta) / a.delta_se * 0.99;
    CHECK(iv_sensitivity_test(d, "X", "Y", "Z", {}, strict).verdict == Verdict::ConfoundingSuspected);

    const std::vector<std::size_t> few{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    CHECK(kind_of([&] { iv_sensitivity_test(d.take(few), "X", "Y", "Z"); }) == ErrorKind::InsufficientData);
    CHECK(kind_of([&] { iv_sensitivity_test(d, "X", "Y", "W"); }) == ErrorKind::UnknownColumn);
    CHECK(kind_of([&] { iv_sensitivity_test(d, "X", "Y", "X"); }) == ErrorKind::InvalidArgument);
    auto bad = quick(1);
    bad.k = 0;
    CHECK(kind_of([&] { iv_sensitivity_test(d, "X", "Y", "Z", {}, bad); }) == ErrorKind::InvalidArgument);
    bad = quick(1, 1);
    CHECK(kind_of([&] { iv_sensitivity_test(d, "X", "Y", "Z", {}, bad); }) == ErrorKind::InvalidArgument);

    std::vector<double> x(d.column("X").begin(), d.column("X").end());
    const Dataset dup({"X", "Y", "Z"}, {x, std::vector<double>(d.column("Y").begin(), d.column("Y").end()), x});
    CHECK(kind_of([&] { iv_sensitivity_test(dup, "X", "Y", "Z", {}, quick(1, 10)); }) == ErrorKind::SingularDesign);
}

TEST_CASE("false alarms on pure selection stay rare") {
    // Within any band on S the Z coefficient is exactly zero in the
    // population, so a wide band keeps the test cheap.
    const LinearSCM m = testing::load("fig3.scm");
    int alarms = 0;
    for (std::uint64_t run = 0; run < 200; ++run) {
        const Dataset d = mc::select_band(draw(m, 100'000, 1000 + run), "S", 0.0, 0.5);
        alarms += iv_sensitivity_test(d, "X", "Y", "Z", {}, quick(run, 50)).verdict == Verdict::ConfoundingSuspected;
    }
    CHECK(alarms <= 2);
}

TEST_CASE("confounding is detected at the weakest stated strength") {
    // |c1 c2| = 0.1 and |c3| = 0.3 give a slope change of about 10 SE at n = 1e5.
    const LinearSCM m = figures::instrument_model(0.3, 0.5, 0.2, 0.3);
    int hits = 0;
    for (std::uint64_t run = 0; run < 200; ++run) {
        const Dataset d = draw(m, 100'000, 5000 + run);
        hits += iv_sensitivity_test(d, "X", "Y", "Z", {}, quick(run, 50)).verdict == Verdict::ConfoundingSuspected;
    }
    CHECK(hits >= 198);
}

TEST_CASE("covariate screen") {
    const Dataset d = with_noise_column(draw(figures::instrument_model(0.3, 0.5, 0.4, 0.6), 100'000, 11), 12);
    const auto advice = covariate_screen(d, "X", "Y", {"Z", "U", "N"});
    REQUIRE(advice.size() == 3);
    CHECK(advice[0].covariate == "Z");
    CHECK(advice[0].advice == Advice::Discard);
    CHECK(advice[0].treatment_association == doctest::Approx(0.6).epsilon(0.02));
    CHECK(std::abs(advice[0].outcome_t) < 2);
    CHECK(advice[1].advice == Advice::Retain);
    CHECK(advice[2].advice == Advice::Indeterminate);

    // Alone, Z is tied to Y given X through the collider X, so it is not discarded.
    const auto alone = covariate_screen(d, "X", "Y", {"Z"});
    CHECK(alone[0].advice == Advice::Retain);
    CHECK(alone[0].outcome_association < 0.0);

    CHECK(kind_of([&] { covariate_screen(d, "X", "Y", {}); }) == ErrorKind::InvalidArgument);
    CHECK(kind_of([&] { covariate_screen(d, "X", "Y", {"Q"}); }) == ErrorKind::UnknownColumn);
    CHECK(kind_of([&] { covariate_screen(d, "X", "Y", {"Y"}); }) == ErrorKind::InvalidArgument);
    const std::vector<std::size_t> three{0, 1, 2};
    CHECK(kind_of([&] { covariate_screen(d.take(three), "X", "Y", {"Z", "U"}); }) == ErrorKind::InsufficientData);
}

TEST_CASE("covariate screen never discards an outcome-dominant covariate") {
    std::mt19937_64 gen(77);
    for (int trial = 0; trial < 40; ++trial) {
        const ModelSpec spec = testing::random_spec(gen, 5, 0.6, 0.05, 0.6);
        // V3 plays treatment, V4 outcome; V0..V2 are candidates.
        const Dataset d = draw(build_model(spec), 3000, 100 + static_cast<std::uint64_t>(trial));
        for (const auto& a : covariate_screen(d, "V3", "V4", {"V0", "V1", "V2"})) {
            if (std::abs(a.outcome_association) > std::abs(a.treatment_association)) CHECK(a.advice != Advice::Discard);
            if (a.advice == Advice::Discard) {
                CHECK(std::abs(a.outcome_t) < 2.0);
                CHECK(std::abs(a.treatment_t) >= 2.0);
            }
        }
    }
}

TEST_CASE("verdict and advice names") {
    CHECK(to_string(Verdict::ConfoundingSuspected) == "ConfoundingSuspected");
    CHECK(to_string(Verdict::NoEvidenceOfConfounding) == "NoEvidenceOfConfounding");
    CHECK(to_string(Advice::Discard) == "Discard");
}
