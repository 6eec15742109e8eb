#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "biaslab/cli.hpp"
#include "support.hpp"

using biaslab::ErrorKind;
namespace cli = biaslab::cli;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome call(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string model(const std::string& name) { return testing::model_path(name).string(); }

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "biaslab_cli_test";
    fs::create_directories(dir);
    return dir / name;
}

bool contains(const std::string& hay, const std::string& needle) { return hay.find(needle) != std::string::npos; }

}  // namespace

TEST_CASE("exit codes by error kind") {
    CHECK(cli::exit_code_for(ErrorKind::InvalidArgument) == cli::kExitUsage);
    CHECK(cli::exit_code_for(ErrorKind::InvalidQuery) == cli::kExitUsage);
    CHECK(cli::exit_code_for(ErrorKind::ParseError) == cli::kExitModelData);
    CHECK(cli::exit_code_for(ErrorKind::UnknownNode) == cli::kExitModelData);
    CHECK(cli::exit_code_for(ErrorKind::IoError) == cli::kExitModelData);
    CHECK(cli::exit_code_for(ErrorKind::InfeasibleStandardization) == cli::kExitModelData);
    CHECK(cli::exit_code_for(ErrorKind::InvariantViolation) == cli::kExitInvariant);
}

TEST_CASE("usage errors") {
    auto r = call({});
    CHECK(r.code == 1);
    r = call({"analyze"});
    CHECK(r.code == 1);
    CHECK(r.err.rfind("ERROR:1:Usage:", 0) == 0);
    r = call({"frobnicate"});
    CHECK(r.code == 1);
    r = call({"simulate", "--model", model("fig1.scm"), "--band", "0.1"});
    CHECK(r.code == 1);
    CHECK(contains(r.err, "--select"));
    r = call({"reproduce", "--reps", "1"});
    CHECK(r.code == 1);
    CHECK(r.err.rfind("ERROR:1:InvalidArgument:", 0) == 0);
    CHECK(r.out.empty());
}

TEST_CASE("model and data errors exit 2") {
    auto r = call({"analyze", "--model", "no/such/file.scm"});
    CHECK(r.code == 2);
    CHECK(r.err.rfind("ERROR:2:IoError:", 0) == 0);
    const fs::path bad = scratch("bad.scm");
    std::ofstream(bad) << "[variables]\nX observed\n[edges]\nX => Y : 0.2\n";
    r = call({"analyze", "--model", bad.string()});
    CHECK(r.code == 2);
    CHECK(contains(r.err, "ParseError"));
    r = call({"dsep", "--model", model("fig1.scm"), "X _||_ Q"});
    CHECK(r.code == 2);
    CHECK(contains(r.err, "UnknownNode"));
    r = call({"dsep", "--model", model("fig1.scm"), "X and Y"});
    CHECK(r.code == 1);
    CHECK(contains(r.err, "InvalidQuery"));
}

TEST_CASE("analyze emits the closed-form report") {
    const auto r = call({"analyze", "--model", model("fig1.scm"), "--condition", "Z", "--format", "json"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j.size() == 7);
    CHECK(j["b0"].get<double>() == doctest::Approx(0.2));
    CHECK(j["bz"].get<double>() == doctest::Approx(0.3125));
    CHECK(j["a3"].get<double>() == doctest::Approx(0.6125));
    CHECK(j["amplification"].get<double>() == doctest::Approx(1.5625));
    CHECK(j["classification"] == "Amplifier");

    const auto table = call({"analyze", "--model", model("fig1.scm"), "--condition", "Z"});
    CHECK(table.code == 0);
    CHECK(contains(table.out, "amplification   1.5625"));
    CHECK(contains(table.out, "with {Z}"));
}

TEST_CASE("analyze on a model without edges") {
    const auto r = call({"analyze", "--model", model("empty-edges.scm"), "--format", "json"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["b0"].get<double>() == 0.0);
    CHECK(j["bz"].get<double>() == 0.0);
    CHECK(j["classification"] == "Neutral");
}

TEST_CASE("simulate under selection matches the analytic slopes") {
    const std::vector<std::string> args{"simulate", "--model", model("fig3.scm"), "--select", "S",
                                        "--band",   "0.05",    "--n",    "1000000", "--seed", "7", "--condition", "Z"};
    const auto r = call(args);
    REQUIRE(r.code == 0);
    CHECK(contains(r.out, "selected on |S - 0| <= 0.05"));
    CHECK(contains(r.out, "{Z}"));
    CHECK_FALSE(contains(r.out, "FAIL"));
    CHECK(call(args).out == r.out);
}

TEST_CASE("seed falls back to the environment") {
    const std::vector<std::string> base{"simulate", "--model", model("fig1.scm"), "--n", "5000", "--format", "json"};
    auto explicit_seed = base;
    explicit_seed.insert(explicit_seed.end(), {"--seed", "11"});
    const auto a = call(explicit_seed);
    ::setenv("BIASLAB_SEED", "11", 1);
    const auto b = call(base);
    ::setenv("BIASLAB_SEED", "12", 1);
    const auto c = call(base);
    ::unsetenv("BIASLAB_SEED");
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out != c.out);
    CHECK(call(base).out != b.out);
}

TEST_CASE("dsep and taxonomy text") {
    auto r = call({"dsep", "--model", model("fig3.scm"), "Y _||_ Z | X,S"});
    CHECK(r.code == 0);
    CHECK(r.out == "Y _||_ Z | X,S : d-separated\n");
    r = call({"dsep", "--model", model("fig1.scm"), "Y _||_ Z | X"});
    CHECK(contains(r.out, "d-connected"));

    r = call({"taxonomy", "--model", model("fig4.scm"), "X -> Y | S1", "--iv", "Z"});
    REQUIRE(r.code == 0);
    CHECK(contains(r.out, "Confounding"));
    CHECK(contains(r.out, "SelectionInduced"));
    CHECK(contains(r.out, "confounding component: yes"));
    CHECK(contains(r.out, "adding Z: Sensitive"));

    r = call({"taxonomy", "--model", model("fig4.scm"), "X -> Y | S2", "--format", "json"});
    CHECK(r.code == 0);
    CHECK(nlohmann::json::parse(r.out).is_object());
}

TEST_CASE("classify") {
    auto r = call({"classify", "--c0", "0.3", "--c1", "0.5", "--c2", "0.4", "--c3", "0.6", "--c4", "0.4", "--format",
                   "json"});
    REQUIRE(r.code == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["report"]["classification"] == "Reducer");
    CHECK(j["reducer_threshold_c4"].get<double>() == doctest::Approx(0.1875));

    r = call({"classify", "--c0", "0.3", "--c1", "0.3", "--c2", "0.5", "--c3", "0", "--format", "json"});
    REQUIRE(r.code == 0);
    j = nlohmann::json::parse(r.out);
    CHECK(j["signed_rule_says_reducer"].is_null());
    CHECK(j["report"]["classification"] == "Neutral");

    r = call({"classify", "--c0", "0.3", "--c1", "0.5", "--c2", "0.4", "--c3", "0.9"});
    CHECK(r.code == 2);
    CHECK(contains(r.err, "InfeasibleStandardization"));
}

TEST_CASE("diagnose reads a CSV") {
    const fs::path csv = scratch("fig1.csv");
    auto r = call({"simulate", "--model", model("fig1.scm"), "--n", "20000", "--seed", "3", "--save-data",
                   csv.string()});
    REQUIRE(r.code == 0);
    REQUIRE(fs::exists(csv));

    r = call({"diagnose", "--data", csv.string(), "--z", "Z", "--resamples", "50", "--seed", "1", "--screen", "Z,U",
              "--format", "json"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(contains(r.out, "ConfoundingSuspected"));
    CHECK(contains(r.out, "Discard"));

    r = call({"diagnose", "--data", csv.string(), "--z", "Q", "--resamples", "50"});
    CHECK(r.code == 2);
    CHECK(contains(r.err, "UnknownColumn"));
}

TEST_CASE("reproduce subsets and --out") {
    const fs::path file = scratch("reproduce.txt");
    fs::remove(file);
    auto r = call({"reproduce", "--n", "20000", "--reps", "2", "--seed", "1", "--only", "reducer", "--out",
                   file.string()});
    REQUIRE(r.code == 0);
    CHECK(r.out.empty());
    std::ifstream in(file);
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(contains(text, "[reducer]"));
    CHECK_FALSE(contains(text, "[selection]"));
    CHECK(contains(text, "0.1875"));

    r = call({"reproduce", "--n", "20000", "--reps", "2", "--seed", "1", "--only", "reducer", "--format", "csv"});
    CHECK(r.code == 0);
    CHECK(contains(r.out, ","));

    r = call({"analyze", "--model", model("fig1.scm"), "--out", "/nonexistent-dir/x.txt"});
    CHECK(r.code == 2);
}
