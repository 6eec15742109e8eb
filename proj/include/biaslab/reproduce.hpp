#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace biaslab::repro {

struct Row {
    std::string label;
    double analytic = 0.0;
    double empirical = 0.0;
    double se = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::string note;
};

struct Table {
    std::string name;
    std::string title;
    std::vector<Row> rows;
};

struct Options {
    std::size_t n = 1'000'000;          // rows per replication (linear tables)
    std::size_t nonlinear_n = 10'000'000;
    std::size_t replications = 4;
    std::uint64_t seed = 0;

    /// Throws InvalidArgument.
    void validate() const;
};

/// Amplification factor over the c3 grid.
Table amplification_table(const Options& options);
/// Bias pair and classification as c4 crosses the reducer threshold.
Table reducer_table(const Options& options);
/// Reciprocal-g biases at several (x, z).
Table nonlinear_table(const Options& options);
/// Selection bias over a (beta1, beta2) grid.
Table selection_table(const Options& options);
/// Slope change from adding Z under band selection.
Table invariance_table(const Options& options);

std::vector<Table> reproduce_all(const Options& options);

}  // namespace biaslab::repro
