#pragma once

#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "biaslab/linear_scm.hpp"
#include "biaslab/model_spec.hpp"

namespace testing {

inline std::filesystem::path source_path(const std::string& relative) {
    return std::filesystem::path(BIASLAB_SOURCE_DIR) / relative;
}

inline std::filesystem::path model_path(const std::string& name) { return source_path("models/" + name); }

inline biaslab::LinearSCM load(const std::string& name) {
    return biaslab::build_model(biaslab::load_model_spec(model_path(name)));
}

/// Random DAG on V0..V{n-1}; an edge i -> j (i < j) appears with
/// probability p and carries a coefficient of magnitude in [lo, hi].
/// Non-standardized with noise variances in [0.5, 1.5].
inline biaslab::ModelSpec random_spec(std::mt19937_64& gen, int n, double p, double lo = 0.2, double hi = 0.8) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    biaslab::ModelSpec s;
    s.standardized = false;
    for (int i = 0; i < n; ++i) {
        const std::string name = "V" + std::to_string(i);
        s.variables.push_back({name, biaslab::NodeKind::Observed});
        s.noise_variances[name] = 0.5 + unit(gen);
    }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (unit(gen) < p) {
                const double mag = lo + (hi - lo) * unit(gen);
                s.edges.push_back({"V" + std::to_string(i), "V" + std::to_string(j), unit(gen) < 0.5 ? -mag : mag});
            }
    return s;
}

/// Same graph and coefficients with fresh random noise variances.
inline biaslab::ModelSpec renoise(biaslab::ModelSpec s, std::mt19937_64& gen) {
    std::uniform_real_distribution<double> unit(0.5, 1.5);
    for (auto& [name, v] : s.noise_variances) v = unit(gen);
    return s;
}

/// Coefficients of the given graph replaced by random nonzero values.
inline biaslab::ModelSpec recoefficient(biaslab::ModelSpec s, std::mt19937_64& gen) {
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

}  // namespace testing
