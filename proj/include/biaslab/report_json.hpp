#pragma once

// JSON encodings of the result types.  Non-finite numbers become null.

#include <json.hpp>

#include "biaslab/analytic_bias.hpp"
#include "biaslab/diagnostics.hpp"
#include "biaslab/graph_analysis.hpp"
#include "biaslab/mc_engine.hpp"
#include "biaslab/reproduce.hpp"

namespace biaslab::io {

using nlohmann::json;

json to_json(const bias::BiasReport& r);
json to_json(const mc::ExperimentReport& r);
json to_json(const mc::NonlinearReport& r);
json to_json(const graph::PathReport& r);
json to_json(const diag::SensitivityVerdict& v);
json to_json(const std::vector<diag::CovariateAdvice>& advice);
json to_json(const repro::Table& t);

}  // namespace biaslab::io
