#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "biaslab/causal_graph.hpp"

namespace biaslab::graph {

struct SeparationQuery {
    std::string a;
    std::string b;
    std::vector<std::string> given;

    /// Throws UnknownNode, or InvalidQuery when a == b or `given` holds a or b.
    void validate(const CausalGraph& graph) const;
};

/// Reachability ("Bayes ball") test.  Throws UnknownNode, InvalidQuery.
bool d_separated(const CausalGraph& graph, const SeparationQuery& query);

/// A path is a node sequence; consecutive nodes share an edge in either
/// direction.
using NodePath = std::vector<NodeId>;

/// True iff the path is unblocked given `given` (indexed by node id).
bool path_is_open(const CausalGraph& graph, const NodePath& path, const std::vector<bool>& given);

/// All simple paths between a and b that are open given `given`, found by
/// depth-first search.  Stops after `limit` paths and sets `*truncated`.
std::vector<NodePath> open_paths(const CausalGraph& graph, NodeId a, NodeId b, const std::vector<bool>& given,
                                 std::size_t limit = static_cast<std::size_t>(-1), bool* truncated = nullptr);

/// d-separation by exhaustive path enumeration; exponential, used to check
/// d_separated on small graphs.
bool d_separated_by_paths(const CausalGraph& graph, const SeparationQuery& query);

enum class PathClass { Confounding, SelectionInduced };
std::string_view to_string(PathClass c) noexcept;

struct ClassifiedPath {
    std::vector<std::string> nodes;
    PathClass classification = PathClass::SelectionInduced;
    /// The path ends X ... -> Y <- U_Y, with U_Y the outcome's own
    /// disturbance; it is open only when a descendant of Y is conditioned on.
    bool through_outcome_disturbance = false;
};

struct PathReport {
    std::vector<ClassifiedPath> open_paths;
    bool has_confounding_component = false;
    bool has_selection_component = false;
    bool truncated = false;
};

struct TaxonomyOptions {
    /// Graphs with more nodes than this get a capped enumeration.
    std::size_t guarded_size = 20;
    std::size_t max_paths = 1000;
};

/// Open non-causal paths between treatment and outcome given `conditioned`,
/// each labelled Confounding when it passes through an ancestor of the
/// treatment and SelectionInduced otherwise.  The outcome's disturbance is
/// modelled as an implicit extra parent so that conditioning on a
/// descendant of the outcome shows up as an open path.
PathReport bias_taxonomy(const CausalGraph& graph, std::string_view treatment, std::string_view outcome,
                         const std::vector<std::string>& conditioned, TaxonomyOptions options = {});

enum class IvPrediction { Sensitive, Insensitive };
std::string_view to_string(IvPrediction p) noexcept;

/// Whether adding `iv` to the conditioning set can move the treatment
/// coefficient.  Throws InvalidInstrument when `iv` is not d-connected to
/// the treatment or reaches the outcome other than through the treatment.
IvPrediction iv_effect_prediction(const CausalGraph& graph, std::string_view treatment, std::string_view outcome,
                                  std::string_view iv, const std::vector<std::string>& conditioned);

/// "A _||_ B | C,D" (the "| ..." part is optional).  Throws InvalidQuery.
SeparationQuery parse_separation_query(std::string_view text);

struct TaxonomyQuery {
    std::string treatment;
    std::string outcome;
    std::vector<std::string> conditioned;
};

/// "X -> Y | S1,S2".  Throws InvalidQuery.
TaxonomyQuery parse_taxonomy_query(std::string_view text);

/// Splits "A, B,C" into names; empty input gives an empty list.
std::vector<std::string> split_names(std::string_view text);

}  // namespace biaslab::graph
