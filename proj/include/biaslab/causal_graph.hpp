#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace biaslab {

enum class NodeKind { Observed, Latent, Selection };

std::string_view to_string(NodeKind kind) noexcept;
std::optional<NodeKind> parse_node_kind(std::string_view text) noexcept;

struct Node {
    std::string name;
    NodeKind kind = NodeKind::Observed;
};

struct Edge {
    std::string parent;
    std::string child;
};

using NodeId = std::size_t;

/// Immutable DAG over named variables.
///
/// The constructor rejects duplicate names, undeclared endpoints, repeated
/// edges and cycles; every instance is therefore a valid DAG.  Node ids are
/// positions in the declaration order.
class CausalGraph {
public:
    CausalGraph() = default;
    CausalGraph(std::vector<Node> nodes, const std::vector<Edge>& edges);

    std::size_t size() const noexcept { return nodes_.size(); }
    const std::vector<Node>& nodes() const noexcept { return nodes_; }
    const Node& node(NodeId id) const { return nodes_.at(id); }
    const std::string& name(NodeId id) const { return nodes_.at(id).name; }

    bool contains(std::string_view name) const;
    /// Throws UnknownNode.
    NodeId id(std::string_view name) const;
    std::vector<NodeId> ids(std::span<const std::string> names) const;

    std::span<const NodeId> parents(NodeId id) const { return parents_.at(id); }
    std::span<const NodeId> children(NodeId id) const { return children_.at(id); }
    bool has_edge(NodeId parent, NodeId child) const;
    std::vector<Edge> edges() const;

    /// Parents always precede children.
    std::span<const NodeId> topological_order() const noexcept { return topo_; }

    /// Ancestors of the given set, including the set itself.
    std::vector<bool> ancestral_closure(std::span<const NodeId> set) const;
    /// Descendants of `id`, including `id`.
    std::vector<bool> descendants(NodeId id) const;

    /// Copy with every edge into `id` removed (the graph of do(id)).
    CausalGraph without_incoming(NodeId id) const;
    /// Copy with every edge out of `id` removed.
    CausalGraph without_outgoing(NodeId id) const;
    /// Copy with an extra node that is a parent of `child` only.
    CausalGraph with_disturbance(NodeId child, const std::string& name) const;

private:
    std::vector<Node> nodes_;
    std::unordered_map<std::string, NodeId> index_;
    std::vector<std::vector<NodeId>> parents_;
    std::vector<std::vector<NodeId>> children_;
    std::vector<NodeId> topo_;
};

}  // namespace biaslab
