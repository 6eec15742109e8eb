#include "biaslab/causal_graph.hpp"

#include <algorithm>
#include <queue>

#include "biaslab/error.hpp"

namespace biaslab {

std::string_view to_string(NodeKind kind) noexcept {
    switch (kind) {
        case NodeKind::Observed: return "observed";
        case NodeKind::Latent: return "latent";
        case NodeKind::Selection: return "selection";
    }
    return "observed";
}

std::optional<NodeKind> parse_node_kind(std::string_view text) noexcept {
    if (text == "observed") return NodeKind::Observed;
    if (text == "latent") return NodeKind::Latent;
    if (text == "selection") return NodeKind::Selection;
    return std::nullopt;
}

CausalGraph::CausalGraph(std::vector<Node> nodes, const std::vector<Edge>& edges)
    : nodes_(std::move(nodes)), parents_(nodes_.size()), children_(nodes_.size()) {
    for (NodeId i = 0; i < nodes_.size(); ++i) {
        if (nodes_[i].name.empty()) throw Error(ErrorKind::InvalidArgument, "empty node name");
        if (!index_.emplace(nodes_[i].name, i).second)
            throw Error(ErrorKind::DuplicateNode, "node '" + nodes_[i].name + "' declared twice");
    }
    for (const Edge& e : edges) {
        const NodeId p = id(e.parent);
        const NodeId c = id(e.child);
        if (p == c) throw Error(ErrorKind::CyclicGraph, "self-loop on '" + e.parent + "'");
        if (has_edge(p, c))
            throw Error(ErrorKind::DuplicateEdge, "edge " + e.parent + " -> " + e.child + " repeated");
        parents_[c].push_back(p);
        children_[p].push_back(c);
    }

    // Kahn's algorithm; ties broken by declaration order so the order is stable.
    std::vector<std::size_t> indegree(nodes_.size());
    for (NodeId i = 0; i < nodes_.size(); ++i) indegree[i] = parents_[i].size();
    std::priority_queue<NodeId, std::vector<NodeId>, std::greater<>> ready;
    for (NodeId i = 0; i < nodes_.size(); ++i)
        if (indegree[i] == 0) ready.push(i);
    while (!ready.empty()) {
        const NodeId v = ready.top();
        ready.pop();
        topo_.push_back(v);
        for (NodeId c : children_[v])
            if (--indegree[c] == 0) ready.push(c);
    }
    if (topo_.size() != nodes_.size()) {
        std::string members;
        for (NodeId i = 0; i < nodes_.size(); ++i)
            if (indegree[i] > 0) members += (members.empty() ? "" : ", ") + nodes_[i].name;
        throw Error(ErrorKind::CyclicGraph, "cycle among {" + members + "}");
    }
}

bool CausalGraph::contains(std::string_view name) const {
    return index_.find(std::string(name)) != index_.end();
}

NodeId CausalGraph::id(std::string_view name) const {
    const auto it = index_.find(std::string(name));
    if (it == index_.end()) throw Error(ErrorKind::UnknownNode, "unknown node '" + std::string(name) + "'");
    return it->second;
}

std::vector<NodeId> CausalGraph::ids(std::span<const std::string> names) const {
    std::vector<NodeId> out;
    out.reserve(names.size());
    for (const auto& n : names) out.push_back(id(n));
    return out;
}

bool CausalGraph::has_edge(NodeId parent, NodeId child) const {
    const auto& ps = parents_.at(child);
    return std::find(ps.begin(), ps.end(), parent) != ps.end();
}

std::vector<Edge> CausalGraph::edges() const {
    std::vector<Edge> out;
    for (NodeId c = 0; c < nodes_.size(); ++c)
        for (NodeId p : parents_[c]) out.push_back({nodes_[p].name, nodes_[c].name});
    return out;
}

std::vector<bool> CausalGraph::ancestral_closure(std::span<const NodeId> set) const {
    std::vector<bool> mark(nodes_.size(), false);
    std::vector<NodeId> stack(set.begin(), set.end());
    while (!stack.empty()) {
        const NodeId v = stack.back();
        stack.pop_back();
        if (mark.at(v)) continue;
        mark[v] = true;
        for (NodeId p : parents_[v]) stack.push_back(p);
    }
    return mark;
}

std::vector<bool> CausalGraph::descendants(NodeId id) const {
    std::vector<bool> mark(nodes_.size(), false);
    std::vector<NodeId> stack{id};
    while (!stack.empty()) {
        const NodeId v = stack.back();
        stack.pop_back();
        if (mark.at(v)) continue;
        mark[v] = true;
        for (NodeId c : children_[v]) stack.push_back(c);
    }
    return mark;
}

CausalGraph CausalGraph::without_incoming(NodeId id) const {
    std::vector<Edge> kept;
    for (const Edge& e : edges())
        if (e.child != nodes_.at(id).name) kept.push_back(e);
    return CausalGraph(nodes_, kept);
}

CausalGraph CausalGraph::without_outgoing(NodeId id) const {
    std::vector<Edge> kept;
    for (const Edge& e : edges())
        if (e.parent != nodes_.at(id).name) kept.push_back(e);
    return CausalGraph(nodes_, kept);
}

CausalGraph CausalGraph::with_disturbance(NodeId child, const std::string& name) const {
    auto nodes = nodes_;
    nodes.push_back({name, NodeKind::Latent});
    auto es = edges();
    es.push_back({name, nodes_.at(child).name});
    return CausalGraph(std::move(nodes), es);
}

}  // namespace biaslab
