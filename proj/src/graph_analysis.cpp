#include "biaslab/graph_analysis.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <functional>

#include "biaslab/error.hpp"

namespace biaslab::graph {
namespace {

std::vector<bool> mask(const CausalGraph& g, const std::vector<std::string>& names) {
    std::vector<bool> m(g.size(), false);
    for (const auto& n : names) m[g.id(n)] = true;
    return m;
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

bool valid_name(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
    });
}

std::string unused_name(const CausalGraph& g, const std::string& base) {
    std::string name = base;
    for (int i = 2; g.contains(name); ++i) name = base + "_" + std::to_string(i);
    return name;
}

}  // namespace

void SeparationQuery::validate(const CausalGraph& graph) const {
    const NodeId ia = graph.id(a);
    const NodeId ib = graph.id(b);
    if (ia == ib) throw Error(ErrorKind::InvalidQuery, "query endpoints must differ");
    for (const auto& n : given) {
        const NodeId id = graph.id(n);
        if (id == ia || id == ib)
            throw Error(ErrorKind::InvalidQuery, "conditioning set contains endpoint '" + n + "'");
    }
}

bool d_separated(const CausalGraph& graph, const SeparationQuery& query) {
    query.validate(graph);
    const std::vector<bool> given = mask(graph, query.given);
    std::vector<NodeId> given_ids;
    for (NodeId v = 0; v < graph.size(); ++v)
        if (given[v]) given_ids.push_back(v);
    const std::vector<bool> anc = graph.ancestral_closure(given_ids);

    const NodeId start = graph.id(query.a);
    const NodeId target = graph.id(query.b);
    // State (v, up): arrived from a child, or v is the start.  (v, down): arrived from a parent.
    std::vector<bool> seen_up(graph.size(), false), seen_down(graph.size(), false);
    std::deque<std::pair<NodeId, bool>> queue{{start, true}};
    seen_up[start] = true;
    while (!queue.empty()) {
        const auto [v, up] = queue.front();
        queue.pop_front();
        if (v == target && !given[v]) return false;
        const auto visit = [&](NodeId w, bool w_up) {
            auto& seen = w_up ? seen_up : seen_down;
            if (!seen[w]) {
                seen[w] = true;
                queue.emplace_back(w, w_up);
            }
        };
        if (up) {
            if (given[v]) continue;
            for (NodeId p : graph.parents(v)) visit(p, true);
            for (NodeId c : graph.children(v)) visit(c, false);
        } else {
            if (!given[v])
                for (NodeId c : graph.children(v)) visit(c, false);
            if (anc[v])
                for (NodeId p : graph.parents(v)) visit(p, true);
        }
    }
    return true;
}

bool path_is_open(const CausalGraph& graph, const NodePath& path, const std::vector<bool>& given) {
    for (std::size_t i = 1; i + 1 < path.size(); ++i) {
        const NodeId v = path[i];
        const bool collider = graph.has_edge(path[i - 1], v) && graph.has_edge(path[i + 1], v);
        if (collider) {
            const std::vector<bool> desc = graph.descendants(v);
            bool activated = false;
            for (NodeId w = 0; w < graph.size() && !activated; ++w) activated = desc[w] && given[w];
            if (!activated) return false;
        } else if (given[v]) {
            return false;
        }
    }
    return true;
}

std::vector<NodePath> open_paths(const CausalGraph& graph, NodeId a, NodeId b, const std::vector<bool>& given,
                                 std::size_t limit, bool* truncated) {
    std::vector<bool> activated(graph.size(), false);
    for (NodeId v = 0; v < graph.size(); ++v) {
        const std::vector<bool> desc = graph.descendants(v);
        for (NodeId w = 0; w < graph.size(); ++w)
            if (desc[w] && given[w]) activated[v] = true;
    }

    std::vector<NodePath> out;
    if (truncated) *truncated = false;
    NodePath path{a};
    std::vector<bool> on_path(graph.size(), false);
    on_path[a] = true;
    bool stop = false;

    // `into` tells whether the edge used to reach v points into v.
    std::function<void(NodeId, bool)> dfs = [&](NodeId v, bool into) {
        const auto step = [&](NodeId w, bool w_into) {
            if (stop || on_path[w]) return;
            if (v != a) {
                const bool collider = into && !w_into;
                if (collider ? !activated[v] : given[v]) return;
            }
            path.push_back(w);
            if (w == b) {
                if (out.size() >= limit) {
                    stop = true;
                    if (truncated) *truncated = true;
                } else {
                    out.push_back(path);
                }
            } else {
                on_path[w] = true;
                dfs(w, w_into);
                on_path[w] = false;
            }
            path.pop_back();
        };
        // Moving to a child means the next edge leaves v; to a parent, it enters v.
        for (NodeId c : graph.children(v)) step(c, true);
        for (NodeId p : graph.parents(v)) step(p, false);
    };
    dfs(a, false);
    return out;
}

bool d_separated_by_paths(const CausalGraph& graph, const SeparationQuery& query) {
    query.validate(graph);
    return open_paths(graph, graph.id(query.a), graph.id(query.b), mask(graph, query.given), 1).empty();
}

std::string_view to_string(PathClass c) noexcept {
    return c == PathClass::Confounding ? "Confounding" : "SelectionInduced";
}

std::string_view to_string(IvPrediction p) noexcept {
    return p == IvPrediction::Sensitive ? "Sensitive" : "Insensitive";
}

PathReport bias_taxonomy(const CausalGraph& graph, std::string_view treatment, std::string_view outcome,
                         const std::vector<std::string>& conditioned, TaxonomyOptions options) {
    SeparationQuery{std::string(treatment), std::string(outcome), conditioned}.validate(graph);
    const NodeId x = graph.id(treatment);
    const NodeId y = graph.id(outcome);
    const NodeId xs[] = {x};
    std::vector<bool> ancestor = graph.ancestral_closure(xs);
    ancestor[x] = false;

    const CausalGraph aug = graph.with_disturbance(y, unused_name(graph, "U_" + std::string(outcome)));
    const NodeId uy = aug.size() - 1;
    std::vector<bool> given = mask(graph, conditioned);
    given.push_back(false);
    ancestor.push_back(false);

    const std::size_t limit =
        graph.size() > options.guarded_size ? options.max_paths : static_cast<std::size_t>(-1);
    PathReport report;

    const auto record = [&](const NodePath& p, bool virtual_path) {
        ClassifiedPath cp;
        cp.through_outcome_disturbance = virtual_path;
        cp.classification = std::any_of(p.begin(), p.end(), [&](NodeId v) { return ancestor[v]; })
                                ? PathClass::Confounding
                                : PathClass::SelectionInduced;
        for (NodeId v : p) cp.nodes.push_back(aug.name(v));
        (cp.classification == PathClass::Confounding ? report.has_confounding_component
                                                     : report.has_selection_component) = true;
        report.open_paths.push_back(std::move(cp));
    };

    bool cut = false;
    for (const NodePath& p : open_paths(aug, x, y, given, limit, &cut)) {
        bool causal = true;
        for (std::size_t i = 0; i + 1 < p.size() && causal; ++i) causal = aug.has_edge(p[i], p[i + 1]);
        if (!causal) record(p, false);
    }
    report.truncated = cut;
    for (const NodePath& p : open_paths(aug, x, uy, given, limit, &cut)) {
        // p ends ... -> Y <- U_Y; keep it only when Y is a collider there.
        if (p.size() >= 3 && aug.has_edge(p[p.size() - 3], y)) record(p, true);
    }
    report.truncated = report.truncated || cut;
    return report;
}

IvPrediction iv_effect_prediction(const CausalGraph& graph, std::string_view treatment, std::string_view outcome,
                                  std::string_view iv, const std::vector<std::string>& conditioned) {
    const std::string t(treatment), o(outcome), z(iv);
    if (z == t || z == o) throw Error(ErrorKind::InvalidInstrument, "instrument must differ from treatment and outcome");
    if (std::find(conditioned.begin(), conditioned.end(), z) != conditioned.end())
        throw Error(ErrorKind::InvalidQuery, "instrument '" + z + "' is already in the conditioning set");
    if (d_separated(graph, {z, t, {}}))
        throw Error(ErrorKind::InvalidInstrument, "'" + z + "' is not associated with '" + t + "'");
    if (!d_separated(graph.without_outgoing(graph.id(t)), {z, o, {}}))
        throw Error(ErrorKind::InvalidInstrument, "'" + z + "' reaches '" + o + "' other than through '" + t + "'");

    std::vector<std::string> given{t};
    for (const auto& c : conditioned)
        if (c != t) given.push_back(c);
    return d_separated(graph, {o, z, given}) ? IvPrediction::Insensitive : IvPrediction::Sensitive;
}

std::vector<std::string> split_names(std::string_view text) {
    std::vector<std::string> out;
    if (trim(text).empty()) return out;
    std::size_t start = 0;
    while (true) {
        const auto comma = text.find(',', start);
        const std::string name = trim(text.substr(start, comma == std::string_view::npos ? text.npos : comma - start));
        if (!valid_name(name)) throw Error(ErrorKind::InvalidQuery, "bad variable name '" + name + "'");
        out.push_back(name);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

SeparationQuery parse_separation_query(std::string_view text) {
    const auto sep = text.find("_||_");
    if (sep == std::string_view::npos) throw Error(ErrorKind::InvalidQuery, "expected 'A _||_ B | C,D'");
    const auto bar = text.find('|', sep + 4);
    SeparationQuery q;
    q.a = trim(text.substr(0, sep));
    q.b = trim(text.substr(sep + 4, bar == std::string_view::npos ? text.npos : bar - sep - 4));
    if (!valid_name(q.a) || !valid_name(q.b)) throw Error(ErrorKind::InvalidQuery, "expected 'A _||_ B | C,D'");
    if (bar != std::string_view::npos) q.given = split_names(text.substr(bar + 1));
    return q;
}

TaxonomyQuery parse_taxonomy_query(std::string_view text) {
    const auto arrow = text.find("->");
    if (arrow == std::string_view::npos) throw Error(ErrorKind::InvalidQuery, "expected 'X -> Y | S1'");
    const auto bar = text.find('|', arrow + 2);
    TaxonomyQuery q;
    q.treatment = trim(text.substr(0, arrow));
    q.outcome = trim(text.substr(arrow + 2, bar == std::string_view::npos ? text.npos : bar - arrow - 2));
    if (!valid_name(q.treatment) || !valid_name(q.outcome))
        throw Error(ErrorKind::InvalidQuery, "expected 'X -> Y | S1'");
    if (bar != std::string_view::npos) q.conditioned = split_names(text.substr(bar + 1));
    return q;
}

}  // namespace biaslab::graph
