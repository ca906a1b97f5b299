#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "synd/diagram.hpp"
#include "synd/grammar.hpp"

// Inclusion mappings: injective, label- and sort-preserving embeddings of one
// diagram into another. The matcher enumerates every such embedding, with
// optional anchoring (a fixed node correspondence), variable binding against
// symbol classes, and star-exactness at one pattern node (the image of that
// node's star must be the entire star of the matched target node).
//
// Algorithm: backtracking over pattern nodes in a connectivity-respecting
// order, pruning candidates by label/class, degree, per-sort incident counts
// and pairwise rib counts; once all nodes are placed, parallel ribs are
// assigned per (endpoint pair, sort) group by enumerating injective
// selections. Neighbourhoods are small, so the exponential worst case of
// subgraph isomorphism is acceptable.

namespace synd {

/// A witnessed subdiagram embedding. node_map and rib_map are injective;
/// binding gives each pattern variable the symbol it stood for.
struct InclusionMapping {
    std::map<NodeId, NodeId> node_map;
    std::map<RibId, RibId> rib_map;
    std::map<VariableName, SymbolName> binding;

    auto operator<=>(const InclusionMapping&) const = default;
};

struct MatchQuery {
    const Diagram* pattern = nullptr;
    const Diagram* target = nullptr; // must be ground
    std::optional<std::pair<NodeId, NodeId>> anchor; // (pattern node, target node)
    std::optional<NodeId> star_exact_at;             // pattern node, usually a center
    ClassMap classes;
};

namespace detail {

struct IndexedDiagram {
    bool directed = false;
    std::vector<NodeId> node_ids; // ascending
    std::map<NodeId, int> node_index;
    std::vector<Rib> ribs; // ascending by id
    std::vector<int> rib_from;
    std::vector<int> rib_to;
    std::vector<std::vector<int>> incident; // node -> rib indices, ascending
    std::vector<Label> labels;              // by node index
};

inline IndexedDiagram index_diagram(const Diagram& d) {
    IndexedDiagram ix;
    ix.directed = d.graph.directed;
    ix.node_ids.assign(d.graph.nodes.begin(), d.graph.nodes.end());
    for (int i = 0; i < static_cast<int>(ix.node_ids.size()); ++i) {
        ix.node_index[ix.node_ids[i]] = i;
    }
    ix.labels.resize(ix.node_ids.size());
    for (std::size_t i = 0; i < ix.node_ids.size(); ++i) {
        auto it = d.labeling.find(ix.node_ids[i]);
        if (it == d.labeling.end()) {
            throw InvariantError("matcher: node '" + ix.node_ids[i] + "' has no label");
        }
        ix.labels[i] = it->second;
    }
    ix.ribs = d.graph.ribs;
    std::sort(ix.ribs.begin(), ix.ribs.end(),
              [](const Rib& a, const Rib& b) { return a.id < b.id; });
    ix.incident.resize(ix.node_ids.size());
    ix.rib_from.resize(ix.ribs.size());
    ix.rib_to.resize(ix.ribs.size());
    for (int r = 0; r < static_cast<int>(ix.ribs.size()); ++r) {
        auto from = ix.node_index.find(ix.ribs[r].from);
        auto to = ix.node_index.find(ix.ribs[r].to);
        if (from == ix.node_index.end() || to == ix.node_index.end()) {
            throw InvariantError("matcher: rib '" + ix.ribs[r].id + "' has a missing endpoint");
        }
        ix.rib_from[r] = from->second;
        ix.rib_to[r] = to->second;
        ix.incident[from->second].push_back(r);
        if (to->second != from->second) ix.incident[to->second].push_back(r);
    }
    return ix;
}

// Incident rib counts per (sort, direction); direction is 0 for outgoing
// (or any, when undirected) and 1 for incoming.
inline std::map<std::pair<SortId, int>, int> incident_signature(const IndexedDiagram& ix, int v) {
    std::map<std::pair<SortId, int>, int> sig;
    for (int r : ix.incident[v]) {
        if (ix.directed) {
            if (ix.rib_from[r] == v) ++sig[{ix.ribs[r].sort, 0}];
            if (ix.rib_to[r] == v) ++sig[{ix.ribs[r].sort, 1}];
        } else {
            ++sig[{ix.ribs[r].sort, 0}];
        }
    }
    return sig;
}

// Rib counts between an ordered node pair, per (sort, forward?) for directed
// graphs and per (sort, 0) for undirected ones.
inline std::map<std::pair<SortId, int>, int> pair_signature(const IndexedDiagram& ix, int a, int b) {
    std::map<std::pair<SortId, int>, int> sig;
    for (int r : ix.incident[a]) {
        if (ix.directed) {
            if (ix.rib_from[r] == a && ix.rib_to[r] == b) ++sig[{ix.ribs[r].sort, 0}];
            if (ix.rib_from[r] == b && ix.rib_to[r] == a) ++sig[{ix.ribs[r].sort, 1}];
        } else {
            if ((ix.rib_from[r] == a && ix.rib_to[r] == b) ||
                (ix.rib_from[r] == b && ix.rib_to[r] == a)) {
                ++sig[{ix.ribs[r].sort, 0}];
            }
        }
    }
    return sig;
}

struct MatchSearch {
    const IndexedDiagram& pattern;
    const IndexedDiagram& target;
    const ClassMap& classes;
    std::optional<int> star_exact_node; // pattern node index

    std::vector<int> order;  // pattern nodes in visit order
    std::vector<int> assign; // pattern node -> target node, -1 while free
    std::vector<char> used;  // target node taken
    std::map<VariableName, SymbolName> binding;
    std::vector<InclusionMapping> results;

    MatchSearch(const IndexedDiagram& p, const IndexedDiagram& t, const ClassMap& c)
        : pattern(p), target(t), classes(c) {
        assign.assign(p.node_ids.size(), -1);
        used.assign(t.node_ids.size(), 0);
    }

    // Breadth-first over the pattern from `start`; throws when the pattern is
    // not connected (the visit order would otherwise miss nodes).
    void build_order(int start) {
        order.clear();
        std::vector<char> seen(pattern.node_ids.size(), 0);
        std::vector<int> queue{start};
        seen[start] = 1;
        for (std::size_t head = 0; head < queue.size(); ++head) {
            int v = queue[head];
            order.push_back(v);
            std::set<int> next;
            for (int r : pattern.incident[v]) {
                int other = (pattern.rib_from[r] == v) ? pattern.rib_to[r] : pattern.rib_from[r];
                if (!seen[other]) next.insert(other);
            }
            for (int n : next) {
                seen[n] = 1;
                queue.push_back(n);
            }
        }
        if (order.size() != pattern.node_ids.size()) {
            throw InvariantError("matcher: pattern diagram is not connected");
        }
    }

    bool candidate_feasible(int p, int t) const {
        if (star_exact_node && *star_exact_node == p &&
            pattern.incident[p].size() != target.incident[t].size()) {
            return false;
        }
        if (pattern.incident[p].size() > target.incident[t].size()) return false;
        auto psig = incident_signature(pattern, p);
        auto tsig = incident_signature(target, t);
        for (const auto& [key, need] : psig) {
            auto it = tsig.find(key);
            if (it == tsig.end() || it->second < need) return false;
        }
        return true;
    }

    bool label_compatible(int p, int t, bool& introduced_binding) {
        introduced_binding = false;
        const Label& pl = pattern.labels[p];
        const SymbolName& symbol = target.labels[t].name;
        if (pl.is_symbol()) return pl.name == symbol;
        auto cls = classes.find(pl.name);
        if (cls == classes.end() || !cls->second.count(symbol)) return false;
        auto bound = binding.find(pl.name);
        if (bound != binding.end()) return bound->second == symbol;
        binding.emplace(pl.name, symbol);
        introduced_binding = true;
        return true;
    }

    bool pairs_compatible(int p, int t) const {
        std::set<int> assigned_neighbours;
        for (int r : pattern.incident[p]) {
            int other = (pattern.rib_from[r] == p) ? pattern.rib_to[r] : pattern.rib_from[r];
            if (other != p && assign[other] >= 0) assigned_neighbours.insert(other);
        }
        for (int u : assigned_neighbours) {
            auto need = pair_signature(pattern, p, u);
            auto have = pair_signature(target, t, assign[u]);
            for (const auto& [key, count] : need) {
                auto it = have.find(key);
                if (it == have.end() || it->second < count) return false;
            }
        }
        return true;
    }

    // Places an already vetted candidate and recurses; undoes everything on
    // the way back.
    void place_and_extend(std::size_t depth, int p, int t, bool introduced) {
        assign[p] = t;
        used[t] = 1;
        if (pairs_compatible(p, t)) extend(depth + 1);
        used[t] = 0;
        assign[p] = -1;
        if (introduced) binding.erase(pattern.labels[p].name);
    }

    void extend(std::size_t depth) {
        if (depth == order.size()) {
            emit_rib_maps();
            return;
        }
        int p = order[depth];
        for (int t = 0; t < static_cast<int>(target.node_ids.size()); ++t) {
            if (used[t]) continue;
            if (!candidate_feasible(p, t)) continue;
            bool introduced = false;
            if (!label_compatible(p, t, introduced)) continue;
            place_and_extend(depth, p, t, introduced);
        }
    }

    // All pattern nodes are placed: enumerate injective rib assignments.
    // Candidate sets of distinct (endpoint pair, sort) groups are disjoint,
    // so per-group injective choices compose into injective rib maps.
    void emit_rib_maps() {
        std::map<std::tuple<int, int, SortId>, std::vector<int>> groups;
        for (int r = 0; r < static_cast<int>(pattern.ribs.size()); ++r) {
            int a = pattern.rib_from[r];
            int b = pattern.rib_to[r];
            if (!pattern.directed && b < a) std::swap(a, b);
            groups[{a, b, pattern.ribs[r].sort}].push_back(r);
        }

        std::vector<std::vector<int>> group_ribs;
        std::vector<std::vector<int>> group_candidates;
        for (const auto& [key, pribs] : groups) {
            const auto& [a, b, sort] = key;
            int ta = assign[a];
            int tb = assign[b];
            std::vector<int> candidates;
            for (int r : target.incident[ta]) {
                if (target.ribs[r].sort != sort) continue;
                bool match = target.directed
                                 ? (target.rib_from[r] == ta && target.rib_to[r] == tb)
                                 : ((target.rib_from[r] == ta && target.rib_to[r] == tb) ||
                                    (target.rib_from[r] == tb && target.rib_to[r] == ta));
                if (match) candidates.push_back(r);
            }
            if (candidates.size() < pribs.size()) return;
            group_ribs.push_back(pribs);
            group_candidates.push_back(std::move(candidates));
        }

        std::vector<std::pair<int, int>> rib_choice; // (pattern rib, target rib)
        std::vector<std::vector<char>> taken(group_candidates.size());
        for (std::size_t g = 0; g < group_candidates.size(); ++g) {
            taken[g].assign(group_candidates[g].size(), 0);
        }
        auto assign_group = [&](auto&& self, std::size_t g, std::size_t i) -> void {
            if (g == group_ribs.size()) {
                emit(rib_choice);
                return;
            }
            if (i == group_ribs[g].size()) {
                self(self, g + 1, 0);
                return;
            }
            for (std::size_t c = 0; c < group_candidates[g].size(); ++c) {
                if (taken[g][c]) continue;
                taken[g][c] = 1;
                rib_choice.emplace_back(group_ribs[g][i], group_candidates[g][c]);
                self(self, g, i + 1);
                rib_choice.pop_back();
                taken[g][c] = 0;
            }
        };
        assign_group(assign_group, 0, 0);
    }

    void emit(const std::vector<std::pair<int, int>>& rib_choice) {
        InclusionMapping m;
        for (std::size_t p = 0; p < assign.size(); ++p) {
            m.node_map[pattern.node_ids[p]] = target.node_ids[assign[p]];
        }
        for (const auto& [pr, tr] : rib_choice) {
            m.rib_map[pattern.ribs[pr].id] = target.ribs[tr].id;
        }
        m.binding = binding;
        results.push_back(std::move(m));
    }
};

} // namespace detail

/// Enumerates every inclusion mapping of the pattern into the target,
/// canonically ordered (lexicographic over the node assignments taken in
/// sorted pattern-node order, then over the rib assignments) and free of
/// duplicates. The empty pattern yields exactly one empty mapping.
inline std::vector<InclusionMapping> enumerate_inclusions(const MatchQuery& q) {
    if (!q.pattern || !q.target) {
        throw InvariantError("enumerate_inclusions: query lacks a pattern or target diagram");
    }
    const Diagram& pattern = *q.pattern;
    const Diagram& target = *q.target;
    if (pattern.graph.directed != target.graph.directed) {
        throw InvariantError("enumerate_inclusions: pattern and target directedness differ");
    }
    for (const auto& [node, label] : target.labeling) {
        if (label.is_variable()) {
            throw InvariantError("enumerate_inclusions: target is not ground (node '" + node + "')");
        }
    }
    for (const auto& [node, label] : pattern.labeling) {
        (void)node;
        if (label.is_variable() && !q.classes.count(label.name)) {
            throw InvariantError("enumerate_inclusions: variable '" + label.name + "' has no class");
        }
    }
    if (q.anchor) {
        if (!pattern.graph.nodes.count(q.anchor->first)) {
            throw InvariantError("enumerate_inclusions: unknown anchor pattern node '" +
                                 q.anchor->first + "'");
        }
        if (!target.graph.nodes.count(q.anchor->second)) {
            throw InvariantError("enumerate_inclusions: unknown anchor target node '" +
                                 q.anchor->second + "'");
        }
    }
    if (q.star_exact_at && !pattern.graph.nodes.count(*q.star_exact_at)) {
        throw InvariantError("enumerate_inclusions: unknown star-exact pattern node '" +
                             *q.star_exact_at + "'");
    }

    detail::IndexedDiagram pix = detail::index_diagram(pattern);
    detail::IndexedDiagram tix = detail::index_diagram(target);

    if (pix.node_ids.empty()) return {InclusionMapping{}};

    detail::MatchSearch search(pix, tix, q.classes);
    if (q.star_exact_at) {
        search.star_exact_node = pix.node_index.at(*q.star_exact_at);
    }

    if (q.anchor) {
        int start = pix.node_index.at(q.anchor->first);
        int anchored = tix.node_index.at(q.anchor->second);
        search.build_order(start);
        bool introduced = false;
        if (search.candidate_feasible(start, anchored) &&
            search.label_compatible(start, anchored, introduced)) {
            search.place_and_extend(0, start, anchored, introduced);
        }
    } else {
        search.build_order(0);
        search.extend(0);
    }

    std::vector<InclusionMapping> results = std::move(search.results);
    std::sort(results.begin(), results.end());
    results.erase(std::unique(results.begin(), results.end()), results.end());
    return results;
}

/// Anchored embeddings of a neighbourhood at node v of a ground diagram.
/// Under the exact policy only embeddings whose center star covers the whole
/// star of v survive; under the open policy the star condition is waived.
inline std::vector<InclusionMapping> star_exact_embeddings(const Neighbourhood& n, const Diagram& d,
                                                           const NodeId& v, const ClassMap& classes) {
    if (!n.diagram.graph.nodes.count(n.center)) {
        throw InvariantError("star_exact_embeddings: center '" + n.center +
                             "' is not a node of the neighbourhood");
    }
    if (!d.graph.nodes.count(v)) {
        throw InvariantError("star_exact_embeddings: unknown node '" + v + "'");
    }
    MatchQuery q;
    q.pattern = &n.diagram;
    q.target = &d;
    q.anchor = std::make_pair(n.center, v);
    if (n.star_policy == StarPolicy::exact) q.star_exact_at = n.center;
    q.classes = classes;
    return enumerate_inclusions(q);
}

} // namespace synd
