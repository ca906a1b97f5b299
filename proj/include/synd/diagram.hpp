#pragma once

#include <algorithm>
#include <compare>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "synd/errors.hpp"

// Many-sorted multigraphs and syntax diagrams.
//
// A syntax diagram is a connected multigraph whose nodes carry labels drawn
// from a finite alphabet (or from a variable vocabulary disjoint from it) and
// whose ribs carry sorts. Ribs have identities of their own, so parallel ribs
// between the same endpoint pair coexist and can be mapped injectively.
// Loops are never valid.
//
// All types here are plain values, immutable by convention after
// construction; every operation is a pure function.

namespace synd {

using NodeId = std::string;
using RibId = std::string;
using SortId = std::string;
using SymbolName = std::string;
using VariableName = std::string;

/// Variable classes: which alphabet symbols a variable may stand for.
using ClassMap = std::map<VariableName, std::set<SymbolName>>;

/// A node label: an alphabet symbol or a variable standing for a class of
/// symbols. Variable names never collide with symbol names.
struct Label {
    enum class Kind { symbol, variable };

    Kind kind = Kind::symbol;
    std::string name;

    static Label symbol(std::string n) { return {Kind::symbol, std::move(n)}; }
    static Label variable(std::string n) { return {Kind::variable, std::move(n)}; }

    bool is_symbol() const { return kind == Kind::symbol; }
    bool is_variable() const { return kind == Kind::variable; }

    auto operator<=>(const Label&) const = default;
};

/// An identity-bearing edge. Undirected ribs are stored with endpoints in
/// lexicographic order (see make_rib).
struct Rib {
    RibId id;
    NodeId from;
    NodeId to;
    SortId sort;

    auto operator<=>(const Rib&) const = default;
};

/// Builds a rib, canonicalizing the endpoint order of undirected ribs.
inline Rib make_rib(bool directed, RibId id, NodeId from, NodeId to, SortId sort) {
    if (!directed && to < from) std::swap(from, to);
    return Rib{std::move(id), std::move(from), std::move(to), std::move(sort)};
}

struct Multigraph {
    bool directed = false;
    std::set<NodeId> nodes;
    std::vector<Rib> ribs; // kept sorted by id; see normalize()
    std::set<SortId> sorts;

    auto operator<=>(const Multigraph&) const = default;

    /// Restores the sorted-by-id rib order every construction path must end
    /// with. Duplicate ids survive so validation can report them.
    void normalize() {
        std::sort(ribs.begin(), ribs.end(),
                  [](const Rib& a, const Rib& b) { return a.id < b.id; });
    }
};

/// A syntax diagram: a multigraph plus a total labeling of its nodes.
/// Valid diagrams are connected (or empty) and label symbols only from
/// their alphabet; validate_diagram reports any deviation.
struct Diagram {
    std::set<SymbolName> alphabet;
    Multigraph graph;
    std::map<NodeId, Label> labeling;

    auto operator<=>(const Diagram&) const = default;
};

struct Violation {
    std::string rule;    // stable identifier of the broken invariant
    std::string subject; // offending node/rib/name
    std::string message;

    auto operator<=>(const Violation&) const = default;
};

struct ValidationReport {
    std::vector<Violation> violations;

    bool ok() const { return violations.empty(); }
};

/// True when every pair of nodes is joined by a path; rib orientation and
/// sorts are ignored. Empty and single-node graphs count as connected.
inline bool is_connected(const Multigraph& g) {
    if (g.nodes.size() <= 1) return true;

    std::map<NodeId, std::vector<const Rib*>> adjacency;
    for (const Rib& r : g.ribs) {
        if (!g.nodes.count(r.from) || !g.nodes.count(r.to)) continue; // broken rib, skip
        adjacency[r.from].push_back(&r);
        adjacency[r.to].push_back(&r);
    }

    std::set<NodeId> seen;
    std::queue<NodeId> frontier;
    frontier.push(*g.nodes.begin());
    seen.insert(*g.nodes.begin());
    while (!frontier.empty()) {
        NodeId v = frontier.front();
        frontier.pop();
        for (const Rib* r : adjacency[v]) {
            const NodeId& other = (r->from == v) ? r->to : r->from;
            if (seen.insert(other).second) frontier.push(other);
        }
    }
    return seen.size() == g.nodes.size();
}

/// The star of a diagram in a node: all ribs incident to it, incoming and
/// outgoing alike.
inline std::set<RibId> star(const Diagram& d, const NodeId& v) {
    if (!d.graph.nodes.count(v)) throw InvariantError("star: unknown node '" + v + "'");
    std::set<RibId> out;
    for (const Rib& r : d.graph.ribs) {
        if (r.from == v || r.to == v) out.insert(r.id);
    }
    return out;
}

inline std::size_t degree(const Multigraph& g, const NodeId& v) {
    std::size_t n = 0;
    for (const Rib& r : g.ribs) {
        if (r.from == v || r.to == v) ++n;
    }
    return n;
}

/// Ribs joining v1 and v2, optionally restricted to one sort. In directed
/// graphs only ribs running v1 -> v2 match; in undirected graphs the
/// endpoint pair is compared as a set.
inline std::set<RibId> ribs_between(const Multigraph& g, const NodeId& v1, const NodeId& v2,
                                    const std::optional<SortId>& sort = {}) {
    if (!g.nodes.count(v1)) throw InvariantError("ribs_between: unknown node '" + v1 + "'");
    if (!g.nodes.count(v2)) throw InvariantError("ribs_between: unknown node '" + v2 + "'");
    std::set<RibId> out;
    for (const Rib& r : g.ribs) {
        bool endpoints_match = g.directed
                                   ? (r.from == v1 && r.to == v2)
                                   : ((r.from == v1 && r.to == v2) || (r.from == v2 && r.to == v1));
        if (!endpoints_match) continue;
        if (sort && r.sort != *sort) continue;
        out.insert(r.id);
    }
    return out;
}

inline bool is_ground(const Diagram& d) {
    for (const auto& [node, label] : d.labeling) {
        (void)node;
        if (label.is_variable()) return false;
    }
    return true;
}

/// Checks every structural invariant of a diagram and reports each breach.
/// Violations are data, not failures: invalid diagrams are representable so
/// that files and hand-built values can be diagnosed.
inline ValidationReport validate_diagram(const Diagram& d) {
    ValidationReport report;
    auto add = [&](std::string rule, std::string subject, std::string message) {
        report.violations.push_back({std::move(rule), std::move(subject), std::move(message)});
    };

    for (const SymbolName& s : d.alphabet) {
        if (s.empty()) add("empty-symbol", s, "alphabet contains an empty symbol name");
    }
    for (const SortId& s : d.graph.sorts) {
        if (s.empty()) add("empty-sort", s, "sort set contains an empty name");
    }

    for (const NodeId& v : d.graph.nodes) {
        if (v.empty()) {
            add("empty-node-id", v, "node with empty id");
            continue;
        }
        auto it = d.labeling.find(v);
        if (it == d.labeling.end()) {
            add("label-missing", v, "node '" + v + "' has no label");
            continue;
        }
        const Label& label = it->second;
        if (label.name.empty()) {
            add("empty-label", v, "node '" + v + "' has an empty label");
        } else if (label.is_symbol() && !d.alphabet.count(label.name)) {
            add("symbol-not-in-alphabet", v,
                "node '" + v + "' is labeled '" + label.name + "', which is not in the alphabet");
        } else if (label.is_variable() && d.alphabet.count(label.name)) {
            add("variable-shadows-symbol", v,
                "node '" + v + "' uses variable '" + label.name + "', which is also an alphabet symbol");
        }
    }
    for (const auto& [v, label] : d.labeling) {
        (void)label;
        if (!d.graph.nodes.count(v)) {
            add("label-unknown-node", v, "labeling mentions unknown node '" + v + "'");
        }
    }

    std::vector<const Rib*> ribs;
    ribs.reserve(d.graph.ribs.size());
    for (const Rib& r : d.graph.ribs) ribs.push_back(&r);
    std::sort(ribs.begin(), ribs.end(), [](const Rib* a, const Rib* b) { return a->id < b->id; });

    const Rib* previous = nullptr;
    for (const Rib* r : ribs) {
        if (r->id.empty()) add("empty-rib-id", r->id, "rib with empty id");
        if (previous && previous->id == r->id && !r->id.empty()) {
            add("duplicate-rib-id", r->id, "rib id '" + r->id + "' occurs more than once");
        }
        previous = r;
        bool endpoints_ok = true;
        if (!d.graph.nodes.count(r->from)) {
            add("rib-endpoint-missing", r->id,
                "rib '" + r->id + "' starts at unknown node '" + r->from + "'");
            endpoints_ok = false;
        }
        if (!d.graph.nodes.count(r->to)) {
            add("rib-endpoint-missing", r->id,
                "rib '" + r->id + "' ends at unknown node '" + r->to + "'");
            endpoints_ok = false;
        }
        if (endpoints_ok && r->from == r->to) {
            add("loop-forbidden", r->id, "rib '" + r->id + "' connects node '" + r->from + "' to itself");
        }
        if (!d.graph.sorts.count(r->sort)) {
            add("undeclared-sort", r->id, "rib '" + r->id + "' has undeclared sort '" + r->sort + "'");
        }
    }

    if (!d.graph.nodes.empty() && !is_connected(d.graph)) {
        add("not-connected", "", "diagram is not connected");
    }

    return report;
}

} // namespace synd
