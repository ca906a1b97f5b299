#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "synd/diagram.hpp"
#include "synd/grammar.hpp"
#include "synd/matcher.hpp"

// The syntax-cover decision procedure. A ground diagram is correct under a
// neighbourhood grammar when it passes every global restriction and every
// node embeds together with some neighbourhood from its symbol's family,
// star-exactly unless the neighbourhood is declared open. Per-node cover
// search is exhaustive and mutually independent, so failure at any node
// proves that no cover exists.

namespace synd {

struct RestrictionViolation {
    std::size_t restriction = 0; // index into the grammar's restriction list
    std::string rule;            // "chain" | "ordered-tree" | "degree"
    std::string message;
    std::vector<NodeId> nodes; // offending nodes, ascending; may be empty

    auto operator<=>(const RestrictionViolation&) const = default;
};

struct WitnessEntry {
    std::size_t neighbourhood = 0; // index into the grammar's neighbourhood list
    InclusionMapping mapping;

    auto operator<=>(const WitnessEntry&) const = default;
};

/// One star-valid embedding per node of the checked diagram.
using CoverWitness = std::map<NodeId, WitnessEntry>;

struct UncoveredNode {
    NodeId node;
    std::size_t tried = 0; // candidate neighbourhoods that all failed

    auto operator<=>(const UncoveredNode&) const = default;
};

struct CheckReport {
    bool correct = false;
    std::vector<RestrictionViolation> restriction_violations;
    std::vector<UncoveredNode> uncovered_nodes;
    std::optional<CoverWitness> witness; // present when every node is covered
    std::optional<std::map<NodeId, std::size_t>> witness_counts; // with witnesses >= 2

    auto operator<=>(const CheckReport&) const = default;
};

struct CheckOptions {
    // Per-node witness enumeration cap. 0 decides correctness only; 1 (the
    // default) records the first witness per node; higher values also count
    // witnesses up to the cap.
    std::size_t witnesses = 1;
};

/// Indices of the neighbourhoods declared for symbol `a`: those whose center
/// is labeled `a` or labeled by a variable whose class contains `a`.
/// Declaration order is preserved.
inline std::vector<std::size_t> family_indices(const NeighbourhoodGrammar& g, const SymbolName& a) {
    if (!g.alphabet.count(a)) {
        throw InvariantError("family_indices: symbol '" + a + "' is not in the alphabet");
    }
    std::vector<std::size_t> family;
    for (std::size_t i = 0; i < g.neighbourhoods.size(); ++i) {
        const Neighbourhood& n = g.neighbourhoods[i];
        auto label = n.diagram.labeling.find(n.center);
        if (label == n.diagram.labeling.end()) continue;
        if (label->second.is_symbol()) {
            if (label->second.name == a) family.push_back(i);
        } else {
            auto cls = g.classes.classes.find(label->second.name);
            if (cls != g.classes.classes.end() && cls->second.count(a)) family.push_back(i);
        }
    }
    return family;
}

inline std::vector<Neighbourhood> family_for_symbol(const NeighbourhoodGrammar& g,
                                                    const SymbolName& a) {
    std::vector<Neighbourhood> family;
    for (std::size_t i : family_indices(g, a)) family.push_back(g.neighbourhoods[i]);
    return family;
}

namespace detail {

struct NodeDegrees {
    std::size_t in = 0;
    std::size_t out = 0;
};

inline std::map<NodeId, NodeDegrees> directed_degrees(const Diagram& d) {
    std::map<NodeId, NodeDegrees> degrees;
    for (const NodeId& v : d.graph.nodes) degrees[v];
    for (const Rib& r : d.graph.ribs) {
        degrees[r.from].out += 1;
        degrees[r.to].in += 1;
    }
    return degrees;
}

inline std::size_t count_matching_ribs(const Diagram& d, const NodeId& v,
                                       const std::optional<SortId>& sort, RibDirection dir) {
    std::size_t n = 0;
    for (const Rib& r : d.graph.ribs) {
        if (sort && r.sort != *sort) continue;
        bool touches = false;
        switch (dir) {
        case RibDirection::out: touches = (r.from == v); break;
        case RibDirection::in: touches = (r.to == v); break;
        case RibDirection::any: touches = (r.from == v || r.to == v); break;
        }
        if (touches) ++n;
    }
    return n;
}

inline void check_chain(const ChainRestriction& c, const Diagram& d, std::size_t index,
                        std::vector<RestrictionViolation>& out) {
    if (d.graph.nodes.size() <= 1) return;
    for (const Rib& r : d.graph.ribs) {
        if (r.sort != c.sort) {
            out.push_back({index, "chain",
                           "rib '" + r.id + "' has sort '" + r.sort + "', expected '" + c.sort + "'",
                           {}});
        }
    }
    auto degrees = directed_degrees(d);
    std::vector<NodeId> heads; // in 1, out 0: the first symbol of the chain
    std::vector<NodeId> tails; // in 0, out 1: the last symbol
    for (const auto& [v, deg] : degrees) {
        if (deg.in == 1 && deg.out == 0) {
            heads.push_back(v);
        } else if (deg.in == 0 && deg.out == 1) {
            tails.push_back(v);
        } else if (!(deg.in == 1 && deg.out == 1)) {
            out.push_back({index, "chain",
                           "node '" + v + "' has in-degree " + std::to_string(deg.in) +
                               " and out-degree " + std::to_string(deg.out),
                           {v}});
        }
    }
    if (heads.size() != 1) {
        out.push_back({index, "chain",
                       "expected exactly one node with in-degree 1 and out-degree 0, found " +
                           std::to_string(heads.size()),
                       heads});
    }
    if (tails.size() != 1) {
        out.push_back({index, "chain",
                       "expected exactly one node with in-degree 0 and out-degree 1, found " +
                           std::to_string(tails.size()),
                       tails});
    }
}

inline void check_ordered_tree(const OrderedTreeRestriction& t, const Diagram& d, std::size_t index,
                               std::vector<RestrictionViolation>& out) {
    if (d.graph.nodes.empty()) return;
    std::vector<NodeId> roots;
    for (const NodeId& v : d.graph.nodes) {
        std::size_t in_parent = count_matching_ribs(d, v, t.parent_sort, RibDirection::in);
        if (in_parent == 0) {
            roots.push_back(v);
        } else if (in_parent > 1) {
            out.push_back({index, "ordered-tree",
                           "node '" + v + "' has " + std::to_string(in_parent) +
                               " incoming '" + t.parent_sort + "' ribs",
                           {v}});
        }
        std::size_t in_sibling = count_matching_ribs(d, v, t.sibling_sort, RibDirection::in);
        std::size_t out_sibling = count_matching_ribs(d, v, t.sibling_sort, RibDirection::out);
        if (in_sibling > 1) {
            out.push_back({index, "ordered-tree",
                           "node '" + v + "' has " + std::to_string(in_sibling) +
                               " incoming '" + t.sibling_sort + "' ribs",
                           {v}});
        }
        if (out_sibling > 1) {
            out.push_back({index, "ordered-tree",
                           "node '" + v + "' has " + std::to_string(out_sibling) +
                               " outgoing '" + t.sibling_sort + "' ribs",
                           {v}});
        }
        auto label = d.labeling.find(v);
        if (label != d.labeling.end() && label->second.is_symbol() &&
            t.terminal_symbols.count(label->second.name)) {
            std::size_t out_parent = count_matching_ribs(d, v, t.parent_sort, RibDirection::out);
            std::size_t out_total = count_matching_ribs(d, v, std::nullopt, RibDirection::out);
            if (out_parent > 0) {
                out.push_back({index, "ordered-tree",
                               "terminal node '" + v + "' has outgoing '" + t.parent_sort + "' ribs",
                               {v}});
            }
            if (out_total > 1) {
                out.push_back({index, "ordered-tree",
                               "terminal node '" + v + "' has " + std::to_string(out_total) +
                                   " outgoing ribs",
                               {v}});
            } else if (out_total == 1 && out_sibling != 1) {
                out.push_back({index, "ordered-tree",
                               "terminal node '" + v + "' has an outgoing rib that is not of sort '" +
                                   t.sibling_sort + "'",
                               {v}});
            }
        }
    }
    if (roots.size() != 1) {
        out.push_back({index, "ordered-tree",
                       "expected exactly one node without incoming '" + t.parent_sort +
                           "' ribs, found " + std::to_string(roots.size()),
                       roots});
    }
}

inline void check_degree(const DegreeRestriction& deg, const Diagram& d, std::size_t index,
                         std::vector<RestrictionViolation>& out) {
    for (const NodeId& v : d.graph.nodes) {
        if (deg.symbols) {
            auto label = d.labeling.find(v);
            if (label == d.labeling.end() || !label->second.is_symbol() ||
                !deg.symbols->count(label->second.name)) {
                continue;
            }
        }
        std::size_t n = count_matching_ribs(d, v, deg.sort, deg.direction);
        if (n < deg.min || (deg.max && n > *deg.max)) {
            std::string bound = deg.max ? std::to_string(*deg.max) : "unbounded";
            out.push_back({index, "degree",
                           "node '" + v + "' has " + std::to_string(n) +
                               " matching ribs, expected between " + std::to_string(deg.min) +
                               " and " + bound,
                           {v}});
        }
    }
}

} // namespace detail

/// Evaluates every restriction of the grammar against the diagram. The empty
/// diagram satisfies all restrictions vacuously.
inline std::vector<RestrictionViolation> check_restrictions(const NeighbourhoodGrammar& g,
                                                            const Diagram& d) {
    std::vector<RestrictionViolation> out;
    if (d.graph.nodes.empty()) return out;
    for (std::size_t i = 0; i < g.restrictions.size(); ++i) {
        const Restriction& r = g.restrictions[i];
        if (const auto* chain = std::get_if<ChainRestriction>(&r)) {
            detail::check_chain(*chain, d, i, out);
        } else if (const auto* tree = std::get_if<OrderedTreeRestriction>(&r)) {
            detail::check_ordered_tree(*tree, d, i, out);
        } else if (const auto* deg = std::get_if<DegreeRestriction>(&r)) {
            detail::check_degree(*deg, d, i, out);
        }
    }
    return out;
}

/// First star-valid embedding covering node v, searched in family order and
/// then in the matcher's canonical embedding order; nullopt when no
/// neighbourhood of the node's symbol embeds.
inline std::optional<WitnessEntry> covers_node(const NeighbourhoodGrammar& g, const Diagram& d,
                                               const NodeId& v) {
    auto label = d.labeling.find(v);
    if (label == d.labeling.end()) throw InvariantError("covers_node: unknown node '" + v + "'");
    if (label->second.is_variable()) {
        throw InvariantError("covers_node: node '" + v + "' has a variable label");
    }
    for (std::size_t i : family_indices(g, label->second.name)) {
        auto embeddings = star_exact_embeddings(g.neighbourhoods[i], d, v, g.classes.classes);
        if (!embeddings.empty()) return WitnessEntry{i, embeddings.front()};
    }
    return std::nullopt;
}

/// Decides whether the diagram is correct under the grammar: restrictions
/// first, then an exhaustive per-node cover search. The diagram must be valid
/// and ground, use declared symbols and sorts only, and share the grammar's
/// directedness; anything else is an error, not incorrectness.
inline CheckReport check(const NeighbourhoodGrammar& g, const Diagram& d,
                         const CheckOptions& options = {}) {
    ValidationReport dv = validate_diagram(d);
    if (!dv.ok()) {
        throw InvariantError("check: diagram is invalid: " + dv.violations.front().message);
    }
    if (!is_ground(d)) throw InvariantError("check: diagram is not ground");
    if (d.graph.directed != g.directed) {
        throw InvariantError("check: diagram directedness differs from the grammar's");
    }
    for (const SymbolName& s : d.alphabet) {
        if (!g.alphabet.count(s)) {
            throw InvariantError("check: diagram symbol '" + s + "' is not in the grammar alphabet");
        }
    }
    for (const SortId& s : d.graph.sorts) {
        if (!g.sorts.count(s)) {
            throw InvariantError("check: diagram sort '" + s + "' is not declared by the grammar");
        }
    }

    CheckReport report;
    report.restriction_violations = check_restrictions(g, d);

    CoverWitness witness;
    std::map<NodeId, std::size_t> counts;
    for (const NodeId& v : d.graph.nodes) {
        const SymbolName& symbol = d.labeling.at(v).name;
        std::vector<std::size_t> family = family_indices(g, symbol);
        std::optional<WitnessEntry> first;
        std::size_t found = 0;
        for (std::size_t i : family) {
            auto embeddings = star_exact_embeddings(g.neighbourhoods[i], d, v, g.classes.classes);
            if (embeddings.empty()) continue;
            if (!first) first = WitnessEntry{i, embeddings.front()};
            found += embeddings.size();
            if (options.witnesses <= 1 || found >= options.witnesses) break;
        }
        if (!first) {
            report.uncovered_nodes.push_back({v, family.size()});
        } else if (options.witnesses >= 1) {
            witness.emplace(v, std::move(*first));
            if (options.witnesses >= 2) counts[v] = std::min(found, options.witnesses);
        }
    }

    report.correct = report.restriction_violations.empty() && report.uncovered_nodes.empty();
    if (options.witnesses >= 1 && report.uncovered_nodes.empty()) {
        report.witness = std::move(witness);
        if (options.witnesses >= 2) report.witness_counts = std::move(counts);
    }
    return report;
}

} // namespace synd
