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

// Neighbourhood grammars. A grammar pairs a global filter (restrictions on
// the multigraph shape) with local legality: per-symbol families of
// neighbourhoods, small diagrams with a distinguished center whose star must
// be matched exactly when the neighbourhood is embedded at a node.

namespace synd {

enum class StarPolicy {
    exact, // the embedded center star must equal the whole star of the covered node
    open,  // the star condition is waived; a plain anchored embedding suffices
};

/// A neighbourhood: a non-empty diagram (labels may be variables) with a
/// distinguished center node. Exact is the default policy; open exists only
/// for generator-declared exemptions.
struct Neighbourhood {
    Diagram diagram;
    NodeId center;
    StarPolicy star_policy = StarPolicy::exact;

    auto operator<=>(const Neighbourhood&) const = default;
};

/// Maps each variable to the non-empty set of symbols it may stand for.
/// A class equal to the entire alphabet is a wildcard class and serializes
/// as "*".
struct VariableClassTable {
    ClassMap classes;

    auto operator<=>(const VariableClassTable&) const = default;
};

enum class RibDirection { in, out, any };

/// The diagram must be a single directed chain over one sort: one node with
/// (in, out) = (1, 0), one with (0, 1), every other node (1, 1).
struct ChainRestriction {
    SortId sort;

    auto operator<=>(const ChainRestriction&) const = default;
};

/// The diagram must be an ordered tree: exactly one node without an incoming
/// parent rib and exactly one incoming parent rib everywhere else; terminals
/// have no children and at most one outgoing rib, a sibling rib; sibling ribs
/// form at most one incoming and one outgoing per node.
struct OrderedTreeRestriction {
    SortId parent_sort;
    SortId sibling_sort;
    std::set<SymbolName> terminal_symbols;

    auto operator<=>(const OrderedTreeRestriction&) const = default;
};

/// Bounds the number of matching ribs at every node passing the symbol
/// filter. Empty optionals mean "any".
struct DegreeRestriction {
    std::optional<std::set<SymbolName>> symbols;
    std::optional<SortId> sort;
    RibDirection direction = RibDirection::any;
    std::size_t min = 0;
    std::optional<std::size_t> max; // absent: unbounded

    auto operator<=>(const DegreeRestriction&) const = default;
};

using Restriction = std::variant<ChainRestriction, OrderedTreeRestriction, DegreeRestriction>;

struct NeighbourhoodGrammar {
    bool directed = false;
    std::set<SymbolName> alphabet;
    std::set<SortId> sorts;
    VariableClassTable classes;
    std::vector<Neighbourhood> neighbourhoods;
    std::vector<Restriction> restrictions;

    auto operator<=>(const NeighbourhoodGrammar&) const = default;
};

/// Checks every grammar invariant: declared vocabularies, class integrity,
/// and per-neighbourhood diagram validity.
inline ValidationReport validate_grammar(const NeighbourhoodGrammar& g) {
    ValidationReport report;
    auto add = [&](std::string rule, std::string subject, std::string message) {
        report.violations.push_back({std::move(rule), std::move(subject), std::move(message)});
    };

    for (const SymbolName& s : g.alphabet) {
        if (s.empty()) add("empty-symbol", s, "alphabet contains an empty symbol name");
    }
    for (const SortId& s : g.sorts) {
        if (s.empty()) add("empty-sort", s, "sort set contains an empty name");
    }

    for (const auto& [name, members] : g.classes.classes) {
        if (name.empty()) add("empty-variable-name", name, "variable with empty name");
        if (g.alphabet.count(name)) {
            add("variable-shadows-symbol", name,
                "variable '" + name + "' is also an alphabet symbol");
        }
        if (members.empty()) {
            add("empty-class", name, "variable '" + name + "' has an empty class");
        }
        for (const SymbolName& s : members) {
            if (!g.alphabet.count(s)) {
                add("class-symbol-undeclared", name,
                    "class of '" + name + "' contains undeclared symbol '" + s + "'");
            }
        }
    }

    for (std::size_t i = 0; i < g.neighbourhoods.size(); ++i) {
        const Neighbourhood& n = g.neighbourhoods[i];
        const std::string subject = "neighbourhood " + std::to_string(i);

        if (n.diagram.graph.nodes.empty()) {
            add("empty-neighbourhood", subject, subject + " has no nodes");
            continue;
        }
        if (!n.diagram.graph.nodes.count(n.center)) {
            add("center-missing", subject,
                subject + " center '" + n.center + "' is not one of its nodes");
        }
        if (n.diagram.graph.directed != g.directed) {
            add("directedness-mismatch", subject,
                subject + " directedness differs from the grammar's");
        }
        for (const SymbolName& s : n.diagram.alphabet) {
            if (!g.alphabet.count(s)) {
                add("neighbourhood-alphabet-undeclared", subject,
                    subject + " uses undeclared symbol '" + s + "'");
            }
        }
        for (const SortId& s : n.diagram.graph.sorts) {
            if (!g.sorts.count(s)) {
                add("neighbourhood-sort-undeclared", subject,
                    subject + " uses undeclared sort '" + s + "'");
            }
        }
        for (const auto& [node, label] : n.diagram.labeling) {
            if (label.is_variable() && !g.classes.classes.count(label.name)) {
                add("undeclared-variable", subject,
                    subject + " node '" + node + "' uses undeclared variable '" + label.name + "'");
            }
        }
        for (Violation v : validate_diagram(n.diagram).violations) {
            v.subject = subject + ": " + v.subject;
            report.violations.push_back(std::move(v));
        }
    }

    for (std::size_t i = 0; i < g.restrictions.size(); ++i) {
        const std::string subject = "restriction " + std::to_string(i);
        const Restriction& r = g.restrictions[i];
        auto require_sort = [&](const SortId& s) {
            if (!g.sorts.count(s)) {
                add("restriction-sort-undeclared", subject,
                    subject + " references undeclared sort '" + s + "'");
            }
        };
        auto require_directed = [&](const char* what) {
            if (!g.directed) {
                add("restriction-requires-directed", subject,
                    subject + std::string(": ") + what + " applies to directed grammars only");
            }
        };
        if (const auto* chain = std::get_if<ChainRestriction>(&r)) {
            require_sort(chain->sort);
            require_directed("chain");
        } else if (const auto* tree = std::get_if<OrderedTreeRestriction>(&r)) {
            require_sort(tree->parent_sort);
            require_sort(tree->sibling_sort);
            require_directed("ordered-tree");
            for (const SymbolName& s : tree->terminal_symbols) {
                if (!g.alphabet.count(s)) {
                    add("restriction-symbol-undeclared", subject,
                        subject + " references undeclared symbol '" + s + "'");
                }
            }
        } else if (const auto* deg = std::get_if<DegreeRestriction>(&r)) {
            if (deg->sort) require_sort(*deg->sort);
            if (deg->symbols) {
                for (const SymbolName& s : *deg->symbols) {
                    if (!g.alphabet.count(s)) {
                        add("restriction-symbol-undeclared", subject,
                            subject + " references undeclared symbol '" + s + "'");
                    }
                }
            }
            if (deg->direction != RibDirection::any) require_directed("degree in/out");
            if (deg->max && *deg->max < deg->min) {
                add("degree-bounds", subject, subject + " has max below min");
            }
        }
    }

    return report;
}

} // namespace synd
