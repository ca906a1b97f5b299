#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "synd/diagram.hpp"
#include "synd/grammar.hpp"

// Compiles a chemical valency table into a neighbourhood grammar over
// structural formulas: undirected diagrams, one sort "bond", nodes labeled by
// element symbols, parallel ribs for multiple bonds. Star exactness makes
// each node's total bond multiplicity equal its element's valency.

namespace synd {

inline const SortId kBondSort = "bond";

struct ValencyTable {
    std::map<SymbolName, unsigned> valencies; // element -> valency, >= 1
    unsigned max_bond_multiplicity = 3;

    auto operator<=>(const ValencyTable&) const = default;
};

namespace detail {

// Partitions of n into parts <= max_part, largest part first, enumerated in
// descending lexicographic order.
inline std::vector<std::vector<unsigned>> bond_partitions(unsigned n, unsigned max_part) {
    std::vector<std::vector<unsigned>> out;
    std::vector<unsigned> current;
    auto recurse = [&](auto&& self, unsigned remaining, unsigned cap) -> void {
        if (remaining == 0) {
            out.push_back(current);
            return;
        }
        for (unsigned part = std::min(remaining, cap); part >= 1; --part) {
            current.push_back(part);
            self(self, remaining - part, part);
            current.pop_back();
        }
    };
    recurse(recurse, n, max_part);
    return out;
}

} // namespace detail

/// One class variable per occurring valency ("E1", "E2", ...) and, per
/// valency, one neighbourhood per multiset of bond multiplicities summing to
/// it. Neighbour endpoints are labeled by fresh wildcard variables (class =
/// whole alphabet) so that endpoint choices stay independent even under
/// consistent per-pattern binding.
inline NeighbourhoodGrammar compile_valency(const ValencyTable& table) {
    if (table.max_bond_multiplicity < 1) {
        throw InvariantError("compile_valency: max bond multiplicity must be at least 1");
    }
    NeighbourhoodGrammar g;
    g.directed = false;
    g.sorts = {kBondSort};

    std::map<unsigned, std::set<SymbolName>> by_valency;
    for (const auto& [element, valency] : table.valencies) {
        if (element.empty()) throw InvariantError("compile_valency: empty element name");
        if (valency < 1) {
            throw InvariantError("compile_valency: element '" + element + "' has valency 0");
        }
        g.alphabet.insert(element);
        by_valency[valency].insert(element);
    }

    for (const auto& [valency, elements] : by_valency) {
        VariableName class_var = "E" + std::to_string(valency);
        if (g.alphabet.count(class_var)) {
            throw InvariantError("compile_valency: element name '" + class_var +
                                 "' collides with a class variable");
        }
        g.classes.classes.emplace(class_var, elements);
    }

    std::size_t ordinal = 0;
    for (const auto& [valency, elements] : by_valency) {
        (void)elements;
        const VariableName class_var = "E" + std::to_string(valency);
        for (const auto& partition : detail::bond_partitions(valency, table.max_bond_multiplicity)) {
            const std::string prefix = "n" + std::to_string(ordinal) + ":";
            Neighbourhood n;
            n.diagram.alphabet = g.alphabet;
            n.diagram.graph.directed = false;
            n.diagram.graph.sorts = {kBondSort};
            n.center = prefix + "c";
            n.diagram.graph.nodes.insert(n.center);
            n.diagram.labeling.emplace(n.center, Label::variable(class_var));
            for (std::size_t j = 0; j < partition.size(); ++j) {
                VariableName wildcard = "W" + std::to_string(ordinal) + "_" + std::to_string(j);
                if (g.alphabet.count(wildcard)) {
                    throw InvariantError("compile_valency: element name '" + wildcard +
                                         "' collides with a wildcard variable");
                }
                g.classes.classes.emplace(wildcard, g.alphabet);
                NodeId neighbour = prefix + "b" + std::to_string(j);
                n.diagram.graph.nodes.insert(neighbour);
                n.diagram.labeling.emplace(neighbour, Label::variable(wildcard));
                for (unsigned k = 0; k < partition[j]; ++k) {
                    n.diagram.graph.ribs.push_back(
                        make_rib(false, prefix + "r" + std::to_string(j) + "x" + std::to_string(k),
                                 n.center, neighbour, kBondSort));
                }
            }
            n.diagram.graph.normalize();
            g.neighbourhoods.push_back(std::move(n));
            ++ordinal;
        }
    }

    ValidationReport report = validate_grammar(g);
    if (!report.ok()) {
        throw InvariantError("compile_valency: " + report.violations.front().message);
    }
    return g;
}

} // namespace synd
