#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <vector>

#include "synd/diagram.hpp"
#include "synd/grammar.hpp"

// Compiles per-symbol string neighbourhoods into a neighbourhood grammar over
// chain diagrams. A chain of symbols is encoded as a directed diagram with
// one rib per adjacent pair, running from each symbol's node to its
// predecessor's node, all of the single sort "next".

namespace synd {

inline const SortId kChainSort = "next";

/// One string context: a token sequence with a marked center. Tokens are
/// alphabet symbols, except that the first and last token may be the boundary
/// marker "#" standing for "nothing continues here".
struct StringNeighbourhood {
    std::vector<std::string> tokens;
    std::size_t center = 0; // index into tokens

    auto operator<=>(const StringNeighbourhood&) const = default;
};

struct StringGrammarSpec {
    std::set<SymbolName> alphabet;
    std::vector<StringNeighbourhood> neighbourhoods;

    auto operator<=>(const StringGrammarSpec&) const = default;
};

/// Encodes a chain of symbols as a diagram: nodes p0..p(n-1), ribs r0..r(n-2)
/// with rib rj running from p(j+1) to pj.
inline Diagram chain_to_diagram(const std::vector<SymbolName>& symbols,
                                const std::set<SymbolName>& alphabet) {
    if (symbols.empty()) throw InvariantError("chain_to_diagram: empty chain");
    Diagram d;
    d.alphabet = alphabet;
    d.graph.directed = true;
    d.graph.sorts = {kChainSort};
    for (std::size_t i = 0; i < symbols.size(); ++i) {
        if (!alphabet.count(symbols[i])) {
            throw InvariantError("chain_to_diagram: unknown symbol '" + symbols[i] + "'");
        }
        NodeId id = "p" + std::to_string(i);
        d.graph.nodes.insert(id);
        d.labeling.emplace(id, Label::symbol(symbols[i]));
        if (i > 0) {
            d.graph.ribs.push_back(make_rib(true, "r" + std::to_string(i - 1), id,
                                            "p" + std::to_string(i - 1), kChainSort));
        }
    }
    d.graph.normalize();
    return d;
}

/// Compiles a string-neighbourhood spec. Every context must spell out both
/// sides of its center, either with symbols or with a terminating "#": star
/// exactness reads an unspecified side as a forbidden one, so partial
/// contexts are rejected instead of silently changing the language.
inline NeighbourhoodGrammar compile_string_grammar(const StringGrammarSpec& spec) {
    NeighbourhoodGrammar g;
    g.directed = true;
    g.alphabet = spec.alphabet;
    g.sorts = {kChainSort};
    g.restrictions.push_back(ChainRestriction{kChainSort});

    for (std::size_t i = 0; i < spec.neighbourhoods.size(); ++i) {
        const StringNeighbourhood& sn = spec.neighbourhoods[i];
        const std::string where = "string neighbourhood " + std::to_string(i);
        if (sn.tokens.empty()) throw InvariantError(where + ": empty neighbourhood");
        if (sn.center >= sn.tokens.size()) throw InvariantError(where + ": center out of range");
        if (sn.tokens[sn.center] == "#") throw InvariantError(where + ": center on '#'");
        for (std::size_t j = 0; j < sn.tokens.size(); ++j) {
            const std::string& token = sn.tokens[j];
            if (token == "#") {
                if (j != 0 && j + 1 != sn.tokens.size()) {
                    throw InvariantError(where + ": '#' may only terminate the context");
                }
            } else if (!spec.alphabet.count(token)) {
                throw InvariantError(where + ": unknown symbol '" + token + "'");
            }
        }
        if (sn.center == 0) {
            throw InvariantError(where + ": left context unspecified (expected a symbol or '#')");
        }
        if (sn.center + 1 == sn.tokens.size()) {
            throw InvariantError(where + ": right context unspecified (expected a symbol or '#')");
        }

        // the '#' markers carry no node; star exactness at the center is what
        // enforces the boundary they announce
        std::vector<SymbolName> kept;
        std::size_t center_position = sn.center;
        for (std::size_t j = 0; j < sn.tokens.size(); ++j) {
            if (sn.tokens[j] == "#") {
                if (j < sn.center) --center_position;
                continue;
            }
            kept.push_back(sn.tokens[j]);
        }

        const std::string prefix = "n" + std::to_string(i) + ":";
        Neighbourhood n;
        n.diagram.alphabet = spec.alphabet;
        n.diagram.graph.directed = true;
        n.diagram.graph.sorts = {kChainSort};
        for (std::size_t j = 0; j < kept.size(); ++j) {
            NodeId id = prefix + "p" + std::to_string(j);
            n.diagram.graph.nodes.insert(id);
            n.diagram.labeling.emplace(id, Label::symbol(kept[j]));
            if (j > 0) {
                n.diagram.graph.ribs.push_back(make_rib(true, prefix + "r" + std::to_string(j - 1),
                                                        id, prefix + "p" + std::to_string(j - 1),
                                                        kChainSort));
            }
        }
        n.diagram.graph.normalize();
        n.center = prefix + "p" + std::to_string(center_position);
        n.star_policy = StarPolicy::exact;
        g.neighbourhoods.push_back(std::move(n));
    }

    ValidationReport report = validate_grammar(g);
    if (!report.ok()) {
        throw InvariantError("compile_string_grammar: " + report.violations.front().message);
    }
    return g;
}

} // namespace synd
