#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "synd/diagram.hpp"
#include "synd/grammar.hpp"

// Compiles a context-free grammar into a neighbourhood grammar over
// derivation-tree diagrams. Trees use two sorts: S_P ribs run from a parent
// node to each child, S_L ribs run from each node to its immediately
// preceding sibling. The grammar certifies complete derivation trees rooted
// at the start symbol; it does not parse strings.

namespace synd {

inline const SortId kParentSort = "S_P";
inline const SortId kSiblingSort = "S_L";

struct CfgRule {
    SymbolName lhs;
    std::vector<SymbolName> rhs; // never empty

    auto operator<=>(const CfgRule&) const = default;
};

struct Cfg {
    std::set<SymbolName> nonterminals;
    std::set<SymbolName> terminals;
    std::vector<CfgRule> rules;
    SymbolName start;

    auto operator<=>(const Cfg&) const = default;
};

/// Parses rule text, one `LHS -> X1 X2 ... Xn` per line, `#` comments.
/// Nonterminals are the left-hand-side symbols, terminals everything else;
/// the first rule's left-hand side is the start symbol.
inline Cfg parse_cfg(const std::string& text) {
    Cfg g;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream tokens(line);
        std::vector<std::string> parts;
        for (std::string token; tokens >> token;) parts.push_back(token);
        if (parts.empty()) continue;
        if (parts.size() < 2 || parts[1] != "->") {
            throw ParseError("line " + std::to_string(line_no) + ": expected 'LHS -> X1 X2 ...'");
        }
        if (parts[0] == "->") {
            throw ParseError("line " + std::to_string(line_no) + ": missing left-hand side");
        }
        if (parts.size() == 2) {
            throw ParseError("line " + std::to_string(line_no) +
                             ": empty right-hand side (no empty productions)");
        }
        CfgRule rule;
        rule.lhs = parts[0];
        for (std::size_t i = 2; i < parts.size(); ++i) {
            if (parts[i] == "->") {
                throw ParseError("line " + std::to_string(line_no) + ": '->' used as a symbol");
            }
            rule.rhs.push_back(parts[i]);
        }
        if (g.rules.empty()) g.start = rule.lhs;
        g.nonterminals.insert(rule.lhs);
        g.rules.push_back(std::move(rule));
    }
    if (g.rules.empty()) throw ParseError("no rules");
    for (const CfgRule& rule : g.rules) {
        for (const SymbolName& s : rule.rhs) {
            if (!g.nonterminals.count(s)) g.terminals.insert(s);
        }
    }
    return g;
}

namespace detail {

// A one-level bush for a rule: the parent node plus its ordered children.
struct BushIds {
    NodeId top;
    std::vector<NodeId> children;
};

inline BushIds add_bush(Diagram& d, const CfgRule& rule, const std::string& prefix) {
    BushIds ids;
    ids.top = prefix + "top";
    d.graph.nodes.insert(ids.top);
    d.labeling.emplace(ids.top, Label::symbol(rule.lhs));
    for (std::size_t k = 0; k < rule.rhs.size(); ++k) {
        NodeId child = prefix + "c" + std::to_string(k);
        d.graph.nodes.insert(child);
        d.labeling.emplace(child, Label::symbol(rule.rhs[k]));
        d.graph.ribs.push_back(
            make_rib(true, prefix + "p" + std::to_string(k), ids.top, child, kParentSort));
        if (k > 0) {
            d.graph.ribs.push_back(make_rib(true, prefix + "l" + std::to_string(k), child,
                                            ids.children.back(), kSiblingSort));
        }
        ids.children.push_back(std::move(child));
    }
    return ids;
}

// Expands one child of an existing bush by a second rule (grandchildren get
// their own id namespace under the same prefix).
inline void expand_child(Diagram& d, const NodeId& child, const CfgRule& rule,
                         const std::string& prefix) {
    NodeId previous;
    for (std::size_t j = 0; j < rule.rhs.size(); ++j) {
        NodeId grandchild = prefix + "g" + std::to_string(j);
        d.graph.nodes.insert(grandchild);
        d.labeling.emplace(grandchild, Label::symbol(rule.rhs[j]));
        d.graph.ribs.push_back(
            make_rib(true, prefix + "q" + std::to_string(j), child, grandchild, kParentSort));
        if (j > 0) {
            d.graph.ribs.push_back(
                make_rib(true, prefix + "m" + std::to_string(j), grandchild, previous, kSiblingSort));
        }
        previous = std::move(grandchild);
    }
}

} // namespace detail

/// Builds the derivation-tree neighbourhood grammar of a context-free
/// grammar:
///   - per rule and per terminal occurrence, the rule's bush centered at that
///     occurrence (one neighbourhood per occurrence);
///   - per nonterminal occurrence and per rule expanding it, the two-level
///     diagram combining both rules, centered at the shared node (a one-level
///     bush could never satisfy the star condition at an internal node);
///   - per rule whose left-hand side is the start symbol, the bush centered
///     at its top node (covers the root and nothing else).
inline NeighbourhoodGrammar compile_cfg(const Cfg& cfg) {
    if (cfg.rules.empty()) throw InvariantError("compile_cfg: grammar has no rules");
    if (!cfg.nonterminals.count(cfg.start)) {
        throw InvariantError("compile_cfg: start symbol '" + cfg.start + "' is not a nonterminal");
    }
    std::map<SymbolName, std::vector<std::size_t>> rules_for; // lhs -> rule indices
    for (std::size_t i = 0; i < cfg.rules.size(); ++i) {
        const CfgRule& rule = cfg.rules[i];
        if (rule.rhs.empty()) {
            throw InvariantError("compile_cfg: empty production for '" + rule.lhs + "'");
        }
        rules_for[rule.lhs].push_back(i);
    }
    for (const SymbolName& n : cfg.nonterminals) {
        if (!rules_for.count(n)) {
            throw InvariantError("compile_cfg: nonterminal '" + n + "' has no rule");
        }
        if (cfg.terminals.count(n)) {
            throw InvariantError("compile_cfg: symbol '" + n + "' is both terminal and nonterminal");
        }
    }
    for (const CfgRule& rule : cfg.rules) {
        for (const SymbolName& s : rule.rhs) {
            if (!cfg.nonterminals.count(s) && !cfg.terminals.count(s)) {
                throw InvariantError("compile_cfg: undeclared symbol '" + s + "'");
            }
        }
    }

    NeighbourhoodGrammar g;
    g.directed = true;
    for (const SymbolName& s : cfg.nonterminals) g.alphabet.insert(s);
    for (const SymbolName& s : cfg.terminals) g.alphabet.insert(s);
    g.sorts = {kParentSort, kSiblingSort};
    g.restrictions.push_back(
        OrderedTreeRestriction{kParentSort, kSiblingSort, cfg.terminals});

    std::size_t ordinal = 0;
    auto new_neighbourhood = [&]() {
        Neighbourhood n;
        n.diagram.alphabet = g.alphabet;
        n.diagram.graph.directed = true;
        n.diagram.graph.sorts = g.sorts;
        return n;
    };

    for (const CfgRule& rule : cfg.rules) {
        for (std::size_t k = 0; k < rule.rhs.size(); ++k) {
            const SymbolName& symbol = rule.rhs[k];
            if (cfg.terminals.count(symbol)) {
                Neighbourhood n = new_neighbourhood();
                const std::string prefix = "n" + std::to_string(ordinal++) + ":";
                auto ids = detail::add_bush(n.diagram, rule, prefix);
                n.center = ids.children[k];
                n.diagram.graph.normalize();
                g.neighbourhoods.push_back(std::move(n));
            } else {
                for (std::size_t expansion : rules_for[symbol]) {
                    Neighbourhood n = new_neighbourhood();
                    const std::string prefix = "n" + std::to_string(ordinal++) + ":";
                    auto ids = detail::add_bush(n.diagram, rule, prefix);
                    detail::expand_child(n.diagram, ids.children[k], cfg.rules[expansion], prefix);
                    n.center = ids.children[k];
                    n.diagram.graph.normalize();
                    g.neighbourhoods.push_back(std::move(n));
                }
            }
        }
    }
    for (std::size_t i : rules_for[cfg.start]) {
        Neighbourhood n = new_neighbourhood();
        const std::string prefix = "n" + std::to_string(ordinal++) + ":";
        auto ids = detail::add_bush(n.diagram, cfg.rules[i], prefix);
        n.center = ids.top;
        n.diagram.graph.normalize();
        g.neighbourhoods.push_back(std::move(n));
    }

    ValidationReport report = validate_grammar(g);
    if (!report.ok()) {
        throw InvariantError("compile_cfg: " + report.violations.front().message);
    }
    return g;
}

/// Encodes a bracketed tree `(Label child1 child2 ...)` as a tree diagram.
/// Every vertex is parenthesized, leaves included: `(S (a) (b))`. Node ids
/// are tree paths ("t", "t.0", "t.1", ...).
inline Diagram tree_to_diagram(const std::string& text, const Cfg& cfg) {
    std::vector<std::string> tokens;
    for (std::size_t i = 0; i < text.size();) {
        char c = text[i];
        if (c == '(' || c == ')') {
            tokens.emplace_back(1, c);
            ++i;
        } else if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
        } else {
            std::size_t j = i;
            while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j])) &&
                   text[j] != '(' && text[j] != ')') {
                ++j;
            }
            tokens.push_back(text.substr(i, j - i));
            i = j;
        }
    }

    Diagram d;
    d.graph.directed = true;
    d.graph.sorts = {kParentSort, kSiblingSort};
    for (const SymbolName& s : cfg.nonterminals) d.alphabet.insert(s);
    for (const SymbolName& s : cfg.terminals) d.alphabet.insert(s);

    std::size_t pos = 0;
    auto expect = [&](const std::string& token) {
        if (pos >= tokens.size() || tokens[pos] != token) {
            throw ParseError("tree: expected '" + token + "' at token " + std::to_string(pos));
        }
        ++pos;
    };
    auto parse_node = [&](auto&& self, const std::string& path) -> void {
        expect("(");
        if (pos >= tokens.size() || tokens[pos] == "(" || tokens[pos] == ")") {
            throw ParseError("tree: expected a label at token " + std::to_string(pos));
        }
        const std::string label = tokens[pos++];
        if (!d.alphabet.count(label)) throw ParseError("tree: unknown label '" + label + "'");
        d.graph.nodes.insert(path);
        d.labeling.emplace(path, Label::symbol(label));
        std::size_t k = 0;
        std::string previous;
        while (pos < tokens.size() && tokens[pos] == "(") {
            std::string child = path + "." + std::to_string(k);
            self(self, child);
            d.graph.ribs.push_back(make_rib(true, "sp:" + child, path, child, kParentSort));
            if (k > 0) {
                d.graph.ribs.push_back(make_rib(true, "sl:" + child, child, previous, kSiblingSort));
            }
            previous = std::move(child);
            ++k;
        }
        expect(")");
    };
    parse_node(parse_node, "t");
    if (pos != tokens.size()) {
        throw ParseError("tree: unexpected trailing tokens at token " + std::to_string(pos));
    }
    d.graph.normalize();
    return d;
}

} // namespace synd
