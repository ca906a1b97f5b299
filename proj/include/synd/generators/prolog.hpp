#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "synd/diagram.hpp"
#include "synd/grammar.hpp"

// Compiles a mini-Prolog program (facts and rules over constants and
// variables, no lists or arithmetic) into a neighbourhood grammar whose
// correct diagrams are worlds of the program. Nodes are constants and
// predicate names; a rib of sort S_i runs from a predicate node to its
// argument number i.

namespace synd {

struct PrologTerm {
    enum class Kind { constant, variable };

    Kind kind = Kind::constant;
    std::string name;

    static PrologTerm constant(std::string n) { return {Kind::constant, std::move(n)}; }
    static PrologTerm variable(std::string n) { return {Kind::variable, std::move(n)}; }

    auto operator<=>(const PrologTerm&) const = default;
};

struct PrologAtom {
    std::string predicate;
    std::vector<PrologTerm> args; // never empty

    auto operator<=>(const PrologAtom&) const = default;
};

struct PrologRule {
    PrologAtom goal;
    std::vector<PrologAtom> premises; // never empty

    auto operator<=>(const PrologRule&) const = default;
};

struct PrologProgram {
    std::vector<PrologAtom> facts;
    std::vector<PrologRule> rules;

    auto operator<=>(const PrologProgram&) const = default;
};

namespace detail {

struct PrologToken {
    enum class Kind { name, punct, end };

    Kind kind = Kind::end;
    std::string text;
    std::size_t line = 0;
    std::size_t column = 0;
};

inline std::vector<PrologToken> tokenize_prolog(const std::string& text) {
    std::vector<PrologToken> tokens;
    std::size_t line = 1;
    std::size_t column = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k, ++i) {
            if (text[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
    };
    while (i < text.size()) {
        char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        std::size_t at_line = line;
        std::size_t at_column = column;
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < text.size() &&
                   (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_')) {
                ++j;
            }
            tokens.push_back({PrologToken::Kind::name, text.substr(i, j - i), at_line, at_column});
            advance(j - i);
        } else if (c == ':' && i + 1 < text.size() && text[i + 1] == '-') {
            tokens.push_back({PrologToken::Kind::punct, ":-", at_line, at_column});
            advance(2);
        } else if (c == '(' || c == ')' || c == ',' || c == '.') {
            tokens.push_back({PrologToken::Kind::punct, std::string(1, c), at_line, at_column});
            advance(1);
        } else {
            throw ParseError("prolog: unexpected character '" + std::string(1, c) + "' at " +
                             std::to_string(at_line) + ":" + std::to_string(at_column));
        }
    }
    tokens.push_back({PrologToken::Kind::end, "", line, column});
    return tokens;
}

inline bool is_variable_name(const std::string& name) {
    return !name.empty() && (std::isupper(static_cast<unsigned char>(name.front())) ||
                             name.front() == '_');
}

} // namespace detail

/// Parses mini-Prolog text: clauses `p(t1, ..., tn).` and
/// `g(...) :- p1(...), ..., pk(...).`. Lowercase-initial identifiers and
/// integers are constants and predicate names; uppercase- or
/// underscore-initial identifiers are variables.
inline PrologProgram parse_prolog(const std::string& text) {
    auto tokens = detail::tokenize_prolog(text);
    std::size_t pos = 0;
    auto here = [&]() {
        return std::to_string(tokens[pos].line) + ":" + std::to_string(tokens[pos].column);
    };
    auto expect = [&](const std::string& punct) {
        if (tokens[pos].kind != detail::PrologToken::Kind::punct || tokens[pos].text != punct) {
            throw ParseError("prolog: expected '" + punct + "' at " + here());
        }
        ++pos;
    };
    auto parse_atom = [&]() {
        if (tokens[pos].kind != detail::PrologToken::Kind::name) {
            throw ParseError("prolog: expected a predicate name at " + here());
        }
        if (detail::is_variable_name(tokens[pos].text)) {
            throw ParseError("prolog: predicate name '" + tokens[pos].text +
                             "' must not be a variable, at " + here());
        }
        PrologAtom atom;
        atom.predicate = tokens[pos].text;
        ++pos;
        expect("(");
        while (true) {
            if (tokens[pos].kind != detail::PrologToken::Kind::name) {
                throw ParseError("prolog: expected a term at " + here());
            }
            const std::string& name = tokens[pos].text;
            atom.args.push_back(detail::is_variable_name(name) ? PrologTerm::variable(name)
                                                               : PrologTerm::constant(name));
            ++pos;
            if (tokens[pos].kind == detail::PrologToken::Kind::punct && tokens[pos].text == ",") {
                ++pos;
                continue;
            }
            break;
        }
        expect(")");
        return atom;
    };

    PrologProgram program;
    while (tokens[pos].kind != detail::PrologToken::Kind::end) {
        PrologAtom head = parse_atom();
        if (tokens[pos].kind == detail::PrologToken::Kind::punct && tokens[pos].text == ":-") {
            ++pos;
            PrologRule rule;
            rule.goal = std::move(head);
            while (true) {
                rule.premises.push_back(parse_atom());
                if (tokens[pos].kind == detail::PrologToken::Kind::punct &&
                    tokens[pos].text == ",") {
                    ++pos;
                    continue;
                }
                break;
            }
            expect(".");
            program.rules.push_back(std::move(rule));
        } else {
            expect(".");
            program.facts.push_back(std::move(head));
        }
    }
    return program;
}

namespace detail {

inline void collect_atom(const PrologAtom& atom, std::map<std::string, std::size_t>& arities,
                         std::vector<SymbolName>& constants, std::set<SymbolName>& constant_set,
                         std::set<VariableName>& variables) {
    auto arity = arities.find(atom.predicate);
    if (arity == arities.end()) {
        arities.emplace(atom.predicate, atom.args.size());
    } else if (arity->second != atom.args.size()) {
        throw InvariantError("compile_prolog: predicate '" + atom.predicate +
                             "' used with arities " + std::to_string(arity->second) + " and " +
                             std::to_string(atom.args.size()));
    }
    for (const PrologTerm& term : atom.args) {
        if (term.kind == PrologTerm::Kind::constant) {
            if (constant_set.insert(term.name).second) constants.push_back(term.name);
        } else {
            variables.insert(term.name);
        }
    }
}

// Argument ribs of one atom: predicate node -> term node, sort S_i. Term
// nodes are shared by name within a neighbourhood.
inline void add_atom_ribs(Diagram& d, const NodeId& predicate_node, const PrologAtom& atom,
                          const std::string& prefix, const std::string& rib_prefix) {
    for (std::size_t k = 0; k < atom.args.size(); ++k) {
        const PrologTerm& term = atom.args[k];
        NodeId term_node = prefix + "t:" + term.name;
        if (!d.graph.nodes.count(term_node)) {
            d.graph.nodes.insert(term_node);
            d.labeling.emplace(term_node, term.kind == PrologTerm::Kind::constant
                                              ? Label::symbol(term.name)
                                              : Label::variable(term.name));
        }
        d.graph.ribs.push_back(make_rib(true, rib_prefix + "a" + std::to_string(k + 1),
                                        predicate_node, term_node,
                                        "S_" + std::to_string(k + 1)));
    }
}

} // namespace detail

/// Builds the world grammar of a program: per constant a one-node open
/// neighbourhood, per fact an exact neighbourhood centered at the predicate
/// node, per rule an exact neighbourhood joining goal and premises through
/// shared term nodes. Prolog variables become grammar variables ranging over
/// all constants.
inline NeighbourhoodGrammar compile_prolog(const PrologProgram& program) {
    std::map<std::string, std::size_t> arities;
    std::vector<SymbolName> constants; // in first-appearance order
    std::set<SymbolName> constant_set;
    std::set<VariableName> variables;
    for (const PrologAtom& fact : program.facts) {
        detail::collect_atom(fact, arities, constants, constant_set, variables);
    }
    for (const PrologRule& rule : program.rules) {
        detail::collect_atom(rule.goal, arities, constants, constant_set, variables);
        for (const PrologAtom& premise : rule.premises) {
            detail::collect_atom(premise, arities, constants, constant_set, variables);
        }
    }
    for (const auto& [predicate, arity] : arities) {
        (void)arity;
        if (constant_set.count(predicate)) {
            throw InvariantError("compile_prolog: '" + predicate +
                                 "' is used both as a predicate and as a constant");
        }
    }
    if (!variables.empty() && constants.empty()) {
        throw InvariantError("compile_prolog: program uses variables but has no constants");
    }
    for (const VariableName& v : variables) {
        if (constant_set.count(v) || arities.count(v)) {
            throw InvariantError("compile_prolog: variable '" + v + "' collides with a symbol");
        }
    }

    NeighbourhoodGrammar g;
    g.directed = true;
    std::size_t max_arity = 0;
    for (const auto& [predicate, arity] : arities) {
        g.alphabet.insert(predicate);
        max_arity = std::max(max_arity, arity);
    }
    for (const SymbolName& c : constants) g.alphabet.insert(c);
    for (std::size_t i = 1; i <= max_arity; ++i) g.sorts.insert("S_" + std::to_string(i));
    for (const VariableName& v : variables) g.classes.classes.emplace(v, constant_set);

    for (std::size_t i = 0; i < constants.size(); ++i) {
        const std::string prefix = "c" + std::to_string(i) + ":";
        Neighbourhood n;
        n.diagram.alphabet = g.alphabet;
        n.diagram.graph.directed = true;
        n.diagram.graph.sorts = g.sorts;
        n.center = prefix + "n";
        n.diagram.graph.nodes.insert(n.center);
        n.diagram.labeling.emplace(n.center, Label::symbol(constants[i]));
        // a constant node may carry any ribs its worlds give it
        n.star_policy = StarPolicy::open;
        g.neighbourhoods.push_back(std::move(n));
    }
    for (std::size_t i = 0; i < program.facts.size(); ++i) {
        const PrologAtom& fact = program.facts[i];
        const std::string prefix = "f" + std::to_string(i) + ":";
        Neighbourhood n;
        n.diagram.alphabet = g.alphabet;
        n.diagram.graph.directed = true;
        n.diagram.graph.sorts = g.sorts;
        n.center = prefix + "head";
        n.diagram.graph.nodes.insert(n.center);
        n.diagram.labeling.emplace(n.center, Label::symbol(fact.predicate));
        detail::add_atom_ribs(n.diagram, n.center, fact, prefix, prefix);
        n.diagram.graph.normalize();
        g.neighbourhoods.push_back(std::move(n));
    }
    for (std::size_t i = 0; i < program.rules.size(); ++i) {
        const PrologRule& rule = program.rules[i];
        const std::string prefix = "r" + std::to_string(i) + ":";
        Neighbourhood n;
        n.diagram.alphabet = g.alphabet;
        n.diagram.graph.directed = true;
        n.diagram.graph.sorts = g.sorts;
        n.center = prefix + "head";
        n.diagram.graph.nodes.insert(n.center);
        n.diagram.labeling.emplace(n.center, Label::symbol(rule.goal.predicate));
        detail::add_atom_ribs(n.diagram, n.center, rule.goal, prefix, prefix);
        for (std::size_t j = 0; j < rule.premises.size(); ++j) {
            NodeId premise_node = prefix + "p" + std::to_string(j);
            n.diagram.graph.nodes.insert(premise_node);
            n.diagram.labeling.emplace(premise_node, Label::symbol(rule.premises[j].predicate));
            detail::add_atom_ribs(n.diagram, premise_node, rule.premises[j], prefix,
                                  prefix + "p" + std::to_string(j));
        }
        n.diagram.graph.normalize();
        if (!is_connected(n.diagram.graph)) {
            throw InvariantError("compile_prolog: rule " + std::to_string(i) +
                                 " yields a disconnected neighbourhood (a premise shares no term "
                                 "with the rest of the rule)");
        }
        g.neighbourhoods.push_back(std::move(n));
    }

    ValidationReport report = validate_grammar(g);
    if (!report.ok()) {
        throw InvariantError("compile_prolog: " + report.violations.front().message);
    }
    return g;
}

} // namespace synd
