#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "synd/diagram.hpp"
#include "synd/engine.hpp"
#include "synd/generators/cfg.hpp"
#include "synd/generators/prolog.hpp"
#include "synd/generators/string_grammar.hpp"
#include "synd/generators/valency.hpp"
#include "synd/grammar.hpp"
#include "synd/matcher.hpp"

// File formats. Everything is one canonical JSON surface: objects keep their
// keys sorted (nlohmann's default map representation), id lists are sorted,
// serialization is byte-deterministic, and load(save(x)) == x.

namespace synd {

using json = nlohmann::json;

inline std::string canonical_text(const json& j) { return j.dump(2) + "\n"; }

namespace detail {

inline void expect_fields(const json& j, const std::string& where,
                          const std::set<std::string>& required,
                          const std::set<std::string>& optional = {}) {
    if (!j.is_object()) throw ParseError(where + ": expected an object");
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (!required.count(key) && !optional.count(key)) {
            throw ParseError(where + ": unexpected field '" + key + "'");
        }
    }
    for (const std::string& key : required) {
        if (!j.contains(key)) throw ParseError(where + ": missing field '" + key + "'");
    }
}

inline std::set<std::string> string_set(const json& j, const std::string& where) {
    if (!j.is_array()) throw ParseError(where + ": expected an array of strings");
    std::set<std::string> out;
    for (const auto& item : j) {
        if (!item.is_string()) throw ParseError(where + ": expected an array of strings");
        out.insert(item.get<std::string>());
    }
    return out;
}

inline json sorted_array(const std::set<std::string>& values) {
    json out = json::array();
    for (const std::string& v : values) out.push_back(v);
    return out;
}

inline json nodes_to_json(const Diagram& d) {
    json out = json::array();
    for (const NodeId& v : d.graph.nodes) {
        auto label = d.labeling.find(v);
        json node;
        node["id"] = v;
        node["label"] = (label == d.labeling.end()) ? "" : label->second.name;
        out.push_back(std::move(node));
    }
    return out;
}

inline json ribs_to_json(const Multigraph& g) {
    std::vector<const Rib*> ribs;
    for (const Rib& r : g.ribs) ribs.push_back(&r);
    std::sort(ribs.begin(), ribs.end(), [](const Rib* a, const Rib* b) { return a->id < b->id; });
    json out = json::array();
    for (const Rib* r : ribs) {
        json rib;
        rib["from"] = r->from;
        rib["id"] = r->id;
        rib["sort"] = r->sort;
        rib["to"] = r->to;
        out.push_back(std::move(rib));
    }
    return out;
}

// Reads nodes/ribs into a diagram whose alphabet, sorts and directedness are
// already set. Labels found in `variables` become variable labels.
inline void graph_from_json(Diagram& d, const json& nodes, const json& ribs,
                            const std::set<VariableName>& variables, const std::string& where) {
    if (!nodes.is_array()) throw ParseError(where + ": 'nodes' must be an array");
    for (const auto& node : nodes) {
        expect_fields(node, where + " node", {"id", "label"});
        if (!node["id"].is_string() || !node["label"].is_string()) {
            throw ParseError(where + ": node fields must be strings");
        }
        NodeId id = node["id"].get<std::string>();
        std::string label = node["label"].get<std::string>();
        if (d.graph.nodes.count(id)) throw ParseError(where + ": duplicate node id '" + id + "'");
        d.graph.nodes.insert(id);
        d.labeling.emplace(std::move(id), variables.count(label) ? Label::variable(label)
                                                                 : Label::symbol(label));
    }
    if (!ribs.is_array()) throw ParseError(where + ": 'ribs' must be an array");
    std::set<RibId> seen;
    for (const auto& rib : ribs) {
        expect_fields(rib, where + " rib", {"from", "id", "sort", "to"});
        for (const char* field : {"from", "id", "sort", "to"}) {
            if (!rib[field].is_string()) {
                throw ParseError(where + ": rib field '" + std::string(field) + "' must be a string");
            }
        }
        RibId id = rib["id"].get<std::string>();
        if (!seen.insert(id).second) throw ParseError(where + ": duplicate rib id '" + id + "'");
        d.graph.ribs.push_back(make_rib(d.graph.directed, std::move(id),
                                        rib["from"].get<std::string>(), rib["to"].get<std::string>(),
                                        rib["sort"].get<std::string>()));
    }
    d.graph.normalize();
}

} // namespace detail

// ---------------------------------------------------------------------------
// Diagrams
// ---------------------------------------------------------------------------

inline json diagram_to_json(const Diagram& d) {
    json out;
    out["alphabet"] = detail::sorted_array(d.alphabet);
    out["directed"] = d.graph.directed;
    out["nodes"] = detail::nodes_to_json(d);
    out["ribs"] = detail::ribs_to_json(d.graph);
    out["sorts"] = detail::sorted_array(d.graph.sorts);
    return out;
}

/// Parses a diagram document. Structural JSON problems raise ParseError;
/// a well-formed document that breaks a diagram invariant raises
/// InvariantError naming the first violation.
inline Diagram diagram_from_json(const json& j) {
    detail::expect_fields(j, "diagram", {"alphabet", "directed", "nodes", "ribs", "sorts"});
    if (!j["directed"].is_boolean()) throw ParseError("diagram: 'directed' must be a boolean");
    Diagram d;
    d.alphabet = detail::string_set(j["alphabet"], "diagram alphabet");
    d.graph.directed = j["directed"].get<bool>();
    d.graph.sorts = detail::string_set(j["sorts"], "diagram sorts");
    detail::graph_from_json(d, j["nodes"], j["ribs"], {}, "diagram");
    ValidationReport report = validate_diagram(d);
    if (!report.ok()) {
        throw InvariantError("diagram: " + report.violations.front().message);
    }
    return d;
}

// ---------------------------------------------------------------------------
// Grammars
// ---------------------------------------------------------------------------

inline json restriction_to_json(const Restriction& r) {
    json out;
    if (const auto* chain = std::get_if<ChainRestriction>(&r)) {
        out["kind"] = "chain";
        out["sort"] = chain->sort;
    } else if (const auto* tree = std::get_if<OrderedTreeRestriction>(&r)) {
        out["kind"] = "ordered_tree";
        out["parent_sort"] = tree->parent_sort;
        out["sibling_sort"] = tree->sibling_sort;
        out["terminals"] = detail::sorted_array(tree->terminal_symbols);
    } else if (const auto* deg = std::get_if<DegreeRestriction>(&r)) {
        out["kind"] = "degree";
        out["symbols"] = deg->symbols ? detail::sorted_array(*deg->symbols) : json("*");
        out["sort"] = deg->sort ? json(*deg->sort) : json("*");
        switch (deg->direction) {
        case RibDirection::in: out["direction"] = "in"; break;
        case RibDirection::out: out["direction"] = "out"; break;
        case RibDirection::any: out["direction"] = "any"; break;
        }
        out["min"] = deg->min;
        out["max"] = deg->max ? json(*deg->max) : json("unbounded");
    }
    return out;
}

inline Restriction restriction_from_json(const json& j) {
    detail::expect_fields(j, "restriction", {"kind"},
                          {"sort", "parent_sort", "sibling_sort", "terminals", "symbols",
                           "direction", "min", "max"});
    if (!j["kind"].is_string()) throw ParseError("restriction: 'kind' must be a string");
    const std::string kind = j["kind"].get<std::string>();
    if (kind == "chain") {
        detail::expect_fields(j, "chain restriction", {"kind", "sort"});
        if (!j["sort"].is_string()) throw ParseError("chain restriction: 'sort' must be a string");
        return ChainRestriction{j["sort"].get<std::string>()};
    }
    if (kind == "ordered_tree") {
        detail::expect_fields(j, "ordered_tree restriction",
                              {"kind", "parent_sort", "sibling_sort", "terminals"});
        if (!j["parent_sort"].is_string() || !j["sibling_sort"].is_string()) {
            throw ParseError("ordered_tree restriction: sorts must be strings");
        }
        return OrderedTreeRestriction{
            j["parent_sort"].get<std::string>(), j["sibling_sort"].get<std::string>(),
            detail::string_set(j["terminals"], "ordered_tree terminals")};
    }
    if (kind == "degree") {
        detail::expect_fields(j, "degree restriction",
                              {"kind", "symbols", "sort", "direction", "min", "max"});
        DegreeRestriction deg;
        if (j["symbols"].is_string()) {
            if (j["symbols"].get<std::string>() != "*") {
                throw ParseError("degree restriction: 'symbols' must be an array or \"*\"");
            }
        } else {
            deg.symbols = detail::string_set(j["symbols"], "degree symbols");
        }
        if (j["sort"].is_string() && j["sort"].get<std::string>() == "*") {
            deg.sort = std::nullopt;
        } else if (j["sort"].is_string()) {
            deg.sort = j["sort"].get<std::string>();
        } else {
            throw ParseError("degree restriction: 'sort' must be a string");
        }
        if (!j["direction"].is_string()) {
            throw ParseError("degree restriction: 'direction' must be a string");
        }
        const std::string direction = j["direction"].get<std::string>();
        if (direction == "in") {
            deg.direction = RibDirection::in;
        } else if (direction == "out") {
            deg.direction = RibDirection::out;
        } else if (direction == "any") {
            deg.direction = RibDirection::any;
        } else {
            throw ParseError("degree restriction: unknown direction '" + direction + "'");
        }
        if (!j["min"].is_number_unsigned()) {
            throw ParseError("degree restriction: 'min' must be a non-negative integer");
        }
        deg.min = j["min"].get<std::size_t>();
        if (j["max"].is_string()) {
            if (j["max"].get<std::string>() != "unbounded") {
                throw ParseError("degree restriction: 'max' must be an integer or \"unbounded\"");
            }
        } else if (j["max"].is_number_unsigned()) {
            deg.max = j["max"].get<std::size_t>();
        } else {
            throw ParseError("degree restriction: 'max' must be an integer or \"unbounded\"");
        }
        return deg;
    }
    throw ParseError("restriction: unknown kind '" + kind + "'");
}

inline json grammar_to_json(const NeighbourhoodGrammar& g) {
    json out;
    out["alphabet"] = detail::sorted_array(g.alphabet);
    out["directed"] = g.directed;
    out["sorts"] = detail::sorted_array(g.sorts);
    json variables = json::object();
    for (const auto& [name, members] : g.classes.classes) {
        // a class covering the whole alphabet is the wildcard class
        variables[name] = (members == g.alphabet) ? json("*") : detail::sorted_array(members);
    }
    out["variables"] = std::move(variables);
    json neighbourhoods = json::array();
    for (const Neighbourhood& n : g.neighbourhoods) {
        json entry;
        entry["center"] = n.center;
        entry["nodes"] = detail::nodes_to_json(n.diagram);
        entry["ribs"] = detail::ribs_to_json(n.diagram.graph);
        entry["star_policy"] = (n.star_policy == StarPolicy::exact) ? "exact" : "open";
        neighbourhoods.push_back(std::move(entry));
    }
    out["neighbourhoods"] = std::move(neighbourhoods);
    json restrictions = json::array();
    for (const Restriction& r : g.restrictions) restrictions.push_back(restriction_to_json(r));
    out["restrictions"] = std::move(restrictions);
    return out;
}

inline NeighbourhoodGrammar grammar_from_json(const json& j) {
    detail::expect_fields(
        j, "grammar",
        {"alphabet", "directed", "neighbourhoods", "restrictions", "sorts", "variables"});
    if (!j["directed"].is_boolean()) throw ParseError("grammar: 'directed' must be a boolean");
    NeighbourhoodGrammar g;
    g.directed = j["directed"].get<bool>();
    g.alphabet = detail::string_set(j["alphabet"], "grammar alphabet");
    g.sorts = detail::string_set(j["sorts"], "grammar sorts");
    if (!j["variables"].is_object()) throw ParseError("grammar: 'variables' must be an object");
    std::set<VariableName> variable_names;
    for (const auto& [name, members] : j["variables"].items()) {
        variable_names.insert(name);
        if (members.is_string() && members.get<std::string>() == "*") {
            g.classes.classes.emplace(name, g.alphabet);
        } else {
            g.classes.classes.emplace(name,
                                      detail::string_set(members, "class of '" + name + "'"));
        }
    }
    if (!j["neighbourhoods"].is_array()) {
        throw ParseError("grammar: 'neighbourhoods' must be an array");
    }
    for (const auto& entry : j["neighbourhoods"]) {
        detail::expect_fields(entry, "neighbourhood", {"center", "nodes", "ribs"}, {"star_policy"});
        if (!entry["center"].is_string()) {
            throw ParseError("neighbourhood: 'center' must be a string");
        }
        Neighbourhood n;
        n.diagram.alphabet = g.alphabet;
        n.diagram.graph.directed = g.directed;
        n.diagram.graph.sorts = g.sorts;
        detail::graph_from_json(n.diagram, entry["nodes"], entry["ribs"], variable_names,
                                "neighbourhood");
        n.center = entry["center"].get<std::string>();
        n.star_policy = StarPolicy::exact;
        if (entry.contains("star_policy")) {
            if (!entry["star_policy"].is_string()) {
                throw ParseError("neighbourhood: 'star_policy' must be a string");
            }
            const std::string policy = entry["star_policy"].get<std::string>();
            if (policy == "open") {
                n.star_policy = StarPolicy::open;
            } else if (policy != "exact") {
                throw ParseError("neighbourhood: unknown star policy '" + policy + "'");
            }
        }
        g.neighbourhoods.push_back(std::move(n));
    }
    if (!j["restrictions"].is_array()) throw ParseError("grammar: 'restrictions' must be an array");
    for (const auto& entry : j["restrictions"]) {
        g.restrictions.push_back(restriction_from_json(entry));
    }
    ValidationReport report = validate_grammar(g);
    if (!report.ok()) {
        throw InvariantError("grammar: " + report.violations.front().message);
    }
    return g;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

inline json report_to_json(const CheckReport& r) {
    json out;
    out["correct"] = r.correct;
    json violations = json::array();
    for (const RestrictionViolation& v : r.restriction_violations) {
        json entry;
        entry["message"] = v.message;
        json nodes = json::array();
        for (const NodeId& n : v.nodes) nodes.push_back(n);
        entry["nodes"] = std::move(nodes);
        entry["restriction"] = v.restriction;
        entry["rule"] = v.rule;
        violations.push_back(std::move(entry));
    }
    out["restriction_violations"] = std::move(violations);
    json uncovered = json::array();
    for (const UncoveredNode& u : r.uncovered_nodes) {
        json entry;
        entry["node"] = u.node;
        entry["tried"] = u.tried;
        uncovered.push_back(std::move(entry));
    }
    out["uncovered_nodes"] = std::move(uncovered);
    if (r.witness) {
        json witness = json::object();
        for (const auto& [node, entry] : *r.witness) {
            json w;
            w["binding"] = json(entry.mapping.binding);
            w["neighbourhood"] = entry.neighbourhood;
            w["node_map"] = json(entry.mapping.node_map);
            w["rib_map"] = json(entry.mapping.rib_map);
            witness[node] = std::move(w);
        }
        out["witness"] = std::move(witness);
    }
    if (r.witness_counts) {
        out["witness_counts"] = json(*r.witness_counts);
    }
    return out;
}

inline CheckReport report_from_json(const json& j) {
    detail::expect_fields(j, "report", {"correct", "restriction_violations", "uncovered_nodes"},
                          {"witness", "witness_counts"});
    CheckReport r;
    if (!j["correct"].is_boolean()) throw ParseError("report: 'correct' must be a boolean");
    r.correct = j["correct"].get<bool>();
    for (const auto& entry : j["restriction_violations"]) {
        detail::expect_fields(entry, "restriction violation",
                              {"message", "nodes", "restriction", "rule"});
        RestrictionViolation v;
        v.message = entry["message"].get<std::string>();
        for (const auto& n : entry["nodes"]) v.nodes.push_back(n.get<std::string>());
        v.restriction = entry["restriction"].get<std::size_t>();
        v.rule = entry["rule"].get<std::string>();
        r.restriction_violations.push_back(std::move(v));
    }
    for (const auto& entry : j["uncovered_nodes"]) {
        detail::expect_fields(entry, "uncovered node", {"node", "tried"});
        r.uncovered_nodes.push_back(
            {entry["node"].get<std::string>(), entry["tried"].get<std::size_t>()});
    }
    if (j.contains("witness")) {
        CoverWitness witness;
        for (const auto& [node, w] : j["witness"].items()) {
            detail::expect_fields(w, "witness entry",
                                  {"binding", "neighbourhood", "node_map", "rib_map"});
            WitnessEntry entry;
            entry.neighbourhood = w["neighbourhood"].get<std::size_t>();
            entry.mapping.node_map = w["node_map"].get<std::map<NodeId, NodeId>>();
            entry.mapping.rib_map = w["rib_map"].get<std::map<RibId, RibId>>();
            entry.mapping.binding = w["binding"].get<std::map<VariableName, SymbolName>>();
            witness.emplace(node, std::move(entry));
        }
        r.witness = std::move(witness);
    }
    if (j.contains("witness_counts")) {
        r.witness_counts = j["witness_counts"].get<std::map<NodeId, std::size_t>>();
    }
    return r;
}

inline std::string report_to_text(const CheckReport& r) {
    std::ostringstream out;
    out << "correct: " << (r.correct ? "yes" : "no") << "\n";
    if (!r.restriction_violations.empty()) {
        out << "restriction violations (" << r.restriction_violations.size() << "):\n";
        for (const RestrictionViolation& v : r.restriction_violations) {
            out << "  [" << v.restriction << "] " << v.rule << ": " << v.message << "\n";
        }
    }
    if (!r.uncovered_nodes.empty()) {
        out << "uncovered nodes (" << r.uncovered_nodes.size() << "):\n";
        for (const UncoveredNode& u : r.uncovered_nodes) {
            out << "  " << u.node << " (tried " << u.tried << ")\n";
        }
    }
    if (r.witness && !r.witness->empty()) {
        out << "witness:\n";
        for (const auto& [node, entry] : *r.witness) {
            out << "  " << node << ": neighbourhood " << entry.neighbourhood;
            if (!entry.mapping.binding.empty()) {
                out << " with";
                for (const auto& [variable, symbol] : entry.mapping.binding) {
                    out << " " << variable << "=" << symbol;
                }
            }
            out << "\n";
        }
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Generator inputs
// ---------------------------------------------------------------------------

/// String-neighbourhood spec document:
///   { "alphabet": ["a", "b"],
///     "neighbourhoods": ["# [a] b", "b [a] #", "b [a] b", "a [b] a"] }
/// Contexts are whitespace-separated tokens; brackets mark the center.
inline StringGrammarSpec string_spec_from_json(const json& j) {
    detail::expect_fields(j, "string spec", {"alphabet", "neighbourhoods"});
    StringGrammarSpec spec;
    spec.alphabet = detail::string_set(j["alphabet"], "string spec alphabet");
    if (!j["neighbourhoods"].is_array()) {
        throw ParseError("string spec: 'neighbourhoods' must be an array of strings");
    }
    for (const auto& entry : j["neighbourhoods"]) {
        if (!entry.is_string()) {
            throw ParseError("string spec: 'neighbourhoods' must be an array of strings");
        }
        const std::string text = entry.get<std::string>();
        StringNeighbourhood sn;
        std::istringstream tokens(text);
        std::optional<std::size_t> center;
        for (std::string token; tokens >> token;) {
            if (token.size() >= 2 && token.front() == '[' && token.back() == ']') {
                if (center) {
                    throw ParseError("string spec: more than one center in '" + text + "'");
                }
                center = sn.tokens.size();
                token = token.substr(1, token.size() - 2);
            }
            sn.tokens.push_back(std::move(token));
        }
        if (sn.tokens.empty()) throw ParseError("string spec: empty neighbourhood");
        if (!center) throw ParseError("string spec: no [center] marked in '" + text + "'");
        sn.center = *center;
        spec.neighbourhoods.push_back(std::move(sn));
    }
    return spec;
}

/// Valency table document:
///   { "valencies": {"H": 1, "O": 2}, "max_bond_multiplicity": 3 }
inline ValencyTable valency_from_json(const json& j) {
    detail::expect_fields(j, "valency table", {"valencies"}, {"max_bond_multiplicity"});
    ValencyTable table;
    if (!j["valencies"].is_object()) {
        throw ParseError("valency table: 'valencies' must be an object");
    }
    for (const auto& [element, valency] : j["valencies"].items()) {
        if (!valency.is_number_unsigned() || valency.get<unsigned>() == 0) {
            throw ParseError("valency table: valency of '" + element +
                             "' must be a positive integer");
        }
        table.valencies.emplace(element, valency.get<unsigned>());
    }
    if (j.contains("max_bond_multiplicity")) {
        if (!j["max_bond_multiplicity"].is_number_unsigned() ||
            j["max_bond_multiplicity"].get<unsigned>() == 0) {
            throw ParseError("valency table: 'max_bond_multiplicity' must be a positive integer");
        }
        table.max_bond_multiplicity = j["max_bond_multiplicity"].get<unsigned>();
    }
    return table;
}

// ---------------------------------------------------------------------------
// Files
// ---------------------------------------------------------------------------

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read '" + path.string() + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) throw IoError("cannot read '" + path.string() + "'");
    return buffer.str();
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << content;
    out.flush();
    if (!out.good()) throw IoError("cannot write '" + path.string() + "'");
}

inline json parse_json_file(const std::filesystem::path& path) {
    const std::string text = read_text_file(path);
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

inline Diagram load_diagram(const std::filesystem::path& path) {
    return diagram_from_json(parse_json_file(path));
}

inline void save_diagram(const Diagram& d, const std::filesystem::path& path) {
    write_text_file(path, canonical_text(diagram_to_json(d)));
}

inline NeighbourhoodGrammar load_grammar(const std::filesystem::path& path) {
    return grammar_from_json(parse_json_file(path));
}

inline void save_grammar(const NeighbourhoodGrammar& g, const std::filesystem::path& path) {
    write_text_file(path, canonical_text(grammar_to_json(g)));
}

inline CheckReport load_report(const std::filesystem::path& path) {
    return report_from_json(parse_json_file(path));
}

inline void save_report(const CheckReport& r, const std::filesystem::path& path) {
    write_text_file(path, canonical_text(report_to_json(r)));
}

inline StringGrammarSpec load_string_spec(const std::filesystem::path& path) {
    return string_spec_from_json(parse_json_file(path));
}

inline ValencyTable load_valency_table(const std::filesystem::path& path) {
    return valency_from_json(parse_json_file(path));
}

inline Cfg load_cfg(const std::filesystem::path& path) { return parse_cfg(read_text_file(path)); }

inline PrologProgram load_prolog(const std::filesystem::path& path) {
    return parse_prolog(read_text_file(path));
}

/// Splits chain text into symbols: on whitespace when any is present,
/// otherwise one symbol per UTF-8 code point.
inline std::vector<SymbolName> tokenize_chain(const std::string& text) {
    if (text.find_first_of(" \t\r\n") != std::string::npos) {
        std::istringstream in(text);
        std::vector<SymbolName> out;
        for (std::string token; in >> token;) out.push_back(token);
        return out;
    }
    std::vector<SymbolName> out;
    for (std::size_t i = 0; i < text.size();) {
        unsigned char lead = static_cast<unsigned char>(text[i]);
        std::size_t width = (lead < 0x80) ? 1 : (lead < 0xE0) ? 2 : (lead < 0xF0) ? 3 : 4;
        width = std::min(width, text.size() - i);
        out.push_back(text.substr(i, width));
        i += width;
    }
    return out;
}

} // namespace synd
