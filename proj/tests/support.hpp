#pragma once

// Shared test fixtures: diagram builders, golden diagrams from the example
// formalisms, independent brute-force oracles, and random instance
// generators. Oracles here deliberately avoid the library's search code
// paths; they enumerate and filter naively.

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "synd/diagram.hpp"
#include "synd/engine.hpp"
#include "synd/generators/cfg.hpp"
#include "synd/grammar.hpp"
#include "synd/matcher.hpp"

namespace synd_test {

using synd::ClassMap;
using synd::Diagram;
using synd::InclusionMapping;
using synd::Label;
using synd::NodeId;
using synd::Rib;
using synd::RibId;

// ---------------------------------------------------------------------------
// Builders
// ---------------------------------------------------------------------------

inline Diagram make_diagram(bool directed, std::set<std::string> alphabet,
                            std::vector<std::pair<std::string, Label>> nodes,
                            std::vector<std::array<std::string, 4>> ribs, // id, from, to, sort
                            std::set<std::string> sorts) {
    Diagram d;
    d.alphabet = std::move(alphabet);
    d.graph.directed = directed;
    d.graph.sorts = std::move(sorts);
    for (auto& [id, label] : nodes) {
        d.graph.nodes.insert(id);
        d.labeling.emplace(id, std::move(label));
    }
    for (auto& [id, from, to, sort] : ribs) {
        d.graph.ribs.push_back(synd::make_rib(directed, id, from, to, sort));
    }
    d.graph.normalize();
    return d;
}

inline Diagram make_ground_diagram(bool directed, std::set<std::string> alphabet,
                                   std::vector<std::pair<std::string, std::string>> nodes,
                                   std::vector<std::array<std::string, 4>> ribs,
                                   std::set<std::string> sorts) {
    std::vector<std::pair<std::string, Label>> labeled;
    for (auto& [id, symbol] : nodes) labeled.emplace_back(id, Label::symbol(symbol));
    return make_diagram(directed, std::move(alphabet), std::move(labeled), std::move(ribs),
                        std::move(sorts));
}

// H-O-H
inline Diagram water() {
    return make_ground_diagram(false, {"H", "O"}, {{"h1", "H"}, {"h2", "H"}, {"o", "O"}},
                               {{"b1", "h1", "o", "bond"}, {"b2", "h2", "o", "bond"}}, {"bond"});
}

// H-H-H (incorrect: the middle H exceeds its valency)
inline Diagram hhh() {
    return make_ground_diagram(false, {"H", "O"}, {{"h1", "H"}, {"h2", "H"}, {"h3", "H"}},
                               {{"b1", "h1", "h2", "bond"}, {"b2", "h2", "h3", "bond"}}, {"bond"});
}

// O=O, a double bond as two parallel ribs
inline Diagram o2() {
    return make_ground_diagram(false, {"H", "O"}, {{"o1", "O"}, {"o2", "O"}},
                               {{"b1", "o1", "o2", "bond"}, {"b2", "o1", "o2", "bond"}}, {"bond"});
}

// O=C=O
inline Diagram co2() {
    return make_ground_diagram(false, {"C", "H", "O"}, {{"c", "C"}, {"o1", "O"}, {"o2", "O"}},
                               {{"b1", "c", "o1", "bond"},
                                {"b2", "c", "o1", "bond"},
                                {"b3", "c", "o2", "bond"},
                                {"b4", "c", "o2", "bond"}},
                               {"bond"});
}

// five hydrogens around one carbon (incorrect: valency 4)
inline Diagram ch5() {
    std::vector<std::pair<std::string, std::string>> nodes{{"c", "C"}};
    std::vector<std::array<std::string, 4>> ribs;
    for (int i = 1; i <= 5; ++i) {
        nodes.emplace_back("h" + std::to_string(i), "H");
        ribs.push_back({"b" + std::to_string(i), "c", "h" + std::to_string(i), "bond"});
    }
    return make_ground_diagram(false, {"C", "H", "O"}, nodes, ribs, {"bond"});
}

inline std::set<std::string> prolog_example_alphabet() {
    return {"Vlad", "John", "Tanya", "man", "woman", "pair"};
}

// pair -> {Vlad, Tanya}, man -> Vlad, woman -> Tanya
inline Diagram pair_world(const std::string& second, const std::string& second_id) {
    return make_ground_diagram(
        true, prolog_example_alphabet(),
        {{"pair", "pair"}, {"vlad", "Vlad"}, {second_id, second}, {"man", "man"}, {"woman", "woman"}},
        {{"e1", "pair", "vlad", "S_1"},
         {"e2", "pair", second_id, "S_2"},
         {"e3", "man", "vlad", "S_1"},
         {"e4", "woman", second_id, "S_1"}},
        {"S_1", "S_2"});
}

inline Diagram vlad_tanya_world() { return pair_world("Tanya", "tanya"); }
inline Diagram vlad_john_world() { return pair_world("John", "john"); }

// ---------------------------------------------------------------------------
// Brute-force inclusion oracle
// ---------------------------------------------------------------------------

struct OracleQuery {
    const Diagram* pattern = nullptr;
    const Diagram* target = nullptr;
    ClassMap classes;
    std::optional<std::pair<NodeId, NodeId>> anchor;
    std::optional<NodeId> star_exact_at;
};

namespace detail {

inline bool oracle_labels_ok(const OracleQuery& q, const std::map<NodeId, NodeId>& node_map,
                             std::map<std::string, std::string>& binding) {
    binding.clear();
    for (const auto& [p, t] : node_map) {
        const Label& pl = q.pattern->labeling.at(p);
        const std::string& symbol = q.target->labeling.at(t).name;
        if (pl.is_symbol()) {
            if (pl.name != symbol) return false;
            continue;
        }
        auto cls = q.classes.find(pl.name);
        if (cls == q.classes.end() || !cls->second.count(symbol)) return false;
        auto bound = binding.find(pl.name);
        if (bound == binding.end()) {
            binding.emplace(pl.name, symbol);
        } else if (bound->second != symbol) {
            return false;
        }
    }
    return true;
}

inline void oracle_rib_maps(const OracleQuery& q, const std::map<NodeId, NodeId>& node_map,
                            const std::map<std::string, std::string>& binding,
                            std::vector<InclusionMapping>& out) {
    std::vector<const Rib*> pattern_ribs;
    for (const Rib& r : q.pattern->graph.ribs) pattern_ribs.push_back(&r);
    std::sort(pattern_ribs.begin(), pattern_ribs.end(),
              [](const Rib* a, const Rib* b) { return a->id < b->id; });

    std::map<RibId, RibId> rib_map;
    std::set<RibId> used;
    auto emit = [&]() {
        InclusionMapping m;
        m.node_map = node_map;
        m.rib_map = rib_map;
        m.binding = binding;
        if (q.star_exact_at) {
            // the image of the center star must be the whole star of the
            // anchored node
            std::set<RibId> image;
            for (const RibId& r : synd::star(*q.pattern, *q.star_exact_at)) {
                image.insert(rib_map.at(r));
            }
            if (image != synd::star(*q.target, node_map.at(*q.star_exact_at))) return;
        }
        out.push_back(std::move(m));
    };
    auto recurse = [&](auto&& self, std::size_t i) -> void {
        if (i == pattern_ribs.size()) {
            emit();
            return;
        }
        const Rib& pr = *pattern_ribs[i];
        const NodeId& tf = node_map.at(pr.from);
        const NodeId& tt = node_map.at(pr.to);
        for (const Rib& tr : q.target->graph.ribs) {
            if (used.count(tr.id)) continue;
            if (tr.sort != pr.sort) continue;
            bool endpoints = q.target->graph.directed
                                 ? (tr.from == tf && tr.to == tt)
                                 : ((tr.from == tf && tr.to == tt) ||
                                    (tr.from == tt && tr.to == tf));
            if (!endpoints) continue;
            used.insert(tr.id);
            rib_map.emplace(pr.id, tr.id);
            self(self, i + 1);
            rib_map.erase(pr.id);
            used.erase(tr.id);
        }
    };
    recurse(recurse, 0);
}

} // namespace detail

/// Enumerates inclusions the slow way: every injective node map, then every
/// injective rib choice, filtered by the mapping conditions at the end.
inline std::vector<InclusionMapping> oracle_inclusions(const OracleQuery& q) {
    std::vector<NodeId> pattern_nodes(q.pattern->graph.nodes.begin(),
                                      q.pattern->graph.nodes.end());
    std::vector<NodeId> target_nodes(q.target->graph.nodes.begin(), q.target->graph.nodes.end());
    std::vector<InclusionMapping> out;
    if (pattern_nodes.empty()) {
        out.push_back(InclusionMapping{});
        return out;
    }

    std::map<NodeId, NodeId> node_map;
    std::set<NodeId> used;
    auto recurse = [&](auto&& self, std::size_t i) -> void {
        if (i == pattern_nodes.size()) {
            if (q.anchor && node_map.at(q.anchor->first) != q.anchor->second) return;
            std::map<std::string, std::string> binding;
            if (!detail::oracle_labels_ok(q, node_map, binding)) return;
            detail::oracle_rib_maps(q, node_map, binding, out);
            return;
        }
        for (const NodeId& t : target_nodes) {
            if (used.count(t)) continue;
            used.insert(t);
            node_map.emplace(pattern_nodes[i], t);
            self(self, i + 1);
            node_map.erase(pattern_nodes[i]);
            used.erase(t);
        }
    };
    recurse(recurse, 0);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

/// Independent re-verification of one mapping against the subdiagram
/// conditions.
inline bool mapping_valid(const Diagram& pattern, const Diagram& target, const ClassMap& classes,
                          const InclusionMapping& m) {
    if (m.node_map.size() != pattern.graph.nodes.size()) return false;
    std::set<NodeId> images;
    for (const auto& [p, t] : m.node_map) {
        if (!pattern.graph.nodes.count(p) || !target.graph.nodes.count(t)) return false;
        if (!images.insert(t).second) return false; // not injective
        const Label& pl = pattern.labeling.at(p);
        const std::string& symbol = target.labeling.at(t).name;
        if (pl.is_symbol()) {
            if (pl.name != symbol) return false;
        } else {
            auto bound = m.binding.find(pl.name);
            if (bound == m.binding.end() || bound->second != symbol) return false;
            auto cls = classes.find(pl.name);
            if (cls == classes.end() || !cls->second.count(symbol)) return false;
        }
    }
    if (m.rib_map.size() != pattern.graph.ribs.size()) return false;
    std::set<RibId> rib_images;
    for (const Rib& pr : pattern.graph.ribs) {
        auto it = m.rib_map.find(pr.id);
        if (it == m.rib_map.end()) return false;
        if (!rib_images.insert(it->second).second) return false;
        const Rib* tr = nullptr;
        for (const Rib& candidate : target.graph.ribs) {
            if (candidate.id == it->second) {
                tr = &candidate;
                break;
            }
        }
        if (!tr) return false;
        if (tr->sort != pr.sort) return false;
        const NodeId& tf = m.node_map.at(pr.from);
        const NodeId& tt = m.node_map.at(pr.to);
        bool endpoints = target.graph.directed
                             ? (tr->from == tf && tr->to == tt)
                             : ((tr->from == tf && tr->to == tt) ||
                                (tr->from == tt && tr->to == tf));
        if (!endpoints) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Random instances
// ---------------------------------------------------------------------------

struct RandomDiagramConfig {
    int min_nodes = 1;
    int max_nodes = 6;
    int max_ribs = 8; // total cap, spanning tree included
    bool directed = false;
    std::vector<std::string> alphabet = {"a", "b", "c"};
    std::vector<std::string> sorts = {"s1", "s2"};
    double variable_probability = 0.0; // chance a node is variable-labeled
};

/// A random connected diagram (spanning tree plus extra ribs). When
/// variable_probability is positive, variable labels "X0", "X1", ... are used
/// and their classes appended to `classes`.
inline Diagram random_connected_diagram(std::mt19937& rng, const RandomDiagramConfig& config,
                                        ClassMap* classes = nullptr) {
    std::uniform_int_distribution<int> node_count(config.min_nodes, config.max_nodes);
    int n = node_count(rng);
    Diagram d;
    d.graph.directed = config.directed;
    for (const std::string& s : config.alphabet) d.alphabet.insert(s);
    for (const std::string& s : config.sorts) d.graph.sorts.insert(s);

    auto random_symbol = [&]() {
        std::uniform_int_distribution<std::size_t> pick(0, config.alphabet.size() - 1);
        return config.alphabet[pick(rng)];
    };
    auto random_sort = [&]() {
        std::uniform_int_distribution<std::size_t> pick(0, config.sorts.size() - 1);
        return config.sorts[pick(rng)];
    };

    std::vector<NodeId> ids;
    std::uniform_real_distribution<double> chance(0.0, 1.0);
    int next_variable = 0;
    for (int i = 0; i < n; ++i) {
        NodeId id = "v" + std::to_string(i);
        d.graph.nodes.insert(id);
        if (classes && chance(rng) < config.variable_probability) {
            std::string variable = "X" + std::to_string(next_variable++);
            std::set<std::string> members;
            members.insert(random_symbol());
            if (chance(rng) < 0.5) members.insert(random_symbol());
            classes->emplace(variable, std::move(members));
            d.labeling.emplace(id, Label::variable(variable));
        } else {
            d.labeling.emplace(id, Label::symbol(random_symbol()));
        }
        ids.push_back(std::move(id));
    }

    int rib_count = 0;
    auto add_rib = [&](const NodeId& a, const NodeId& b) {
        bool flip = config.directed && chance(rng) < 0.5;
        d.graph.ribs.push_back(synd::make_rib(config.directed,
                                              "e" + std::to_string(rib_count++), flip ? b : a,
                                              flip ? a : b, random_sort()));
    };
    for (int i = 1; i < n; ++i) {
        std::uniform_int_distribution<int> parent(0, i - 1);
        add_rib(ids[parent(rng)], ids[i]);
    }
    if (n >= 2) {
        std::uniform_int_distribution<int> extra_count(0, config.max_ribs - (n - 1));
        int extras = extra_count(rng);
        std::uniform_int_distribution<int> pick(0, n - 1);
        for (int k = 0; k < extras; ++k) {
            int a = pick(rng);
            int b = pick(rng);
            if (a == b) continue; // no loops
            add_rib(ids[a], ids[b]);
        }
    }
    d.graph.normalize();
    return d;
}

// ---------------------------------------------------------------------------
// Derivation trees
// ---------------------------------------------------------------------------

struct TreeNode {
    std::string label;
    std::vector<TreeNode> children;

    auto operator<=>(const TreeNode&) const = default;
};

inline std::string render_tree(const TreeNode& t) {
    std::string out = "(" + t.label;
    for (const TreeNode& child : t.children) out += " " + render_tree(child);
    out += ")";
    return out;
}

inline std::size_t tree_size(const TreeNode& t) {
    std::size_t n = 1;
    for (const TreeNode& child : t.children) n += tree_size(child);
    return n;
}

namespace detail {

inline bool advance_odometer(std::vector<std::size_t>& pick,
                             const std::vector<std::vector<TreeNode>>& options) {
    std::size_t i = pick.size();
    while (i > 0) {
        --i;
        if (++pick[i] < options[i].size()) return true;
        pick[i] = 0;
    }
    return false;
}

} // namespace detail

/// Structural derivation-tree test, by recursion on the tree alone: leaves
/// are terminals, every internal node expands by a rule, the root is the
/// start symbol.
inline bool oracle_is_derivation(const TreeNode& t, const synd::Cfg& g) {
    auto recurse = [&](auto&& self, const TreeNode& node) -> bool {
        if (node.children.empty()) return g.terminals.count(node.label) > 0;
        if (!g.nonterminals.count(node.label)) return false;
        std::vector<std::string> rhs;
        for (const TreeNode& child : node.children) rhs.push_back(child.label);
        bool has_rule = false;
        for (const synd::CfgRule& rule : g.rules) {
            if (rule.lhs == node.label && rule.rhs == rhs) {
                has_rule = true;
                break;
            }
        }
        if (!has_rule) return false;
        for (const TreeNode& child : node.children) {
            if (!self(self, child)) return false;
        }
        return true;
    };
    return t.label == g.start && recurse(recurse, t);
}

/// All complete derivation trees of `symbol` whose edge depth is at most
/// `depth`.
inline std::vector<TreeNode> enumerate_complete_trees(const synd::Cfg& g,
                                                      const std::string& symbol, int depth) {
    if (g.terminals.count(symbol)) return {TreeNode{symbol, {}}};
    std::vector<TreeNode> out;
    if (depth == 0) return out;
    for (const synd::CfgRule& rule : g.rules) {
        if (rule.lhs != symbol) continue;
        std::vector<std::vector<TreeNode>> per_child;
        bool dead = false;
        for (const std::string& child : rule.rhs) {
            per_child.push_back(enumerate_complete_trees(g, child, depth - 1));
            if (per_child.back().empty()) {
                dead = true;
                break;
            }
        }
        if (dead) continue;
        std::vector<std::size_t> pick(per_child.size(), 0);
        do {
            TreeNode t{symbol, {}};
            for (std::size_t i = 0; i < per_child.size(); ++i) {
                t.children.push_back(per_child[i][pick[i]]);
            }
            out.push_back(std::move(t));
        } while (detail::advance_odometer(pick, per_child));
    }
    return out;
}

/// Trees where a nonterminal may also stay an unexpanded leaf (incomplete
/// derivations; never accepted).
inline std::vector<TreeNode> enumerate_partial_trees(const synd::Cfg& g, const std::string& symbol,
                                                     int depth) {
    std::vector<TreeNode> out;
    out.push_back(TreeNode{symbol, {}});
    if (g.terminals.count(symbol) || depth == 0) return out;
    for (const synd::CfgRule& rule : g.rules) {
        if (rule.lhs != symbol) continue;
        std::vector<std::vector<TreeNode>> per_child;
        for (const std::string& child : rule.rhs) {
            per_child.push_back(enumerate_partial_trees(g, child, depth - 1));
        }
        std::vector<std::size_t> pick(per_child.size(), 0);
        do {
            TreeNode t{symbol, {}};
            for (std::size_t i = 0; i < per_child.size(); ++i) {
                t.children.push_back(per_child[i][pick[i]]);
            }
            out.push_back(std::move(t));
        } while (detail::advance_odometer(pick, per_child));
    }
    return out;
}

/// One random single-edit mutation: relabel a node, add a leaf, or delete a
/// leaf.
inline TreeNode mutate_tree(std::mt19937& rng, TreeNode t,
                            const std::vector<std::string>& symbols) {
    std::vector<TreeNode*> nodes;
    auto collect = [&](auto&& self, TreeNode& node) -> void {
        nodes.push_back(&node);
        for (TreeNode& child : node.children) self(self, child);
    };
    collect(collect, t);

    std::uniform_int_distribution<std::size_t> pick_node(0, nodes.size() - 1);
    std::uniform_int_distribution<std::size_t> pick_symbol(0, symbols.size() - 1);
    std::uniform_int_distribution<int> pick_op(0, 2);
    int op = pick_op(rng);
    if (op == 2 && nodes.size() == 1) op = 0;

    if (op == 0) { // relabel
        TreeNode* node = nodes[pick_node(rng)];
        std::string fresh = symbols[pick_symbol(rng)];
        for (int guard = 0; guard < 8 && fresh == node->label; ++guard) {
            fresh = symbols[pick_symbol(rng)];
        }
        node->label = fresh;
    } else if (op == 1) { // add a leaf child
        TreeNode* node = nodes[pick_node(rng)];
        std::uniform_int_distribution<std::size_t> pick_pos(0, node->children.size());
        node->children.insert(node->children.begin() + pick_pos(rng),
                              TreeNode{symbols[pick_symbol(rng)], {}});
    } else { // delete a leaf
        std::vector<TreeNode*> parents;
        auto find_parents = [&](auto&& self, TreeNode& node) -> void {
            for (TreeNode& child : node.children) {
                if (child.children.empty()) {
                    parents.push_back(&node);
                    break;
                }
            }
            for (TreeNode& child : node.children) self(self, child);
        };
        find_parents(find_parents, t);
        if (parents.empty()) return t;
        std::uniform_int_distribution<std::size_t> pick_parent(0, parents.size() - 1);
        TreeNode* parent = parents[pick_parent(rng)];
        for (std::size_t i = 0; i < parent->children.size(); ++i) {
            if (parent->children[i].children.empty()) {
                parent->children.erase(parent->children.begin() + i);
                break;
            }
        }
    }
    return t;
}

// ---------------------------------------------------------------------------
// Ground expansion (the slow equivalent of binding-during-search)
// ---------------------------------------------------------------------------

/// Every ground instance of a diagram with variable labels: the cartesian
/// product of class assignments, substituted into the labels.
inline std::vector<std::pair<Diagram, std::map<std::string, std::string>>>
ground_instances(const Diagram& d, const ClassMap& classes) {
    std::vector<std::string> variables;
    for (const auto& [node, label] : d.labeling) {
        (void)node;
        if (label.is_variable() &&
            std::find(variables.begin(), variables.end(), label.name) == variables.end()) {
            variables.push_back(label.name);
        }
    }
    std::sort(variables.begin(), variables.end());

    std::vector<std::pair<Diagram, std::map<std::string, std::string>>> out;
    std::map<std::string, std::string> assignment;
    auto recurse = [&](auto&& self, std::size_t i) -> void {
        if (i == variables.size()) {
            Diagram ground = d;
            for (auto& [node, label] : ground.labeling) {
                (void)node;
                if (label.is_variable()) label = Label::symbol(assignment.at(label.name));
            }
            out.emplace_back(std::move(ground), assignment);
            return;
        }
        for (const std::string& symbol : classes.at(variables[i])) {
            assignment[variables[i]] = symbol;
            self(self, i + 1);
        }
        assignment.erase(variables[i]);
    };
    recurse(recurse, 0);
    return out;
}

/// Pre-expands every neighbourhood into its ground instances; the result has
/// no variables at all.
inline synd::NeighbourhoodGrammar expand_grammar(const synd::NeighbourhoodGrammar& g) {
    synd::NeighbourhoodGrammar out;
    out.directed = g.directed;
    out.alphabet = g.alphabet;
    out.sorts = g.sorts;
    out.restrictions = g.restrictions;
    for (const synd::Neighbourhood& n : g.neighbourhoods) {
        for (auto& [ground, assignment] : ground_instances(n.diagram, g.classes.classes)) {
            (void)assignment;
            synd::Neighbourhood instance;
            instance.diagram = std::move(ground);
            instance.center = n.center;
            instance.star_policy = n.star_policy;
            out.neighbourhoods.push_back(std::move(instance));
        }
    }
    return out;
}

} // namespace synd_test
