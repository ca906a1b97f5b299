#pragma once

#include <algorithm>
#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "synd/engine.hpp"
#include "synd/io.hpp"

// Command-line driver. Exit codes: 0 the diagram is correct (or the command
// succeeded), 1 the inputs were usable but the diagram is incorrect, 2 the
// inputs or the invocation were unusable. Nothing is written to the error
// stream on exits 0 and 1.

namespace synd::cli {

inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"syntax diagram validation with neighbourhood grammars", "synd"};
    app.require_subcommand(1);

    std::string check_grammar;
    std::string check_diagram;
    std::string check_format = "text";
    std::size_t check_witnesses = 1;
    CLI::App* cmd_check = app.add_subcommand("check", "Validate a diagram against a grammar");
    cmd_check->add_option("--grammar", check_grammar, "grammar file")->required();
    cmd_check->add_option("--diagram", check_diagram, "diagram file")->required();
    cmd_check->add_option("--format", check_format, "report format")
        ->check(CLI::IsMember({"text", "structured"}));
    cmd_check->add_option("--witnesses", check_witnesses,
                          "per-node witness cap, 0 reports correctness only (default 1)");

    std::string embed_pattern;
    std::string embed_target;
    std::string embed_anchor;
    CLI::App* cmd_embed =
        app.add_subcommand("embed", "Enumerate inclusions of a pattern diagram in a target");
    cmd_embed->add_option("--pattern", embed_pattern, "pattern diagram file")->required();
    cmd_embed->add_option("--target", embed_target, "target diagram file")->required();
    cmd_embed->add_option("--anchor", embed_anchor, "fix a correspondence: pnode=tnode");

    CLI::App* cmd_gen = app.add_subcommand("gen", "Compile a grammar from another formalism");
    cmd_gen->require_subcommand(1);
    std::string gen_input;
    std::string gen_output;
    CLI::App* cmd_gen_chain =
        cmd_gen->add_subcommand("chain", "From a string-neighbourhood spec");
    cmd_gen_chain->add_option("--spec", gen_input, "string spec file")->required();
    cmd_gen_chain->add_option("-o,--output", gen_output, "grammar file to write")->required();
    CLI::App* cmd_gen_cfg = cmd_gen->add_subcommand("cfg", "From a context-free grammar");
    cmd_gen_cfg->add_option("--rules", gen_input, "rule file, one 'LHS -> X1 X2 ...' per line")
        ->required();
    cmd_gen_cfg->add_option("-o,--output", gen_output, "grammar file to write")->required();
    CLI::App* cmd_gen_chem = cmd_gen->add_subcommand("chem", "From a chemical valency table");
    cmd_gen_chem->add_option("--valency", gen_input, "valency table file")->required();
    cmd_gen_chem->add_option("-o,--output", gen_output, "grammar file to write")->required();
    CLI::App* cmd_gen_prolog = cmd_gen->add_subcommand("prolog", "From a mini-Prolog program");
    cmd_gen_prolog->add_option("--program", gen_input, "program file")->required();
    cmd_gen_prolog->add_option("-o,--output", gen_output, "grammar file to write")->required();

    CLI::App* cmd_encode = app.add_subcommand("encode", "Encode text as a diagram");
    cmd_encode->require_subcommand(1);
    std::string encode_text;
    std::string encode_cfg;
    std::string encode_tree;
    std::string encode_output;
    CLI::App* cmd_encode_chain = cmd_encode->add_subcommand("chain", "Encode a symbol chain");
    cmd_encode_chain->add_option("--text", encode_text, "the chain, e.g. 'aba'")->required();
    cmd_encode_chain->add_option("-o,--output", encode_output, "diagram file to write")->required();
    CLI::App* cmd_encode_tree = cmd_encode->add_subcommand("tree", "Encode a bracketed tree");
    cmd_encode_tree->add_option("--cfg", encode_cfg, "rule file naming the tree's symbols")
        ->required();
    cmd_encode_tree->add_option("--tree", encode_tree, "file with a tree like (S (a) (b))")
        ->required();
    cmd_encode_tree->add_option("-o,--output", encode_output, "diagram file to write")->required();

    try {
        std::reverse(args.begin(), args.end()); // CLI11 consumes from the back
        app.parse(std::move(args));
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return 2;
    }

    try {
        if (cmd_check->parsed()) {
            NeighbourhoodGrammar g = load_grammar(check_grammar);
            Diagram d = load_diagram(check_diagram);
            CheckReport report = check(g, d, CheckOptions{check_witnesses});
            if (check_format == "structured") {
                out << canonical_text(report_to_json(report));
            } else {
                out << report_to_text(report);
            }
            return report.correct ? 0 : 1;
        }
        if (cmd_embed->parsed()) {
            Diagram pattern = load_diagram(embed_pattern);
            Diagram target = load_diagram(embed_target);
            MatchQuery q;
            q.pattern = &pattern;
            q.target = &target;
            if (!embed_anchor.empty()) {
                auto eq = embed_anchor.find('=');
                if (eq == std::string::npos) {
                    throw ParseError("anchor must have the form pnode=tnode");
                }
                q.anchor = std::make_pair(embed_anchor.substr(0, eq), embed_anchor.substr(eq + 1));
            }
            std::vector<InclusionMapping> inclusions = enumerate_inclusions(q);
            json output;
            output["count"] = inclusions.size();
            json list = json::array();
            for (const InclusionMapping& m : inclusions) {
                json entry;
                entry["binding"] = json(m.binding);
                entry["node_map"] = json(m.node_map);
                entry["rib_map"] = json(m.rib_map);
                list.push_back(std::move(entry));
            }
            output["inclusions"] = std::move(list);
            out << canonical_text(output);
            return 0;
        }
        if (cmd_gen_chain->parsed()) {
            save_grammar(compile_string_grammar(load_string_spec(gen_input)), gen_output);
            return 0;
        }
        if (cmd_gen_cfg->parsed()) {
            save_grammar(compile_cfg(load_cfg(gen_input)), gen_output);
            return 0;
        }
        if (cmd_gen_chem->parsed()) {
            save_grammar(compile_valency(load_valency_table(gen_input)), gen_output);
            return 0;
        }
        if (cmd_gen_prolog->parsed()) {
            save_grammar(compile_prolog(load_prolog(gen_input)), gen_output);
            return 0;
        }
        if (cmd_encode_chain->parsed()) {
            std::vector<SymbolName> symbols = tokenize_chain(encode_text);
            std::set<SymbolName> alphabet(symbols.begin(), symbols.end());
            save_diagram(chain_to_diagram(symbols, alphabet), encode_output);
            return 0;
        }
        if (cmd_encode_tree->parsed()) {
            Cfg cfg = load_cfg(encode_cfg);
            save_diagram(tree_to_diagram(read_text_file(encode_tree), cfg), encode_output);
            return 0;
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    err << "error: no command\n";
    return 2;
}

} // namespace synd::cli
