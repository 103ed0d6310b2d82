#include "floyd/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "floyd/errors.hpp"
#include "floyd/grammar.hpp"
#include "floyd/op_parser.hpp"
#include "floyd/oracle.hpp"
#include "floyd/precedence.hpp"
#include "floyd/transforms.hpp"
#include "floyd/vpda.hpp"

namespace floyd {

namespace {

using json = nlohmann::ordered_json;

Word tokenize(const std::string& input) {
    std::istringstream ss(input);
    Word w;
    std::string t;
    while (ss >> t) w.push_back(t);
    return w;
}

enum class FileKind { Grammar, Vpda, Matrix };

FileKind sniff(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path, 0, "", "cannot open file");
    std::string line;
    while (std::getline(in, line)) {
        auto pos = line.find('#');
        if (pos != std::string::npos) line = line.substr(0, pos);
        std::istringstream ss(line);
        std::string head;
        if (!(ss >> head)) continue;
        if (head == "%axiom" || head == "%terminals") return FileKind::Grammar;
        if (head == "%calls" || head == "%returns" || head == "%internals" ||
            head == "%states" || head == "%initial" || head == "%final" || head == "%stack")
            return FileKind::Vpda;
        return FileKind::Matrix;
    }
    throw ParseError(path, 0, "", "empty file");
}

std::map<std::string, std::string> parse_pairing(const std::string& spec) {
    std::map<std::string, std::string> pairing;
    std::istringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto colon = item.find(':');
        if (colon == std::string::npos || colon == 0 || colon + 1 == item.size())
            throw Error("bad --pairing entry '" + item + "', expected call:return");
        pairing[item.substr(0, colon)] = item.substr(colon + 1);
    }
    return pairing;
}

json matrix_json(const PrecedenceMatrix& m) {
    json cells = json::array();
    for (const auto& a : m.alphabet)
        for (const auto& b : m.alphabet) {
            RelSet cell = m.at(a, b);
            if (cell.empty()) continue;
            std::string rels;
            for (auto r : cell.values()) rels += rel_glyph(r);
            cells.push_back({{"left", a}, {"right", b}, {"relations", rels}});
        }
    return {{"alphabet", m.alphabet}, {"cells", cells}};
}

json partition_json(const VpPartition& p) {
    return {{"calls", p.calls}, {"returns", p.returns}, {"internals", p.internals}};
}

json tree_json(const ParseNode& n) {
    if (n.is_leaf) return {{"leaf", n.terminal}, {"span", {n.begin, n.end}}};
    json kids = json::array();
    for (const auto& c : n.children) kids.push_back(tree_json(c));
    return {{"labels", n.labels}, {"span", {n.begin, n.end}}, {"children", kids}};
}

json words_json(const std::set<Word>& words) {
    std::vector<Word> sorted(words.begin(), words.end());
    std::sort(sorted.begin(), sorted.end(), shortlex_less);
    json out = json::array();
    for (const auto& w : sorted) out.push_back(w);
    return out;
}

void print_words(std::ostream& out, const std::set<Word>& words) {
    std::vector<Word> sorted(words.begin(), words.end());
    std::sort(sorted.begin(), sorted.end(), shortlex_less);
    for (const auto& w : sorted) out << render_word(w) << "\n";
}

std::set<Word> bounded_language_of_file(const std::string& path, int max_len) {
    switch (sniff(path)) {
        case FileKind::Grammar: return enumerate_language(load_grammar(path), max_len);
        case FileKind::Vpda: return enumerate_accepted(load_vpda(path), max_len);
        case FileKind::Matrix: throw Error(path + ": need a grammar or automaton file");
    }
    return {};
}

int cmd_check(const std::string& file, bool balanced, const std::string& pairing_spec,
              bool as_json, std::ostream& out) {
    Grammar g = load_grammar(file);
    bool op_form = is_operator_form(g);
    if (!op_form) {
        if (as_json)
            out << json{{"command", "check"}, {"file", file}, {"operator_form", false}}.dump(2)
                << "\n";
        else
            out << "not an operator grammar\n";
        return 1;
    }
    auto opm = build_opm(g);
    int relations = 0;
    for (const auto& a : opm.matrix.alphabet)
        for (const auto& b : opm.matrix.alphabet) relations += opm.matrix.at(a, b).size();

    json j{{"command", "check"}, {"file", file}, {"operator_form", true},
           {"relations", relations}, {"conflict_free", opm.floyd()}, {"floyd", opm.floyd()}};
    if (!as_json) {
        out << "operator form: yes\n";
        out << "relations: " << relations << "\n";
        for (const auto& a : opm.matrix.alphabet)
            for (const auto& b : opm.matrix.alphabet)
                for (auto r : opm.matrix.at(a, b).values())
                    out << "  " << a << " " << rel_glyph(r) << " " << b << "\n";
        out << "conflicts: " << opm.conflicts.size() << "\n";
        for (const auto& c : opm.conflicts) {
            out << "  cell (" << c.left << ", " << c.right << ") = " << c.relations.render() << "\n";
            for (const auto& w : c.witnesses) out << "    " << w << "\n";
        }
        out << "floyd grammar: " << (opm.floyd() ? "yes" : "no") << "\n";
    } else {
        json cj = json::array();
        for (const auto& c : opm.conflicts)
            cj.push_back({{"left", c.left}, {"right", c.right},
                          {"relations", c.relations.render()}, {"witnesses", c.witnesses}});
        j["conflicts"] = cj;
    }

    bool verdict = opm.floyd();
    if (balanced) {
        auto part = opm.floyd() ? classify_vp(opm.matrix) : std::nullopt;
        if (!part) {
            if (!as_json) out << "balanced: not a VP-matrix\n";
            else j["balanced"] = {{"ok", false}, {"reason", "not a VP-matrix"}};
            verdict = false;
        } else {
            auto bc = check_balanced_restrictions(g, *part, parse_pairing(pairing_spec));
            if (!as_json) {
                out << "balanced: " << (bc.ok ? "yes" : "no") << "\n";
                for (const auto& v : bc.violations) out << "  " << v << "\n";
            } else {
                j["balanced"] = {{"ok", bc.ok}, {"violations", bc.violations}};
            }
            verdict = verdict && bc.ok;
        }
    }
    if (as_json) out << j.dump(2) << "\n";
    return verdict ? 0 : 1;
}

int cmd_equiv(const std::string& f1, const std::string& f2, int max_len, bool as_json,
              std::ostream& out) {
    auto l1 = bounded_language_of_file(f1, max_len);
    auto l2 = bounded_language_of_file(f2, max_len);
    std::vector<Word> diff;
    for (const auto& w : l1)
        if (!l2.count(w)) diff.push_back(w);
    for (const auto& w : l2)
        if (!l1.count(w)) diff.push_back(w);
    std::sort(diff.begin(), diff.end(), shortlex_less);
    if (diff.empty()) {
        if (as_json)
            out << json{{"command", "equiv"}, {"equivalent", true}, {"max_len", max_len},
                        {"strings", l1.size()}}.dump(2) << "\n";
        else
            out << "equivalent up to length " << max_len << " (" << l1.size() << " strings)\n";
        return 0;
    }
    const Word& w = diff.front();
    bool in1 = l1.count(w) > 0;
    if (as_json)
        out << json{{"command", "equiv"}, {"equivalent", false},
                    {"first_divergence", {{"string", w}, {"in_first", in1}, {"in_second", !in1}}}}
                   .dump(2)
            << "\n";
    else
        out << "divergent: " << render_word(w) << " in " << (in1 ? f1 : f2) << " only\n";
    return 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"operator precedence grammar and visibly pushdown automaton toolkit"};
    app.require_subcommand(1);

    std::string file, file2, output, input, pairing;
    int max_len = 6;
    bool as_json = false, balanced = false;

    auto add_common = [&](CLI::App* cmd, bool with_file = true) {
        if (with_file) cmd->add_option("file", file, "input file")->required();
        cmd->add_flag("--json", as_json, "machine-readable output");
        return cmd;
    };

    auto* c_check = add_common(app.add_subcommand("check", "conflict report and Floyd verdict"));
    c_check->add_flag("--balanced", balanced, "also check balanced-grammar restrictions");
    c_check->add_option("--pairing", pairing, "call:return pairs, comma separated");
    auto* c_opm = add_common(app.add_subcommand("opm", "print the precedence matrix"));
    auto* c_classify = add_common(app.add_subcommand("classify", "VP partition of the matrix"));
    auto* c_parse = add_common(app.add_subcommand("parse", "precedence parse of a string"));
    c_parse->add_option("--input", input, "whitespace-separated tokens")->required();
    auto* c_trace = add_common(app.add_subcommand("trace", "relation chain of a string"));
    c_trace->add_option("--input", input, "whitespace-separated tokens")->required();
    auto* c_enum = add_common(app.add_subcommand("enum", "bounded language"));
    c_enum->add_option("--max-len", max_len, "length bound")->required();
    auto* c_run = add_common(app.add_subcommand("run", "reachable configurations"));
    c_run->add_option("--input", input, "whitespace-separated tokens")->required();
    auto* c_fact = add_common(app.add_subcommand("factorize", "canonical y c0 z decomposition"));
    c_fact->add_option("--input", input, "whitespace-separated tokens")->required();
    auto* c_tovpda = add_common(app.add_subcommand("to-vpda", "grammar to automaton"));
    c_tovpda->add_option("-o,--output", output, "output path")->required();
    auto* c_fromvpda = add_common(app.add_subcommand("from-vpda", "automaton to grammar"));
    c_fromvpda->add_option("-o,--output", output, "output path")->required();
    auto* c_reverse = add_common(app.add_subcommand("reverse", "specularly reversed grammar"));
    c_reverse->add_option("-o,--output", output, "output path")->required();
    auto* c_equiv = add_common(app.add_subcommand("equiv", "compare bounded languages"));
    c_equiv->add_option("file2", file2, "second file")->required();
    c_equiv->add_option("--max-len", max_len, "length bound")->required();

    std::vector<std::string> argv = args;
    std::reverse(argv.begin(), argv.end());
    try {
        app.parse(argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {  // --help
            out << app.help();
            return 0;
        }
        err << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (app.got_subcommand(c_check)) return cmd_check(file, balanced, pairing, as_json, out);

        if (app.got_subcommand(c_opm)) {
            auto opm = build_opm(load_grammar(file));
            if (as_json)
                out << json{{"command", "opm"}, {"matrix", matrix_json(opm.matrix)},
                            {"conflict_free", opm.floyd()}}.dump(2) << "\n";
            else
                out << render_opm(opm.matrix);
            return opm.floyd() ? 0 : 1;
        }

        if (app.got_subcommand(c_classify)) {
            PrecedenceMatrix m = sniff(file) == FileKind::Matrix ? load_opm(file)
                                                                 : build_opm(load_grammar(file)).matrix;
            if (!m.conflict_free()) {
                if (as_json) out << json{{"command", "classify"}, {"vp_matrix", false},
                                         {"reason", "conflicting matrix"}}.dump(2) << "\n";
                else out << "not a VP-matrix (conflicting cells)\n";
                return 1;
            }
            auto part = classify_vp(m);
            if (!part) {
                if (as_json)
                    out << json{{"command", "classify"}, {"vp_matrix", false}}.dump(2) << "\n";
                else
                    out << "not a VP-matrix\n";
                return 1;
            }
            if (as_json) {
                out << json{{"command", "classify"}, {"vp_matrix", true},
                            {"partition", partition_json(*part)}}.dump(2) << "\n";
            } else {
                auto line = [&](const char* name, const std::set<std::string>& s) {
                    out << name;
                    for (const auto& t : s) out << " " << t;
                    out << "\n";
                };
                line("%calls", part->calls);
                line("%returns", part->returns);
                line("%internals", part->internals);
            }
            return 0;
        }

        if (app.got_subcommand(c_parse)) {
            Grammar g = load_grammar(file);
            Word w = tokenize(input);
            auto res = parse(g, w);
            if (as_json) {
                json j{{"command", "parse"}, {"accept", res.accept}};
                if (!res.accept) j["reason"] = res.detail;
                if (res.root) j["tree"] = tree_json(*res.root);
                out << j.dump(2) << "\n";
            } else {
                out << (res.accept ? "accept" : "reject") << "\n";
                if (!res.accept && !res.detail.empty()) out << res.detail << "\n";
                if (res.root) out << render_tree(*res.root);
            }
            return res.accept ? 0 : 1;
        }

        if (app.got_subcommand(c_trace)) {
            PrecedenceMatrix m = sniff(file) == FileKind::Matrix ? load_opm(file)
                                                                 : build_opm(load_grammar(file)).matrix;
            auto links = precedence_trace(m, tokenize(input));
            std::string line = render_trace(links);
            if (as_json) {
                json steps = json::array();
                for (const auto& l : links)
                    steps.push_back({{"left", l.left},
                                     {"rel", l.rel ? std::string(1, rel_glyph(*l.rel)) : "?"},
                                     {"right", l.right}});
                out << json{{"command", "trace"}, {"line", line}, {"steps", steps}}.dump(2) << "\n";
            } else {
                out << line << "\n";
            }
            return 0;
        }

        if (app.got_subcommand(c_enum)) {
            auto words = bounded_language_of_file(file, max_len);
            if (as_json)
                out << json{{"command", "enum"}, {"max_len", max_len},
                            {"strings", words_json(words)}}.dump(2) << "\n";
            else
                print_words(out, words);
            return 0;
        }

        if (app.got_subcommand(c_run)) {
            Vpda a = load_vpda(file);
            auto configs = run(a, tokenize(input));
            if (as_json) {
                json arr = json::array();
                for (const auto& c : configs) arr.push_back({{"state", c.state}, {"stack", c.stack}});
                out << json{{"command", "run"}, {"configurations", arr}}.dump(2) << "\n";
            } else {
                for (const auto& c : configs) out << render_configuration(c) << "\n";
            }
            return configs.empty() ? 1 : 0;
        }

        if (app.got_subcommand(c_fact)) {
            Vpda a = load_vpda(file);
            auto f = factorize_canonical(a.alphabet, tokenize(input));
            if (as_json) {
                json parts = json::array();
                for (const auto& yp : f.y_parts) {
                    parts.push_back({{"u", yp.u}});
                    if (!yp.w.empty()) parts.back()["w"] = yp.w;
                }
                json j{{"command", "factorize"}, {"y_parts", parts}};
                if (f.c0) {
                    j["c0"] = *f.c0;
                    j["v_parts"] = f.v_parts;
                    j["z_calls"] = f.z_calls;
                }
                out << j.dump(2) << "\n";
            } else {
                out << render_factorization(f);
            }
            return 0;
        }

        if (app.got_subcommand(c_tovpda)) {
            Grammar g = load_grammar(file);
            auto [a, rep] = fg_to_vpda(g);
            save_vpda(a, output);
            if (as_json)
                out << json{{"command", "to-vpda"}, {"output", output},
                            {"transitions", rep.final_count},
                            {"partition", partition_json(*rep.partition)}}.dump(2) << "\n";
            else
                out << rep.render();
            return 0;
        }

        if (app.got_subcommand(c_fromvpda)) {
            Vpda a = load_vpda(file);
            auto [g, rep] = vpda_to_fg(a);
            save_grammar(g, output);
            if (as_json)
                out << json{{"command", "from-vpda"}, {"output", output},
                            {"rules", rep.final_count}, {"conflict_free", rep.conflict_free},
                            {"vp_matrix", rep.vp_matrix}}.dump(2) << "\n";
            else
                out << rep.render();
            return 0;
        }

        if (app.got_subcommand(c_reverse)) {
            Grammar g = load_grammar(file);
            auto [rev, matrix] = reverse_fg(g);
            save_grammar(rev, output);
            if (as_json)
                out << json{{"command", "reverse"}, {"output", output},
                            {"matrix", matrix_json(matrix)}}.dump(2) << "\n";
            else
                out << render_opm(matrix);
            return 0;
        }

        if (app.got_subcommand(c_equiv)) return cmd_equiv(file, file2, max_len, as_json, out);
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const NotVpMatrix& e) {
        err << e.what() << "\n";
        return 1;
    } catch (const NotFloyd& e) {
        err << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    err << "error: no command\n";
    return 2;
}

}  // namespace floyd
