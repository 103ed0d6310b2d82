#include "floyd/grammar.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "floyd/errors.hpp"

namespace floyd {

void validate(const Grammar& g) {
    for (const auto& t : g.terminals)
        if (g.nonterminals.count(t))
            throw ValidationError("symbol '" + t + "' is both terminal and nonterminal");
    if (!g.nonterminals.count(g.axiom))
        throw ValidationError("axiom '" + g.axiom + "' is not a declared nonterminal");

    bool axiom_in_rhs = false;
    for (const auto& r : g.rules) {
        if (!g.nonterminals.count(r.lhs))
            throw ValidationError("rule lhs '" + r.lhs + "' is not a nonterminal");
        for (const auto& s : r.rhs) {
            if (s.is_terminal() && !g.terminals.count(s.name))
                throw ValidationError("undeclared terminal '" + s.name + "' in " + render_rule(r));
            if (s.is_nonterminal() && !g.nonterminals.count(s.name))
                throw ValidationError("undeclared nonterminal '" + s.name + "' in " + render_rule(r));
            if (s.is_nonterminal() && s.name == g.axiom) axiom_in_rhs = true;
        }
    }
    for (const auto& r : g.rules) {
        if (r.rhs.empty()) {
            if (r.lhs != g.axiom)
                throw ValidationError("empty rule with non-axiom lhs '" + r.lhs + "'");
            if (axiom_in_rhs)
                throw ValidationError("empty axiom rule while the axiom occurs in a rhs");
        }
    }
    for (size_t i = 0; i < g.rules.size(); ++i)
        for (size_t j = i + 1; j < g.rules.size(); ++j)
            if (g.rules[i] == g.rules[j])
                throw ValidationError("duplicate rule " + render_rule(g.rules[i]));
}

Grammar make_grammar(const std::set<std::string>& terminals, std::string axiom,
                     std::vector<Rule> rules) {
    Grammar g;
    g.terminals = terminals;
    g.axiom = std::move(axiom);
    g.rules = std::move(rules);
    g.nonterminals.insert(g.axiom);
    for (const auto& r : g.rules) {
        g.nonterminals.insert(r.lhs);
        for (const auto& s : r.rhs)
            if (s.is_nonterminal()) g.nonterminals.insert(s.name);
    }
    validate(g);
    return g;
}

bool is_operator_form(const Grammar& g) {
    for (const auto& r : g.rules)
        for (size_t i = 0; i + 1 < r.rhs.size(); ++i)
            if (r.rhs[i].is_nonterminal() && r.rhs[i + 1].is_nonterminal()) return false;
    return true;
}

bool is_invertible(const Grammar& g) {
    for (size_t i = 0; i < g.rules.size(); ++i)
        for (size_t j = i + 1; j < g.rules.size(); ++j)
            if (g.rules[i].rhs == g.rules[j].rhs && g.rules[i].lhs != g.rules[j].lhs)
                return false;
    return true;
}

bool is_fischer_normal_form(const Grammar& g) {
    if (!is_invertible(g)) return false;
    for (const auto& r : g.rules) {
        for (const auto& s : r.rhs)
            if (s.is_nonterminal() && s.name == g.axiom) return false;
        bool renaming = r.rhs.size() == 1 && r.rhs[0].is_nonterminal();
        if (renaming && r.lhs != g.axiom) return false;
    }
    return true;
}

ReduceResult reduce(const Grammar& g) {
    // Productive nonterminals: derive some terminal string.
    std::set<std::string> productive;
    bool grew = true;
    while (grew) {
        grew = false;
        for (const auto& r : g.rules) {
            if (productive.count(r.lhs)) continue;
            bool ok = true;
            for (const auto& s : r.rhs)
                if (s.is_nonterminal() && !productive.count(s.name)) { ok = false; break; }
            if (ok) { productive.insert(r.lhs); grew = true; }
        }
    }
    // Reachable from the axiom through rules whose symbols are all productive.
    std::set<std::string> reachable{g.axiom};
    grew = true;
    while (grew) {
        grew = false;
        for (const auto& r : g.rules) {
            if (!reachable.count(r.lhs) || !productive.count(r.lhs)) continue;
            bool ok = true;
            for (const auto& s : r.rhs)
                if (s.is_nonterminal() && !productive.count(s.name)) { ok = false; break; }
            if (!ok) continue;
            for (const auto& s : r.rhs)
                if (s.is_nonterminal() && reachable.insert(s.name).second) grew = true;
        }
    }

    ReduceResult out;
    out.axiom_productive = productive.count(g.axiom) > 0;
    Grammar h;
    h.terminals = g.terminals;
    h.axiom = g.axiom;
    h.nonterminals.insert(g.axiom);
    for (const auto& r : g.rules) {
        bool keep = out.axiom_productive && reachable.count(r.lhs) && productive.count(r.lhs);
        if (keep)
            for (const auto& s : r.rhs)
                if (s.is_nonterminal() && (!productive.count(s.name) || !reachable.count(s.name)))
                    keep = false;
        if (keep) {
            h.rules.push_back(r);
            h.nonterminals.insert(r.lhs);
            for (const auto& s : r.rhs)
                if (s.is_nonterminal()) h.nonterminals.insert(s.name);
        } else {
            out.removed.push_back(r);
        }
    }
    out.grammar = std::move(h);
    return out;
}

Grammar reverse_rules(const Grammar& g) {
    Grammar h = g;
    for (auto& r : h.rules) std::reverse(r.rhs.begin(), r.rhs.end());
    return h;
}

// --- text format -----------------------------------------------------------

namespace {

std::vector<std::string> split_tokens(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream ss(line);
    std::string t;
    while (ss >> t) out.push_back(t);
    return out;
}

std::string strip_comment(const std::string& line) {
    auto pos = line.find('#');
    return pos == std::string::npos ? line : line.substr(0, pos);
}

}  // namespace

Grammar parse_grammar(std::istream& in, const std::string& filename) {
    Grammar g;
    bool axiom_seen = false;
    struct RawRule { std::string lhs; std::vector<std::vector<std::string>> alts; int line; };
    std::vector<RawRule> raw;

    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto tokens = split_tokens(strip_comment(line));
        if (tokens.empty()) continue;
        if (tokens[0] == "%axiom") {
            if (tokens.size() != 2)
                throw ParseError(filename, lineno, "", "%axiom expects exactly one name");
            g.axiom = tokens[1];
            axiom_seen = true;
        } else if (tokens[0] == "%terminals") {
            for (size_t i = 1; i < tokens.size(); ++i) g.terminals.insert(tokens[i]);
        } else if (tokens[0][0] == '%') {
            throw ParseError(filename, lineno, tokens[0], "unknown directive");
        } else {
            if (tokens.size() < 2 || tokens[1] != "->")
                throw ParseError(filename, lineno, tokens.size() > 1 ? tokens[1] : tokens[0],
                                 "expected '<LHS> -> ...'");
            RawRule rr;
            rr.lhs = tokens[0];
            rr.line = lineno;
            rr.alts.emplace_back();
            for (size_t i = 2; i < tokens.size(); ++i) {
                if (tokens[i] == "|")
                    rr.alts.emplace_back();
                else
                    rr.alts.back().push_back(tokens[i]);
            }
            raw.push_back(std::move(rr));
        }
    }
    if (!axiom_seen) throw ParseError(filename, lineno, "", "missing %axiom directive");

    for (const auto& rr : raw) {
        g.nonterminals.insert(rr.lhs);
        for (const auto& alt : rr.alts)
            for (const auto& t : alt)
                if (t != "%empty" && !g.terminals.count(t)) g.nonterminals.insert(t);
    }
    g.nonterminals.insert(g.axiom);

    for (const auto& rr : raw) {
        if (g.terminals.count(rr.lhs))
            throw ParseError(filename, rr.line, rr.lhs, "terminal used as rule lhs");
        for (const auto& alt : rr.alts) {
            Rule r;
            r.lhs = rr.lhs;
            if (alt.empty())
                throw ParseError(filename, rr.line, "", "empty alternative; use %empty");
            if (!(alt.size() == 1 && alt[0] == "%empty")) {
                for (const auto& t : alt) {
                    if (t == "%empty")
                        throw ParseError(filename, rr.line, t, "%empty must stand alone");
                    r.rhs.push_back(g.terminals.count(t) ? Symbol::terminal(t)
                                                         : Symbol::nonterminal(t));
                }
            }
            g.rules.push_back(std::move(r));
        }
    }

    try {
        validate(g);
    } catch (const ValidationError& e) {
        throw ParseError(filename, lineno, "", e.what());
    }
    return g;
}

Grammar load_grammar(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path, 0, "", "cannot open file");
    return parse_grammar(in, path);
}

std::string render_rule(const Rule& r) {
    std::string out = r.lhs + " ->";
    if (r.rhs.empty()) return out + " %empty";
    for (const auto& s : r.rhs) out += " " + s.name;
    return out;
}

std::string render_grammar(const Grammar& g) {
    std::ostringstream out;
    out << "%axiom " << g.axiom << "\n%terminals";
    for (const auto& t : g.terminals) out << " " << t;
    out << "\n";
    for (const auto& r : g.rules) out << render_rule(r) << "\n";
    return out.str();
}

void save_grammar(const Grammar& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write file " + path);
    out << render_grammar(g);
}

}  // namespace floyd
