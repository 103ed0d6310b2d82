// Context-free grammar representation, structural predicates and the
// line-oriented grammar text format.
//
// Grammars are plain immutable values. Terminals and nonterminals are
// whitespace-free tokens drawn from disjoint name spaces. The only empty
// rule permitted is axiom -> epsilon, and then only when the axiom occurs
// in no right part.
#ifndef FLOYD_GRAMMAR_HPP_
#define FLOYD_GRAMMAR_HPP_

#include <iosfwd>
#include <set>
#include <string>
#include <vector>

namespace floyd {

struct Symbol {
    enum class Kind { Terminal, Nonterminal };
    Kind kind;
    std::string name;

    static Symbol terminal(std::string t) { return {Kind::Terminal, std::move(t)}; }
    static Symbol nonterminal(std::string n) { return {Kind::Nonterminal, std::move(n)}; }
    bool is_terminal() const { return kind == Kind::Terminal; }
    bool is_nonterminal() const { return kind == Kind::Nonterminal; }

    friend bool operator==(const Symbol&, const Symbol&) = default;
    friend auto operator<=>(const Symbol&, const Symbol&) = default;
};

struct Rule {
    std::string lhs;
    std::vector<Symbol> rhs;  // empty = epsilon rule

    friend bool operator==(const Rule&, const Rule&) = default;
    friend auto operator<=>(const Rule&, const Rule&) = default;
};

struct Grammar {
    std::set<std::string> terminals;
    std::set<std::string> nonterminals;
    std::vector<Rule> rules;
    std::string axiom;

    friend bool operator==(const Grammar&, const Grammar&) = default;
};

// Throws ValidationError unless all invariants hold: disjoint name spaces,
// declared symbols only, axiom declared, no duplicate rules, epsilon rule
// only as axiom -> epsilon with the axiom absent from every rhs.
void validate(const Grammar& g);

// Convenience constructor used by tests and the transforms: builds a grammar
// from rules, inferring the nonterminal set, and validates it.
Grammar make_grammar(const std::set<std::string>& terminals, std::string axiom,
                     std::vector<Rule> rules);

// True iff no rule rhs contains two adjacent nonterminals.
bool is_operator_form(const Grammar& g);

// True iff right parts are pairwise distinct across rules.
bool is_invertible(const Grammar& g);

// Invertible, the axiom occurs in no rhs, and every renaming rule has the
// axiom as left part.
bool is_fischer_normal_form(const Grammar& g);

struct ReduceResult {
    Grammar grammar;            // only reachable and productive rules
    bool axiom_productive;      // false = language is empty, rule set is empty
    std::vector<Rule> removed;  // rules dropped, in original order
};

// Removes rules that are unreachable from the axiom or mention an
// unproductive nonterminal. Language-preserving and idempotent.
ReduceResult reduce(const Grammar& g);

// Reverses every rule rhs; an involution.
Grammar reverse_rules(const Grammar& g);

// --- text format -----------------------------------------------------------
//
//   # comment
//   %axiom S
//   %terminals b c d e f
//   S -> A | B | C
//   A -> b A c | b c
//   X -> %empty
//
// Symbols not listed under %terminals are nonterminals.

Grammar parse_grammar(std::istream& in, const std::string& filename);
Grammar load_grammar(const std::string& path);
std::string render_grammar(const Grammar& g);
void save_grammar(const Grammar& g, const std::string& path);

// One-line rendering of a rule, e.g. "A -> b A c".
std::string render_rule(const Rule& r);

}  // namespace floyd

#endif  // FLOYD_GRAMMAR_HPP_
