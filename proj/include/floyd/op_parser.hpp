// Precedence-driven shift-reduce recognition for Floyd grammars.
//
// The driver is the classic one: compare the topmost stack terminal with the
// lookahead through the OPM; shift on < or =, reduce on >. A handle is the
// stack segment fenced by the last <-shifted terminal (plus the node sitting
// directly below it), with = between its inner terminals. Reductions label
// nodes with the set of every nonterminal whose rule matches the handle, so
// non-invertible grammars parse deterministically; renaming rules take part
// only through label-set closure, never as reduction steps.
#ifndef FLOYD_OP_PARSER_HPP_
#define FLOYD_OP_PARSER_HPP_

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "floyd/oracle.hpp"
#include "floyd/precedence.hpp"

namespace floyd {

// Delimiters used in traces.
inline const std::string kLeftDelim = "|-";
inline const std::string kRightDelim = "-|";

struct ParseNode {
    bool is_leaf = false;
    std::string terminal;           // leaf only
    std::set<std::string> labels;   // internal nodes: candidate nonterminals
    std::vector<ParseNode> children;
    std::size_t begin = 0, end = 0;  // token span [begin, end)

    // Leaves in order; equals the parsed input for the root of an accepted parse.
    Word frontier() const;
};

struct TraceEvent {
    enum class Kind { Compare, Shift, Reduce };
    Kind kind;
    // Compare: left rel right (delimiters rendered as |- and -|).
    std::string left, right;
    std::optional<PrecRel> rel;  // empty = precedence gap
    // Shift
    std::string shifted;
    // Reduce
    std::size_t handle_len = 0;  // symbols in the handle, nodes included
    std::set<std::string> labels;
};

using ParseTrace = std::vector<TraceEvent>;

enum class RejectReason { None, PrecedenceGap, NoMatchingRule, BadResidue };

struct ParseResult {
    bool accept = false;
    RejectReason reason = RejectReason::None;
    std::optional<ParseNode> root;
    ParseTrace trace;
    std::string detail;
};

// Precedence parser prepared once per grammar: matrix, renaming closure and
// rule index are built in the constructor (throws NotFloyd on conflicts).
class OpParser {
public:
    explicit OpParser(const Grammar& g);
    ParseResult parse(const Word& w) const;
    const PrecedenceMatrix& matrix() const { return matrix_; }

private:
    Grammar g_;
    PrecedenceMatrix matrix_;
    std::map<std::string, std::set<std::string>> ancestors_;
    bool axiom_epsilon_ = false;
};

// One-shot convenience over OpParser. The empty word is accepted iff
// axiom -> epsilon.
ParseResult parse(const Grammar& g, const Word& w);

// Relation chain between consecutive letters of |- w -|; delimiter relations
// are fixed, inner ones come from m. Gaps are reported in place, not thrown.
struct TraceLink {
    std::string left, right;
    std::optional<PrecRel> rel;
};
std::vector<TraceLink> precedence_trace(const PrecedenceMatrix& m, const Word& w);

// One line, letters interleaved with relation glyphs:  |-<s>c<s>r>-|
// Gaps render as '?'.
std::string render_trace(const std::vector<TraceLink>& links);

// Indented tree rendering used by the CLI.
std::string render_tree(const ParseNode& n);

}  // namespace floyd

#endif  // FLOYD_OP_PARSER_HPP_
