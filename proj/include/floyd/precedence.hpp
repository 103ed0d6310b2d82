// Operator precedence relations, matrices, and the VP-matrix machinery:
// left/right terminal sets, OPM construction with conflict reporting,
// matrix algebra, the total VP matrix of a partitioned alphabet,
// partition recovery, and the balanced-grammar restriction checks.
#ifndef FLOYD_PRECEDENCE_HPP_
#define FLOYD_PRECEDENCE_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "floyd/grammar.hpp"

namespace floyd {

// The three operator precedence relations, ordered for canonical printing.
enum class PrecRel : std::uint8_t { Yields = 0, Equal = 1, Takes = 2 };  // <  =  >

char rel_glyph(PrecRel r);                       // '<' '=' '>'
std::optional<PrecRel> rel_from_glyph(char c);

// Small set of PrecRel values.
class RelSet {
public:
    RelSet() = default;
    explicit RelSet(PrecRel r) { insert(r); }
    void insert(PrecRel r) { bits_ |= mask(r); }
    bool contains(PrecRel r) const { return bits_ & mask(r); }
    bool empty() const { return bits_ == 0; }
    int size() const;
    bool subset_of(RelSet o) const { return (bits_ & ~o.bits_) == 0; }
    RelSet united(RelSet o) const { RelSet s; s.bits_ = bits_ | o.bits_; return s; }
    std::vector<PrecRel> values() const;  // in canonical order
    std::string render() const;           // "<", "=", ">", ".", or "!<>!" style

    friend bool operator==(RelSet, RelSet) = default;

private:
    static std::uint8_t mask(PrecRel r) { return static_cast<std::uint8_t>(1u << static_cast<int>(r)); }
    std::uint8_t bits_ = 0;
};

struct PrecedenceMatrix {
    std::vector<std::string> alphabet;  // sorted, duplicate-free
    // cells indexed row-major by alphabet position
    std::vector<RelSet> cells;

    static PrecedenceMatrix over(const std::set<std::string>& alphabet);
    int index(const std::string& token) const;  // -1 when absent
    RelSet at(const std::string& a, const std::string& b) const;  // empty when absent
    void add(const std::string& a, const std::string& b, PrecRel r);
    bool conflict_free() const;

    friend bool operator==(const PrecedenceMatrix&, const PrecedenceMatrix&) = default;
};

// Cellwise union over the union alphabet; absent cells count as empty.
PrecedenceMatrix matrix_union(const PrecedenceMatrix& m1, const PrecedenceMatrix& m2);
// Cellwise containment, absent cells empty.
bool matrix_subset(const PrecedenceMatrix& m1, const PrecedenceMatrix& m2);
// True iff the union is conflict-free.
bool compatible(const PrecedenceMatrix& m1, const PrecedenceMatrix& m2);

// --- terminal sets and OPM construction -------------------------------------

// Least fixpoint of: a in L(A) if some rule A -> B a alpha with B a
// nonterminal or absent; L(A) includes L(B) when a rule A -> B alpha exists.
std::set<std::string> left_terminal_set(const Grammar& g, const std::string& nt);
std::set<std::string> right_terminal_set(const Grammar& g, const std::string& nt);

// L and R of a symbol string, computed by extending g with a fresh rule.
std::pair<std::set<std::string>, std::set<std::string>>
terminal_sets_of_string(const Grammar& g, const std::vector<Symbol>& beta);

struct Conflict {
    std::string left, right;
    RelSet relations;
    // For every relation in the cell, the rules that induced it.
    std::vector<std::string> witnesses;
};

struct OpmResult {
    PrecedenceMatrix matrix;
    std::vector<Conflict> conflicts;  // empty iff g is a Floyd grammar
    // provenance: (a, b, rel) -> rendered rules that induced the relation
    std::map<std::tuple<std::string, std::string, PrecRel>, std::vector<std::string>> witnesses;

    bool floyd() const { return conflicts.empty(); }
};

// The three defining clauses: a = b from A -> ... a B b ... (B optional);
// a < b from A -> ... a D ... with b in L(D); a > b from A -> ... D b ...
// with a in R(D). Throws NotOperatorForm.
OpmResult build_opm(const Grammar& g);

// --- VP matrices -------------------------------------------------------------

struct VpPartition {
    std::set<std::string> calls, returns, internals;

    std::set<std::string> alphabet() const;
    bool is_call(const std::string& t) const { return calls.count(t) > 0; }
    bool is_return(const std::string& t) const { return returns.count(t) > 0; }
    bool is_internal(const std::string& t) const { return internals.count(t) > 0; }

    friend bool operator==(const VpPartition&, const VpPartition&) = default;
};

void validate(const VpPartition& p);  // pairwise disjoint

// Row of a call: < on calls and internals, = on returns.
// Rows of returns and internals: > everywhere.
PrecedenceMatrix total_vp_matrix(const VpPartition& p);

// A partition p with m contained in total_vp_matrix(p), if any. Constraint
// propagation plus backtracking; the canonical answer prefers internal, then
// return, then call, deciding letters in alphabetical order. Throws
// ConflictingMatrix when m has a conflict cell.
std::optional<VpPartition> classify_vp(const PrecedenceMatrix& m);
std::vector<VpPartition> classify_vp_all(const PrecedenceMatrix& m);

// --- balanced-grammar restrictions -------------------------------------------

struct BalancedCheck {
    bool ok = false;
    std::vector<std::string> violations;
};

// Forbidden stencils NcN, Nc, cN, c, Nr (and bare r), plus the requirement
// that the calls x returns submatrix carries = only on paired cells.
// `pairing` maps each call to its return; throws UnpairedAlphabet when it is
// not a bijection between the partition's calls and returns.
BalancedCheck check_balanced_restrictions(const Grammar& g, const VpPartition& p,
                                          const std::map<std::string, std::string>& pairing);

// --- OPM text format ----------------------------------------------------------
//
// Header row of alphabet tokens; one row per terminal; cells are '<', '=',
// '>', '.' for empty, or '!' + glyphs + '!' for conflict cells.

std::string render_opm(const PrecedenceMatrix& m);
PrecedenceMatrix parse_opm(std::istream& in, const std::string& filename);
PrecedenceMatrix load_opm(const std::string& path);

}  // namespace floyd

#endif  // FLOYD_PRECEDENCE_HPP_
