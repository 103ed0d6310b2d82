// Visibly pushdown automata: representation, nondeterministic run semantics,
// the rho mapping with its balance predicates, and the factorization of
// input strings into the y / c0 / z shape that drives the grammar
// constructions.
#ifndef FLOYD_VPDA_HPP_
#define FLOYD_VPDA_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "floyd/oracle.hpp"
#include "floyd/precedence.hpp"

namespace floyd {

// Stack bottom marker; written _bot in the text format.
inline const std::string kBottom = "_bot";

struct Vpda {
    VpPartition alphabet;
    std::set<std::string> states;
    std::string initial;
    std::set<std::string> finals;
    std::set<std::string> stack_alphabet;  // without the bottom marker

    struct CallTr { std::string from, letter, to, push; friend auto operator<=>(const CallTr&, const CallTr&) = default; };
    struct RetTr  { std::string from, letter, top, to;  friend auto operator<=>(const RetTr&, const RetTr&) = default; };  // top may be kBottom
    struct IntTr  { std::string from, letter, to;       friend auto operator<=>(const IntTr&, const IntTr&) = default; };

    std::set<CallTr> calls;
    std::set<RetTr> rets;
    std::set<IntTr> ints;

    friend bool operator==(const Vpda&, const Vpda&) = default;
};

void validate(const Vpda& a);

struct Configuration {
    std::string state;
    std::vector<std::string> stack;  // stack[0] == kBottom, top at the back

    friend bool operator==(const Configuration&, const Configuration&) = default;
    friend auto operator<=>(const Configuration&, const Configuration&) = default;
};

std::string render_configuration(const Configuration& c);

// All configurations reachable from (initial, bottom) on w. Empty set means
// every branch got stuck. Returns on bottom keep the bottom in place and fire
// only through transitions whose top is the bottom marker.
std::set<Configuration> run(const Vpda& a, const Word& w);

// Frontier after each prefix of w: result[i] = run(a, w[0..i)).
std::vector<std::set<Configuration>> run_frontiers(const Vpda& a, const Word& w);

bool accepts(const Vpda& a, const Word& w);

constexpr std::uint64_t kDefaultVpdaBudget = 10'000'000;

// { w : |w| <= max_len, accepts(a, w) } by exhaustive extension with
// per-prefix configuration sets. Throws BudgetExceeded past `budget`
// configuration touches.
std::set<Word> enumerate_accepted(const Vpda& a, int max_len,
                                  std::uint64_t budget = kDefaultVpdaBudget);

// --- rho and balance ----------------------------------------------------------

// Calls to 'c', returns to 'r', internals erased.
std::string rho(const VpPartition& p, const Word& x);

// s over {c, r} cancels to empty via cr -> eps.
bool is_well_parenthesized(const std::string& s);

bool is_well_balanced(const VpPartition& p, const Word& x);
// Well balanced, nonempty, first letter a call and last letter a return.
bool is_well_closed(const VpPartition& p, const Word& x);

// --- factorization -------------------------------------------------------------
//
// x = y c0 z or x = y, with
//   y = u1 w1 u2 w2 ... uk wk   (uj over internals+returns, wj well closed)
//   z = v1 c1 v2 ... c_{r-1} vr (vj well balanced, cj unmatched calls)

struct Factorization {
    struct YPart {
        Word u;  // possibly empty
        Word w;  // possibly empty = missing
    };
    std::vector<YPart> y_parts;
    std::optional<std::string> c0;
    std::vector<Word> v_parts;            // v1 ... vr; empty vector when z is empty
    std::vector<std::string> z_calls;     // c1 ... c_{r-1}
    bool canonical = false;

    Word reassemble() const;
};

// Every decomposition of the shape above (u runs kept maximal; adjacent
// well-closed chunks may merge together with the internal-only gaps between
// them; every valid y/c0/z split point is covered). Exactly one entry is
// flagged canonical: maximal y, minimal chunks.
std::vector<Factorization> factorize(const VpPartition& p, const Word& x);

// The canonical decomposition only.
Factorization factorize_canonical(const VpPartition& p, const Word& x);

std::string render_factorization(const Factorization& f);

// --- text format -----------------------------------------------------------------
//
//   %calls c
//   %returns r
//   %internals s
//   %states q0 q1
//   %initial q0
//   %final q0
//   %stack Z W
//   call q0 c q1 Z
//   ret q1 r Z q0      (top may be _bot)
//   int q0 s q0

Vpda parse_vpda(std::istream& in, const std::string& filename);
Vpda load_vpda(const std::string& path);
std::string render_vpda(const Vpda& a);
void save_vpda(const Vpda& a, const std::string& path);

}  // namespace floyd

#endif  // FLOYD_VPDA_HPP_
