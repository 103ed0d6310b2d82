// The two effective conversions between visibly pushdown automata and Floyd
// grammars with VP-matrices, plus grammar reversal packaged with its matrix
// guarantee.
//
// vpda_to_fg instantiates grammar rules over a phase-tagged copy of the
// automaton: a fresh initial state (so nothing enters it), one copy of every
// state for the prefix read with recurring empty stack, and one copy for the
// suffix after the first unmatched call, where calls may push the dedicated
// symbol Z_U that no pop ever touches. Nonterminals are state pairs
// <l,r>, stack-tagged triples <l,W,r> and suffix pairs Z<l,r>; the result is
// reduced and always carries a conflict-free matrix inside the total VP
// matrix of the input partition.
//
// fg_to_vpda drives the unique precedence-determined parse: states remember
// the last completed nonterminal, stack frames remember <B,c,C> contexts for
// matched calls, and unmatched calls thread the expected continuation
// through the state so acceptance can verify the trailing-call spine.
#ifndef FLOYD_TRANSFORMS_HPP_
#define FLOYD_TRANSFORMS_HPP_

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "floyd/grammar.hpp"
#include "floyd/precedence.hpp"
#include "floyd/vpda.hpp"

namespace floyd {

struct ConstructionReport {
    // (section name, items emitted) in construction order; items are grammar
    // rules for vpda_to_fg and transitions for fg_to_vpda.
    std::vector<std::pair<std::string, int>> sections;
    int removed_by_reduction = 0;
    int final_count = 0;
    PrecedenceMatrix opm;  // matrix of the produced (resp. input) grammar
    bool conflict_free = false;
    bool vp_matrix = false;
    std::optional<VpPartition> partition;
    std::vector<std::string> notes;

    int emitted_total() const;
    std::string render() const;
};

// Grammar with L(G) = L(a); rules instantiated per table section, then
// reduced. The report's matrix facts always hold for the output: conflict
// free, contained in total_vp_matrix(a.alphabet), right parts of length <= 4.
std::pair<Grammar, ConstructionReport> vpda_to_fg(const Vpda& a);

// VPDA with L(A) = L(g) over the canonical partition of OPM(g).
// Throws NotFloyd on precedence conflicts, NotVpMatrix when no partition
// fits.
std::pair<Vpda, ConstructionReport> fg_to_vpda(const Grammar& g);

// reverse_rules(g) together with its matrix; guarantees the matrix is the
// transpose of OPM(g) with yields and takes interchanged, and conflict-free.
// Throws NotFloyd when g itself has conflicts.
std::pair<Grammar, PrecedenceMatrix> reverse_fg(const Grammar& g);

}  // namespace floyd

#endif  // FLOYD_TRANSFORMS_HPP_
