// Independent brute-force oracles for bounded language questions.
//
// Both oracles stay away from precedence machinery on purpose: enumeration
// is a length-bounded derivation search, membership is CYK on a binarized
// copy of the grammar. They exist to cross-check the parser and the
// grammar/automaton constructions.
#ifndef FLOYD_ORACLE_HPP_
#define FLOYD_ORACLE_HPP_

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "floyd/grammar.hpp"

namespace floyd {

using Word = std::vector<std::string>;  // sequence of terminal tokens

constexpr std::uint64_t kDefaultOracleBudget = 10'000'000;

// All terminal strings of length <= max_len derivable from the axiom.
// Memoized per (nonterminal, exact length); renaming cycles are handled by
// iterating each length slice to a fixpoint. Throws BudgetExceeded when more
// than `budget` candidate strings get composed.
std::set<Word> enumerate_language(const Grammar& g, int max_len,
                                  std::uint64_t budget = kDefaultOracleBudget);

// CYK over a binarized copy of g, with unit-rule closure. The class form
// binarizes once and answers many words.
class MembershipOracle {
public:
    explicit MembershipOracle(const Grammar& g);
    ~MembershipOracle();
    MembershipOracle(MembershipOracle&&) noexcept;
    MembershipOracle& operator=(MembershipOracle&&) noexcept;
    bool contains(const Word& w) const;

private:
    struct Impl;
    std::unique_ptr<const Impl> impl_;
};

bool membership_oracle(const Grammar& g, const Word& w);

// One step of a leftmost derivation: apply rule `rule_index` at the
// `position`-th symbol (which must be the leftmost nonterminal occurrence
// addressed by the step) of the current sentential form.
struct DerivationStep {
    std::size_t rule_index;
    std::size_t position;

    friend bool operator==(const DerivationStep&, const DerivationStep&) = default;
};

// Leftmost derivation of w from the axiom, if w is in L(g). Built from CYK
// back-pointers; replaying the steps from [axiom] reproduces w.
std::optional<std::vector<DerivationStep>> leftmost_derivation(const Grammar& g, const Word& w);

// Shortlex order used whenever bounded languages get printed or diffed.
bool shortlex_less(const Word& a, const Word& b);

std::string render_word(const Word& w);  // tokens joined by spaces; "%empty" for epsilon

}  // namespace floyd

#endif  // FLOYD_ORACLE_HPP_
