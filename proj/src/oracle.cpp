#include "floyd/oracle.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <sstream>

#include "floyd/errors.hpp"

namespace floyd {

bool shortlex_less(const Word& a, const Word& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
}

std::string render_word(const Word& w) {
    if (w.empty()) return "%empty";
    std::ostringstream out;
    for (size_t i = 0; i < w.size(); ++i) out << (i ? " " : "") << w[i];
    return out.str();
}

// --- bounded enumeration ----------------------------------------------------

std::set<Word> enumerate_language(const Grammar& g, int max_len, std::uint64_t budget) {
    if (max_len < 0) throw Error("enumerate_language: negative max_len");
    std::uint64_t used = 0;
    auto spend = [&](std::uint64_t n) {
        used += n;
        if (used > budget) throw BudgetExceeded("enumerate_language: node budget exhausted");
    };

    // slices[A][n] = words of length exactly n derivable from A.
    std::map<std::string, std::vector<std::set<Word>>> slices;
    for (const auto& nt : g.nonterminals)
        slices[nt].resize(static_cast<size_t>(max_len) + 1);

    for (int n = 0; n <= max_len; ++n) {
        // Renaming rules keep the length, so iterate each slice to a fixpoint.
        bool grew = true;
        while (grew) {
            grew = false;
            for (const auto& r : g.rules) {
                auto& target = slices[r.lhs][n];
                if (r.rhs.empty()) {
                    if (n == 0 && target.insert(Word{}).second) grew = true;
                    continue;
                }
                if (static_cast<int>(r.rhs.size()) > n) continue;
                // Partial expansions paired with the length consumed so far.
                std::vector<Word> partial{{}};
                for (size_t i = 0; i < r.rhs.size() && !partial.empty(); ++i) {
                    const Symbol& s = r.rhs[i];
                    // Symbols still to place each need at least one token.
                    int min_rest = static_cast<int>(r.rhs.size() - i - 1);
                    std::vector<Word> next;
                    for (auto& p : partial) {
                        int avail = n - static_cast<int>(p.size());
                        if (s.is_terminal()) {
                            if (avail - 1 < min_rest) continue;
                            spend(1);
                            Word q = p;
                            q.push_back(s.name);
                            next.push_back(std::move(q));
                        } else {
                            for (int k = 1; k <= avail - min_rest; ++k) {
                                for (const auto& sub : slices[s.name][k]) {
                                    spend(1);
                                    Word q = p;
                                    q.insert(q.end(), sub.begin(), sub.end());
                                    next.push_back(std::move(q));
                                }
                            }
                        }
                    }
                    partial = std::move(next);
                }
                for (auto& w : partial)
                    if (static_cast<int>(w.size()) == n && target.insert(std::move(w)).second)
                        grew = true;
            }
        }
    }

    std::set<Word> out;
    for (int n = 0; n <= max_len; ++n)
        for (const auto& w : slices[g.axiom][n]) out.insert(w);
    return out;
}

// --- CYK membership ---------------------------------------------------------

namespace {

struct Cyk {
    std::map<std::string, std::set<std::string>> unit_parents;  // B -> {A : A =>unit+ B}
    std::map<std::string, std::set<std::string>> term_lhs;      // a -> {A : A -> a}
    struct Bin { std::string lhs, left, right; };
    std::vector<Bin> binary;
    bool axiom_epsilon = false;
    std::string axiom;
};

Cyk binarize(const Grammar& g) {
    Cyk c;
    c.axiom = g.axiom;
    int fresh = 0;
    auto fresh_nt = [&] { return "@cyk" + std::to_string(fresh++); };

    for (const auto& r : g.rules) {
        if (r.rhs.empty()) {
            if (r.lhs == g.axiom) c.axiom_epsilon = true;
            continue;
        }
        if (r.rhs.size() == 1) {
            if (r.rhs[0].is_terminal())
                c.term_lhs[r.rhs[0].name].insert(r.lhs);
            else
                c.unit_parents[r.rhs[0].name].insert(r.lhs);
            continue;
        }
        std::vector<std::string> names;
        for (const auto& s : r.rhs) {
            if (s.is_terminal()) {
                std::string w = fresh_nt();
                c.term_lhs[s.name].insert(w);
                names.push_back(w);
            } else {
                names.push_back(s.name);
            }
        }
        std::string acc = names[0];
        for (size_t i = 1; i + 1 < names.size(); ++i) {
            std::string nxt = fresh_nt();
            c.binary.push_back({nxt, acc, names[i]});
            acc = nxt;
        }
        c.binary.push_back({r.lhs, acc, names.back()});
    }

    bool grew = true;
    while (grew) {
        grew = false;
        for (auto& [b, parents] : c.unit_parents) {
            std::set<std::string> add;
            for (const auto& a : parents) {
                auto it = c.unit_parents.find(a);
                if (it == c.unit_parents.end()) continue;
                for (const auto& p : it->second)
                    if (!parents.count(p)) add.insert(p);
            }
            if (!add.empty()) { parents.insert(add.begin(), add.end()); grew = true; }
        }
    }
    return c;
}

std::set<std::string> close_units(const Cyk& c, const std::set<std::string>& s) {
    std::set<std::string> out = s;
    for (const auto& b : s) {
        auto it = c.unit_parents.find(b);
        if (it != c.unit_parents.end()) out.insert(it->second.begin(), it->second.end());
    }
    return out;
}

// table[i][l] = nonterminals (of the binarized grammar) deriving w[i..i+l)
using CykTable = std::vector<std::vector<std::set<std::string>>>;

CykTable cyk_table(const Cyk& c, const Word& w) {
    size_t n = w.size();
    CykTable table(n, std::vector<std::set<std::string>>(n + 1));
    for (size_t i = 0; i < n; ++i) {
        auto it = c.term_lhs.find(w[i]);
        if (it != c.term_lhs.end()) table[i][1] = close_units(c, it->second);
    }
    for (size_t l = 2; l <= n; ++l) {
        for (size_t i = 0; i + l <= n; ++i) {
            std::set<std::string> cell;
            for (size_t k = 1; k < l; ++k) {
                const auto& left = table[i][k];
                const auto& right = table[i + k][l - k];
                if (left.empty() || right.empty()) continue;
                for (const auto& b : c.binary)
                    if (left.count(b.left) && right.count(b.right)) cell.insert(b.lhs);
            }
            table[i][l] = close_units(c, cell);
        }
    }
    return table;
}

}  // namespace

struct MembershipOracle::Impl {
    std::set<std::string> terminals;
    Cyk cyk;
};

MembershipOracle::MembershipOracle(const Grammar& g)
    : impl_(new Impl{g.terminals, binarize(g)}) {}
MembershipOracle::~MembershipOracle() = default;
MembershipOracle::MembershipOracle(MembershipOracle&&) noexcept = default;
MembershipOracle& MembershipOracle::operator=(MembershipOracle&&) noexcept = default;

bool MembershipOracle::contains(const Word& w) const {
    for (const auto& t : w)
        if (!impl_->terminals.count(t))
            throw Error("membership_oracle: unknown terminal '" + t + "'");
    if (w.empty()) return impl_->cyk.axiom_epsilon;
    CykTable table = cyk_table(impl_->cyk, w);
    return table[0][w.size()].count(impl_->cyk.axiom) > 0;
}

bool membership_oracle(const Grammar& g, const Word& w) {
    return MembershipOracle(g).contains(w);
}

// --- leftmost derivation witness --------------------------------------------

namespace {

struct DTree {
    size_t rule_index = 0;
    std::vector<std::shared_ptr<DTree>> nt_children;  // one per nonterminal in the rhs
};

// Can nonterminal A derive w[i..j)? Answered via the original grammar against
// the binarized table (original nonterminal names survive binarization).
bool spans(const CykTable& table, const std::string& a, size_t i, size_t j) {
    return j > i && table[i][j - i].count(a) > 0;
}

std::shared_ptr<DTree> build_tree(const Grammar& g, const CykTable& table, const Word& w,
                                    const std::string& nt, size_t i, size_t j,
                                    std::set<std::string>& visiting);

bool match_rhs(const Grammar& g, const CykTable& table, const Word& w,
                 const std::vector<Symbol>& rhs, size_t k, size_t i, size_t j,
                 std::vector<std::shared_ptr<DTree>>& kids, std::set<std::string>& visiting) {
    if (k == rhs.size()) return i == j;
    const Symbol& s = rhs[k];
    size_t min_rest = rhs.size() - k - 1;
    if (s.is_terminal()) {
        if (i >= j || w[i] != s.name) return false;
        return match_rhs(g, table, w, rhs, k + 1, i + 1, j, kids, visiting);
    }
    for (size_t mid = i + 1; mid + min_rest <= j; ++mid) {
        if (!spans(table, s.name, i, mid)) continue;
        std::set<std::string> fresh;
        auto sub = build_tree(g, table, w, s.name, i, mid, fresh);
        if (!sub) continue;
        size_t before = kids.size();
        kids.push_back(sub);
        if (match_rhs(g, table, w, rhs, k + 1, mid, j, kids, visiting)) return true;
        kids.resize(before);
    }
    return false;
}

std::shared_ptr<DTree> build_tree(const Grammar& g, const CykTable& table, const Word& w,
                                    const std::string& nt, size_t i, size_t j,
                                    std::set<std::string>& visiting) {
    std::string key = nt + "@" + std::to_string(i) + "," + std::to_string(j);
    if (visiting.count(key)) return nullptr;
    visiting.insert(key);
    for (size_t ri = 0; ri < g.rules.size(); ++ri) {
        const Rule& r = g.rules[ri];
        if (r.lhs != nt || r.rhs.empty()) continue;
        auto node = std::make_shared<DTree>();
        node->rule_index = ri;
        if (match_rhs(g, table, w, r.rhs, 0, i, j, node->nt_children, visiting)) {
            visiting.erase(key);
            return node;
        }
    }
    visiting.erase(key);
    return nullptr;
}

}  // namespace

std::optional<std::vector<DerivationStep>> leftmost_derivation(const Grammar& g, const Word& w) {
    if (!membership_oracle(g, w)) return std::nullopt;
    if (w.empty()) {
        for (size_t ri = 0; ri < g.rules.size(); ++ri)
            if (g.rules[ri].lhs == g.axiom && g.rules[ri].rhs.empty())
                return std::vector<DerivationStep>{{ri, 0}};
        return std::nullopt;
    }
    Cyk c = binarize(g);
    CykTable table = cyk_table(c, w);
    std::set<std::string> visiting;
    auto root = build_tree(g, table, w, g.axiom, 0, w.size(), visiting);
    if (!root) return std::nullopt;

    // Linearize leftmost: the sentential form holds terminals and pending
    // subtree pointers; each step expands the leftmost pending nonterminal.
    struct Entry { bool terminal; std::string token; std::shared_ptr<DTree> tree; };
    std::vector<Entry> form{{false, g.axiom, root}};
    std::vector<DerivationStep> steps;
    while (true) {
        size_t pos = form.size();
        for (size_t i = 0; i < form.size(); ++i)
            if (!form[i].terminal) { pos = i; break; }
        if (pos == form.size()) break;
        auto tree = form[pos].tree;
        const Rule& r = g.rules[tree->rule_index];
        steps.push_back({tree->rule_index, pos});
        std::vector<Entry> expansion;
        size_t child = 0;
        for (const auto& s : r.rhs) {
            if (s.is_terminal())
                expansion.push_back({true, s.name, nullptr});
            else
                expansion.push_back({false, s.name, tree->nt_children[child++]});
        }
        form.erase(form.begin() + static_cast<long>(pos));
        form.insert(form.begin() + static_cast<long>(pos), expansion.begin(), expansion.end());
    }
    return steps;
}

}  // namespace floyd
