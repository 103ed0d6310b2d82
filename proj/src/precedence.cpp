#include "floyd/precedence.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <sstream>

#include "floyd/errors.hpp"

namespace floyd {

char rel_glyph(PrecRel r) {
    switch (r) {
        case PrecRel::Yields: return '<';
        case PrecRel::Equal: return '=';
        case PrecRel::Takes: return '>';
    }
    return '?';
}

std::optional<PrecRel> rel_from_glyph(char c) {
    switch (c) {
        case '<': return PrecRel::Yields;
        case '=': return PrecRel::Equal;
        case '>': return PrecRel::Takes;
    }
    return std::nullopt;
}

int RelSet::size() const {
    int n = 0;
    for (auto r : {PrecRel::Yields, PrecRel::Equal, PrecRel::Takes})
        if (contains(r)) ++n;
    return n;
}

std::vector<PrecRel> RelSet::values() const {
    std::vector<PrecRel> out;
    for (auto r : {PrecRel::Yields, PrecRel::Equal, PrecRel::Takes})
        if (contains(r)) out.push_back(r);
    return out;
}

std::string RelSet::render() const {
    if (empty()) return ".";
    if (size() == 1) return std::string(1, rel_glyph(values()[0]));
    std::string s = "!";
    for (auto r : values()) s += rel_glyph(r);
    return s + "!";
}

PrecedenceMatrix PrecedenceMatrix::over(const std::set<std::string>& alphabet) {
    PrecedenceMatrix m;
    m.alphabet.assign(alphabet.begin(), alphabet.end());
    m.cells.assign(m.alphabet.size() * m.alphabet.size(), RelSet{});
    return m;
}

int PrecedenceMatrix::index(const std::string& token) const {
    auto it = std::lower_bound(alphabet.begin(), alphabet.end(), token);
    if (it == alphabet.end() || *it != token) return -1;
    return static_cast<int>(it - alphabet.begin());
}

RelSet PrecedenceMatrix::at(const std::string& a, const std::string& b) const {
    int i = index(a), j = index(b);
    if (i < 0 || j < 0) return {};
    return cells[static_cast<size_t>(i) * alphabet.size() + static_cast<size_t>(j)];
}

void PrecedenceMatrix::add(const std::string& a, const std::string& b, PrecRel r) {
    int i = index(a), j = index(b);
    if (i < 0 || j < 0) throw Error("matrix cell (" + a + ", " + b + ") outside alphabet");
    cells[static_cast<size_t>(i) * alphabet.size() + static_cast<size_t>(j)].insert(r);
}

bool PrecedenceMatrix::conflict_free() const {
    for (const auto& c : cells)
        if (c.size() > 1) return false;
    return true;
}

PrecedenceMatrix matrix_union(const PrecedenceMatrix& m1, const PrecedenceMatrix& m2) {
    std::set<std::string> alpha(m1.alphabet.begin(), m1.alphabet.end());
    alpha.insert(m2.alphabet.begin(), m2.alphabet.end());
    PrecedenceMatrix m = PrecedenceMatrix::over(alpha);
    for (const auto& a : m.alphabet)
        for (const auto& b : m.alphabet) {
            RelSet u = m1.at(a, b).united(m2.at(a, b));
            int i = m.index(a), j = m.index(b);
            m.cells[static_cast<size_t>(i) * m.alphabet.size() + static_cast<size_t>(j)] = u;
        }
    return m;
}

bool matrix_subset(const PrecedenceMatrix& m1, const PrecedenceMatrix& m2) {
    for (const auto& a : m1.alphabet)
        for (const auto& b : m1.alphabet)
            if (!m1.at(a, b).subset_of(m2.at(a, b))) return false;
    return true;
}

bool compatible(const PrecedenceMatrix& m1, const PrecedenceMatrix& m2) {
    return matrix_union(m1, m2).conflict_free();
}

// --- terminal sets ------------------------------------------------------------

namespace {

// Both directions share the fixpoint; `left` picks the rule end scanned.
std::map<std::string, std::set<std::string>> terminal_sets(const Grammar& g, bool left) {
    std::map<std::string, std::set<std::string>> sets;
    for (const auto& nt : g.nonterminals) sets[nt];
    size_t guard = (g.nonterminals.size() + 1) * (g.terminals.size() + 1) + 1;
    bool grew = true;
    size_t passes = 0;
    while (grew) {
        if (++passes > guard + 2) throw Error("terminal set fixpoint failed to stabilize");
        grew = false;
        for (const auto& r : g.rules) {
            if (r.rhs.empty()) continue;
            std::vector<Symbol> v = r.rhs;
            if (!left) std::reverse(v.begin(), v.end());
            auto& target = sets[r.lhs];
            size_t before = target.size();
            if (v[0].is_terminal()) {
                target.insert(v[0].name);
            } else {
                const auto& inner = sets[v[0].name];
                target.insert(inner.begin(), inner.end());
                if (v.size() > 1 && v[1].is_terminal()) target.insert(v[1].name);
            }
            if (target.size() != before) grew = true;
        }
    }
    return sets;
}

}  // namespace

std::set<std::string> left_terminal_set(const Grammar& g, const std::string& nt) {
    if (!is_operator_form(g)) throw NotOperatorForm("left_terminal_set: grammar not in operator form");
    if (!g.nonterminals.count(nt)) throw UnknownNonterminal("unknown nonterminal '" + nt + "'");
    return terminal_sets(g, true).at(nt);
}

std::set<std::string> right_terminal_set(const Grammar& g, const std::string& nt) {
    if (!is_operator_form(g)) throw NotOperatorForm("right_terminal_set: grammar not in operator form");
    if (!g.nonterminals.count(nt)) throw UnknownNonterminal("unknown nonterminal '" + nt + "'");
    return terminal_sets(g, false).at(nt);
}

std::pair<std::set<std::string>, std::set<std::string>>
terminal_sets_of_string(const Grammar& g, const std::vector<Symbol>& beta) {
    if (beta.empty()) throw EmptyString("terminal_sets_of_string: empty symbol string");
    for (size_t i = 0; i + 1 < beta.size(); ++i)
        if (beta[i].is_nonterminal() && beta[i + 1].is_nonterminal())
            throw NotOperatorForm("terminal_sets_of_string: adjacent nonterminals in string");
    Grammar h = g;
    std::string fresh = "@D";
    while (h.nonterminals.count(fresh) || h.terminals.count(fresh)) fresh += "'";
    h.nonterminals.insert(fresh);
    h.rules.push_back({fresh, beta});
    return {left_terminal_set(h, fresh), right_terminal_set(h, fresh)};
}

// --- OPM construction -----------------------------------------------------------

OpmResult build_opm(const Grammar& g) {
    if (!is_operator_form(g)) throw NotOperatorForm("build_opm: grammar not in operator form");
    auto lsets = terminal_sets(g, true);
    auto rsets = terminal_sets(g, false);

    OpmResult out;
    out.matrix = PrecedenceMatrix::over(g.terminals);
    auto note = [&](const std::string& a, const std::string& b, PrecRel r, const Rule& rule) {
        out.matrix.add(a, b, r);
        auto& w = out.witnesses[{a, b, r}];
        std::string rendered = render_rule(rule);
        if (std::find(w.begin(), w.end(), rendered) == w.end()) w.push_back(rendered);
    };

    for (const auto& r : g.rules) {
        const auto& v = r.rhs;
        for (size_t i = 0; i < v.size(); ++i) {
            if (v[i].is_terminal()) {
                if (i + 1 < v.size() && v[i + 1].is_terminal())
                    note(v[i].name, v[i + 1].name, PrecRel::Equal, r);
                if (i + 1 < v.size() && v[i + 1].is_nonterminal()) {
                    if (i + 2 < v.size() && v[i + 2].is_terminal())
                        note(v[i].name, v[i + 2].name, PrecRel::Equal, r);
                    for (const auto& b : lsets[v[i + 1].name])
                        note(v[i].name, b, PrecRel::Yields, r);
                }
            } else {
                if (i + 1 < v.size() && v[i + 1].is_terminal())
                    for (const auto& a : rsets[v[i].name])
                        note(a, v[i + 1].name, PrecRel::Takes, r);
            }
        }
    }

    for (const auto& a : out.matrix.alphabet)
        for (const auto& b : out.matrix.alphabet) {
            RelSet cell = out.matrix.at(a, b);
            if (cell.size() <= 1) continue;
            Conflict c{a, b, cell, {}};
            for (auto rel : cell.values()) {
                const auto& ws = out.witnesses[{a, b, rel}];
                for (const auto& w : ws)
                    c.witnesses.push_back(std::string(1, rel_glyph(rel)) + " from " + w);
            }
            out.conflicts.push_back(std::move(c));
        }
    return out;
}

// --- VP matrices ------------------------------------------------------------------

std::set<std::string> VpPartition::alphabet() const {
    std::set<std::string> a = calls;
    a.insert(returns.begin(), returns.end());
    a.insert(internals.begin(), internals.end());
    return a;
}

void validate(const VpPartition& p) {
    for (const auto& t : p.calls)
        if (p.returns.count(t) || p.internals.count(t))
            throw ValidationError("letter '" + t + "' in two partition classes");
    for (const auto& t : p.returns)
        if (p.internals.count(t))
            throw ValidationError("letter '" + t + "' in two partition classes");
}

PrecedenceMatrix total_vp_matrix(const VpPartition& p) {
    validate(p);
    PrecedenceMatrix m = PrecedenceMatrix::over(p.alphabet());
    for (const auto& a : m.alphabet) {
        for (const auto& b : m.alphabet) {
            if (p.is_call(a))
                m.add(a, b, p.is_return(b) ? PrecRel::Equal : PrecRel::Yields);
            else
                m.add(a, b, PrecRel::Takes);
        }
    }
    return m;
}

namespace {

enum class Cls { Call, Return, Internal };

bool cell_ok(Cls a, Cls b, RelSet cell) {
    for (auto r : cell.values()) {
        switch (r) {
            case PrecRel::Yields:
                if (a != Cls::Call || b == Cls::Return) return false;
                break;
            case PrecRel::Equal:
                if (a != Cls::Call || b != Cls::Return) return false;
                break;
            case PrecRel::Takes:
                if (a == Cls::Call) return false;
                break;
        }
    }
    return true;
}

void classify_rec(const PrecedenceMatrix& m, std::vector<Cls>& assign, size_t k,
                  std::vector<VpPartition>& out, bool all) {
    size_t n = m.alphabet.size();
    if (k == n) {
        VpPartition p;
        for (size_t i = 0; i < n; ++i) {
            switch (assign[i]) {
                case Cls::Call: p.calls.insert(m.alphabet[i]); break;
                case Cls::Return: p.returns.insert(m.alphabet[i]); break;
                case Cls::Internal: p.internals.insert(m.alphabet[i]); break;
            }
        }
        out.push_back(std::move(p));
        return;
    }
    // Canonical preference: internal, then return, then call.
    for (Cls c : {Cls::Internal, Cls::Return, Cls::Call}) {
        assign[k] = c;
        bool ok = true;
        for (size_t i = 0; i <= k && ok; ++i) {
            if (!cell_ok(assign[i], c, m.at(m.alphabet[i], m.alphabet[k]))) ok = false;
            if (ok && i != k && !cell_ok(c, assign[i], m.at(m.alphabet[k], m.alphabet[i]))) ok = false;
        }
        if (!ok) continue;
        classify_rec(m, assign, k + 1, out, all);
        if (!all && !out.empty()) return;
    }
}

}  // namespace

std::optional<VpPartition> classify_vp(const PrecedenceMatrix& m) {
    if (!m.conflict_free()) throw ConflictingMatrix("classify_vp: matrix has conflict cells");
    std::vector<Cls> assign(m.alphabet.size(), Cls::Internal);
    std::vector<VpPartition> out;
    classify_rec(m, assign, 0, out, false);
    if (out.empty()) return std::nullopt;
    return out.front();
}

std::vector<VpPartition> classify_vp_all(const PrecedenceMatrix& m) {
    if (!m.conflict_free()) throw ConflictingMatrix("classify_vp_all: matrix has conflict cells");
    std::vector<Cls> assign(m.alphabet.size(), Cls::Internal);
    std::vector<VpPartition> out;
    classify_rec(m, assign, 0, out, true);
    return out;
}

// --- balanced restrictions ---------------------------------------------------------

BalancedCheck check_balanced_restrictions(const Grammar& g, const VpPartition& p,
                                          const std::map<std::string, std::string>& pairing) {
    if (pairing.size() != p.calls.size() || p.calls.size() != p.returns.size())
        throw UnpairedAlphabet("pairing is not a bijection between calls and returns");
    std::set<std::string> seen_returns;
    for (const auto& [c, r] : pairing) {
        if (!p.is_call(c)) throw UnpairedAlphabet("'" + c + "' in pairing is not a call");
        if (!p.is_return(r)) throw UnpairedAlphabet("'" + r + "' in pairing is not a return");
        if (!seen_returns.insert(r).second)
            throw UnpairedAlphabet("return '" + r + "' paired twice");
    }

    BalancedCheck out;
    // Stencil scan: map each rule rhs to N/c/r/s shape.
    for (const auto& r : g.rules) {
        std::string stencil;
        for (const auto& s : r.rhs) {
            if (s.is_nonterminal()) stencil += 'N';
            else if (p.is_call(s.name)) stencil += 'c';
            else if (p.is_return(s.name)) stencil += 'r';
            else stencil += 's';
        }
        static const std::set<std::string> forbidden = {"NcN", "Nc", "cN", "c", "Nr", "r"};
        if (forbidden.count(stencil))
            out.violations.push_back("rule " + render_rule(r) + " has forbidden stencil " + stencil);
    }
    // Diagonal check on the calls x returns submatrix.
    auto opm = build_opm(g);
    for (const auto& c : p.calls)
        for (const auto& r : p.returns)
            if (opm.matrix.at(c, r).contains(PrecRel::Equal) && pairing.at(c) != r)
                out.violations.push_back("off-diagonal = between call '" + c + "' and return '" + r + "'");
    out.ok = out.violations.empty();
    return out;
}

// --- OPM text format -----------------------------------------------------------------

std::string render_opm(const PrecedenceMatrix& m) {
    size_t label_w = 1;
    for (const auto& t : m.alphabet) label_w = std::max(label_w, t.size());
    std::vector<size_t> col_w(m.alphabet.size());
    for (size_t j = 0; j < m.alphabet.size(); ++j) {
        col_w[j] = m.alphabet[j].size();
        for (size_t i = 0; i < m.alphabet.size(); ++i)
            col_w[j] = std::max(col_w[j], m.at(m.alphabet[i], m.alphabet[j]).render().size());
    }
    std::ostringstream out;
    auto pad = [&](const std::string& s, size_t w) {
        out << s;
        for (size_t k = s.size(); k < w; ++k) out << ' ';
    };
    pad("", label_w);
    for (size_t j = 0; j < m.alphabet.size(); ++j) { out << "  "; pad(m.alphabet[j], col_w[j]); }
    out << "\n";
    for (size_t i = 0; i < m.alphabet.size(); ++i) {
        pad(m.alphabet[i], label_w);
        for (size_t j = 0; j < m.alphabet.size(); ++j) {
            out << "  ";
            pad(m.at(m.alphabet[i], m.alphabet[j]).render(), col_w[j]);
        }
        out << "\n";
    }
    return out.str();
}

PrecedenceMatrix parse_opm(std::istream& in, const std::string& filename) {
    std::vector<std::vector<std::string>> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto pos = line.find('#');
        if (pos != std::string::npos) line = line.substr(0, pos);
        std::istringstream ss(line);
        std::vector<std::string> tokens;
        std::string t;
        while (ss >> t) tokens.push_back(t);
        if (!tokens.empty()) rows.push_back(std::move(tokens));
    }
    if (rows.empty()) throw ParseError(filename, lineno, "", "empty matrix file");
    const auto& header = rows[0];
    std::set<std::string> alpha(header.begin(), header.end());
    if (alpha.size() != header.size())
        throw ParseError(filename, 1, "", "duplicate token in matrix header");
    if (rows.size() != header.size() + 1)
        throw ParseError(filename, lineno, "", "expected one row per alphabet token");
    PrecedenceMatrix m = PrecedenceMatrix::over(alpha);
    for (size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (row.size() != header.size() + 1)
            throw ParseError(filename, static_cast<int>(i) + 1, "", "wrong number of cells");
        if (!alpha.count(row[0]))
            throw ParseError(filename, static_cast<int>(i) + 1, row[0], "unknown row label");
        for (size_t j = 1; j < row.size(); ++j) {
            const std::string& cell = row[j];
            if (cell == ".") continue;
            std::string glyphs = cell;
            if (glyphs.size() >= 2 && glyphs.front() == '!' && glyphs.back() == '!')
                glyphs = glyphs.substr(1, glyphs.size() - 2);
            for (char c : glyphs) {
                auto rel = rel_from_glyph(c);
                if (!rel) throw ParseError(filename, static_cast<int>(i) + 1, cell, "bad cell");
                m.add(row[0], header[j - 1], *rel);
            }
        }
    }
    return m;
}

PrecedenceMatrix load_opm(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path, 0, "", "cannot open file");
    return parse_opm(in, path);
}

}  // namespace floyd
