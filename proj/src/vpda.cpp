#include "floyd/vpda.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <sstream>

#include "floyd/errors.hpp"

namespace floyd {

void validate(const Vpda& a) {
    validate(a.alphabet);
    if (!a.states.count(a.initial))
        throw ValidationError("initial state '" + a.initial + "' not declared");
    for (const auto& f : a.finals)
        if (!a.states.count(f)) throw ValidationError("final state '" + f + "' not declared");
    if (a.stack_alphabet.count(kBottom))
        throw ValidationError("stack alphabet must not declare the bottom marker");
    auto state_ok = [&](const std::string& s) { return a.states.count(s) > 0; };
    for (const auto& t : a.calls) {
        if (!state_ok(t.from) || !state_ok(t.to))
            throw ValidationError("call transition uses undeclared state");
        if (!a.alphabet.is_call(t.letter))
            throw ValidationError("'" + t.letter + "' used in a call transition is not a call");
        if (t.push == kBottom) throw ValidationError("call transition pushes the bottom marker");
        if (!a.stack_alphabet.count(t.push))
            throw ValidationError("call transition pushes undeclared symbol '" + t.push + "'");
    }
    for (const auto& t : a.rets) {
        if (!state_ok(t.from) || !state_ok(t.to))
            throw ValidationError("return transition uses undeclared state");
        if (!a.alphabet.is_return(t.letter))
            throw ValidationError("'" + t.letter + "' used in a return transition is not a return");
        if (t.top != kBottom && !a.stack_alphabet.count(t.top))
            throw ValidationError("return transition pops undeclared symbol '" + t.top + "'");
    }
    for (const auto& t : a.ints) {
        if (!state_ok(t.from) || !state_ok(t.to))
            throw ValidationError("internal transition uses undeclared state");
        if (!a.alphabet.is_internal(t.letter))
            throw ValidationError("'" + t.letter + "' used in an internal transition is not internal");
    }
}

std::string render_configuration(const Configuration& c) {
    std::string out = c.state + " |";
    for (const auto& s : c.stack) out += " " + s;
    return out;
}

namespace {

enum class LetterClass { Call, Return, Internal };

LetterClass classify_letter(const VpPartition& p, const std::string& t) {
    if (p.is_call(t)) return LetterClass::Call;
    if (p.is_return(t)) return LetterClass::Return;
    if (p.is_internal(t)) return LetterClass::Internal;
    throw Error("letter '" + t + "' is not classified by the alphabet");
}

// Transition lookup keyed by (state, letter) resp. (state, letter, top).
struct TransitionIndex {
    std::map<std::pair<std::string, std::string>, std::vector<std::pair<std::string, std::string>>>
        calls;  // -> (to, push)
    std::map<std::tuple<std::string, std::string, std::string>, std::vector<std::string>>
        rets;  // -> to
    std::map<std::pair<std::string, std::string>, std::vector<std::string>> ints;  // -> to

    explicit TransitionIndex(const Vpda& a) {
        for (const auto& t : a.calls) calls[{t.from, t.letter}].push_back({t.to, t.push});
        for (const auto& t : a.rets) rets[{t.from, t.letter, t.top}].push_back(t.to);
        for (const auto& t : a.ints) ints[{t.from, t.letter}].push_back(t.to);
    }
};

std::set<Configuration> step(const Vpda& a, const TransitionIndex& idx,
                             const std::set<Configuration>& frontier, const std::string& letter) {
    std::set<Configuration> next;
    switch (classify_letter(a.alphabet, letter)) {
        case LetterClass::Call:
            for (const auto& c : frontier) {
                auto it = idx.calls.find({c.state, letter});
                if (it == idx.calls.end()) continue;
                for (const auto& [to, push] : it->second) {
                    Configuration n = c;
                    n.state = to;
                    n.stack.push_back(push);
                    next.insert(std::move(n));
                }
            }
            break;
        case LetterClass::Return:
            for (const auto& c : frontier) {
                const std::string& top = c.stack.back();
                auto it = idx.rets.find({c.state, letter, top});
                if (it == idx.rets.end()) continue;
                for (const auto& to : it->second) {
                    Configuration n = c;
                    n.state = to;
                    if (top != kBottom) n.stack.pop_back();  // bottom stays in place
                    next.insert(std::move(n));
                }
            }
            break;
        case LetterClass::Internal:
            for (const auto& c : frontier) {
                auto it = idx.ints.find({c.state, letter});
                if (it == idx.ints.end()) continue;
                for (const auto& to : it->second) {
                    Configuration n = c;
                    n.state = to;
                    next.insert(std::move(n));
                }
            }
            break;
    }
    return next;
}

}  // namespace

std::vector<std::set<Configuration>> run_frontiers(const Vpda& a, const Word& w) {
    TransitionIndex idx(a);
    std::vector<std::set<Configuration>> out;
    out.push_back({Configuration{a.initial, {kBottom}}});
    for (const auto& letter : w) {
        out.push_back(step(a, idx, out.back(), letter));
        if (out.back().empty()) {
            // all branches stuck; remaining frontiers stay empty
            while (out.size() <= w.size()) out.emplace_back();
            break;
        }
    }
    return out;
}

std::set<Configuration> run(const Vpda& a, const Word& w) {
    return run_frontiers(a, w).back();
}

bool accepts(const Vpda& a, const Word& w) {
    for (const auto& c : run(a, w))
        if (a.finals.count(c.state)) return true;
    return false;
}

std::set<Word> enumerate_accepted(const Vpda& a, int max_len, std::uint64_t budget) {
    if (max_len < 0) throw Error("enumerate_accepted: negative max_len");
    TransitionIndex idx(a);
    std::uint64_t used = 0;
    std::set<Word> out;
    std::set<std::string> alpha = a.alphabet.alphabet();
    std::vector<std::string> letters(alpha.begin(), alpha.end());

    std::function<void(const Word&, const std::set<Configuration>&)> dfs =
        [&](const Word& w, const std::set<Configuration>& frontier) {
            for (const auto& c : frontier)
                if (a.finals.count(c.state)) { out.insert(w); break; }
            if (static_cast<int>(w.size()) == max_len) return;
            for (const auto& letter : letters) {
                auto next = step(a, idx, frontier, letter);
                used += next.size() + 1;
                if (used > budget)
                    throw BudgetExceeded("enumerate_accepted: configuration budget exhausted");
                if (next.empty()) continue;
                Word w2 = w;
                w2.push_back(letter);
                dfs(w2, next);
            }
        };
    dfs({}, {Configuration{a.initial, {kBottom}}});
    return out;
}

// --- rho and balance -------------------------------------------------------------

std::string rho(const VpPartition& p, const Word& x) {
    std::string out;
    for (const auto& t : x) {
        switch (classify_letter(p, t)) {
            case LetterClass::Call: out += 'c'; break;
            case LetterClass::Return: out += 'r'; break;
            case LetterClass::Internal: break;
        }
    }
    return out;
}

bool is_well_parenthesized(const std::string& s) {
    long depth = 0;
    for (char ch : s) {
        if (ch == 'c') ++depth;
        else if (ch == 'r') { if (--depth < 0) return false; }
        else throw Error("is_well_parenthesized: letter outside {c, r}");
    }
    return depth == 0;
}

bool is_well_balanced(const VpPartition& p, const Word& x) {
    return is_well_parenthesized(rho(p, x));
}

bool is_well_closed(const VpPartition& p, const Word& x) {
    if (x.empty()) return false;
    return is_well_balanced(p, x) && p.is_call(x.front()) && p.is_return(x.back());
}

// --- factorization ----------------------------------------------------------------

Word Factorization::reassemble() const {
    Word out;
    for (const auto& part : y_parts) {
        out.insert(out.end(), part.u.begin(), part.u.end());
        out.insert(out.end(), part.w.begin(), part.w.end());
    }
    if (c0) {
        out.push_back(*c0);
        for (size_t i = 0; i < v_parts.size(); ++i) {
            out.insert(out.end(), v_parts[i].begin(), v_parts[i].end());
            if (i < z_calls.size()) out.push_back(z_calls[i]);
        }
    }
    return out;
}

namespace {

// Minimal chunks and the u-gaps around them: y = g0 C1 g1 C2 ... Cm gm.
struct YShape {
    std::vector<Word> gaps;    // m+1 entries
    std::vector<Word> chunks;  // m entries
};

// Decompose a prefix known to have matched-depth zero at its end.
YShape y_shape(const VpPartition& p, const Word& y) {
    YShape s;
    s.gaps.emplace_back();
    size_t i = 0;
    while (i < y.size()) {
        if (p.is_call(y[i])) {
            // chunk: runs until depth first returns to zero
            size_t j = i;
            long depth = 0;
            do {
                if (p.is_call(y[j])) ++depth;
                else if (p.is_return(y[j])) --depth;
                ++j;
            } while (depth > 0);
            s.chunks.emplace_back(y.begin() + static_cast<long>(i), y.begin() + static_cast<long>(j));
            s.gaps.emplace_back();
            i = j;
        } else {
            s.gaps.back().push_back(y[i]);
            ++i;
        }
    }
    return s;
}

// z decomposition is unique: unmatched calls split the well-balanced gaps.
void z_shape(const VpPartition& p, const Word& z, std::vector<Word>& v_parts,
             std::vector<std::string>& z_calls) {
    v_parts.clear();
    z_calls.clear();
    if (z.empty()) return;
    std::vector<size_t> call_stack;
    std::set<size_t> unmatched;
    for (size_t i = 0; i < z.size(); ++i) {
        if (p.is_call(z[i])) call_stack.push_back(i);
        else if (p.is_return(z[i])) call_stack.pop_back();  // split validity guarantees nonempty
    }
    unmatched.insert(call_stack.begin(), call_stack.end());
    Word current;
    for (size_t i = 0; i < z.size(); ++i) {
        if (unmatched.count(i)) {
            v_parts.push_back(current);
            current.clear();
            z_calls.push_back(z[i]);
        } else {
            current.push_back(z[i]);
        }
    }
    v_parts.push_back(current);
}

bool gap_is_internal_only(const VpPartition& p, const Word& gap) {
    for (const auto& t : gap)
        if (!p.is_internal(t)) return false;
    return true;
}

// All groupings of the chunk sequence for one y; mergeable boundaries carry
// internal-only gaps.
void enumerate_groupings(const VpPartition& p, const YShape& s, size_t chunk_idx,
                         std::vector<Factorization::YPart> current, Word pending_u,
                         std::vector<std::vector<Factorization::YPart>>& out) {
    if (chunk_idx == s.chunks.size()) {
        if (!pending_u.empty()) current.push_back({pending_u, {}});
        out.push_back(std::move(current));
        return;
    }
    // Start a w at this chunk; extend it over later chunks while gaps allow.
    Word w = s.chunks[chunk_idx];
    for (size_t last = chunk_idx;; ++last) {
        auto next = current;
        next.push_back({pending_u, w});
        enumerate_groupings(p, s, last + 1, std::move(next), s.gaps[last + 1], out);
        if (last + 1 >= s.chunks.size()) break;
        if (!gap_is_internal_only(p, s.gaps[last + 1])) break;
        w.insert(w.end(), s.gaps[last + 1].begin(), s.gaps[last + 1].end());
        w.insert(w.end(), s.chunks[last + 1].begin(), s.chunks[last + 1].end());
    }
}

}  // namespace

std::vector<Factorization> factorize(const VpPartition& p, const Word& x) {
    for (const auto& t : x) classify_letter(p, t);

    // Matched-depth profile with floor at zero (returns on bottom keep zero).
    std::vector<long> depth(x.size() + 1, 0);
    for (size_t i = 0; i < x.size(); ++i) {
        long d = depth[i];
        if (p.is_call(x[i])) ++d;
        else if (p.is_return(x[i]) && d > 0) --d;
        depth[i + 1] = d;
    }

    // Valid split points: y = x[0..k), c0 = x[k]; plus the x = y case.
    std::vector<size_t> splits;
    bool whole_is_y = depth[x.size()] == 0;
    for (size_t k = 0; k < x.size(); ++k) {
        if (depth[k] != 0 || !p.is_call(x[k])) continue;
        // suffix after c0 must never pop below the unmatched call's level
        long d = 0;
        bool ok = true;
        for (size_t i = k + 1; i < x.size() && ok; ++i) {
            if (p.is_call(x[i])) ++d;
            else if (p.is_return(x[i])) { if (--d < 0) ok = false; }
        }
        if (ok) splits.push_back(k);
    }
    if (!whole_is_y && splits.empty())
        throw Error("factorize: input admits no decomposition");  // cannot occur

    size_t canonical_split = whole_is_y ? x.size() : *std::max_element(splits.begin(), splits.end());

    std::vector<Factorization> out;
    auto emit_for_y = [&](const Word& y, std::optional<std::string> c0, const Word& z,
                          size_t split_pos) {
        YShape shape = y_shape(p, y);
        std::vector<std::vector<Factorization::YPart>> groupings;
        enumerate_groupings(p, shape, 0, {}, shape.gaps[0], groupings);
        for (auto& parts : groupings) {
            Factorization f;
            f.y_parts = parts;
            f.c0 = c0;
            if (c0) z_shape(p, z, f.v_parts, f.z_calls);
            // canonical = maximal y and minimal chunks (no merged w)
            if (split_pos == canonical_split) {
                bool minimal = true;
                size_t wi = 0;
                for (const auto& part : f.y_parts)
                    if (!part.w.empty()) {
                        if (part.w != shape.chunks[wi]) minimal = false;
                        ++wi;
                    }
                if (minimal && wi == shape.chunks.size()) f.canonical = true;
            }
            out.push_back(std::move(f));
        }
    };

    if (whole_is_y) emit_for_y(x, std::nullopt, {}, x.size());
    for (size_t k : splits) {
        Word y(x.begin(), x.begin() + static_cast<long>(k));
        Word z(x.begin() + static_cast<long>(k) + 1, x.end());
        emit_for_y(y, x[k], z, k);
    }
    return out;
}

Factorization factorize_canonical(const VpPartition& p, const Word& x) {
    for (auto& f : factorize(p, x))
        if (f.canonical) return f;
    throw Error("factorize: no canonical decomposition");  // unreachable
}

std::string render_factorization(const Factorization& f) {
    std::ostringstream out;
    size_t ui = 0, wi = 0;
    for (const auto& part : f.y_parts) {
        out << "u" << ++ui << " = " << render_word(part.u) << "\n";
        if (!part.w.empty()) out << "w" << ++wi << " = " << render_word(part.w) << "\n";
    }
    if (f.c0) {
        out << "c0 = " << *f.c0 << "\n";
        for (size_t i = 0; i < f.v_parts.size(); ++i) {
            out << "v" << i + 1 << " = " << render_word(f.v_parts[i]) << "\n";
            if (i < f.z_calls.size()) out << "c" << i + 1 << " = " << f.z_calls[i] << "\n";
        }
    }
    return out.str();
}

// --- text format --------------------------------------------------------------------

namespace {

std::vector<std::string> tokens_of(const std::string& line) {
    std::string body = line;
    auto pos = body.find('#');
    if (pos != std::string::npos) body = body.substr(0, pos);
    std::istringstream ss(body);
    std::vector<std::string> out;
    std::string t;
    while (ss >> t) out.push_back(t);
    return out;
}

}  // namespace

Vpda parse_vpda(std::istream& in, const std::string& filename) {
    Vpda a;
    bool initial_seen = false;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto t = tokens_of(line);
        if (t.empty()) continue;
        const std::string& head = t[0];
        auto rest_into = [&](std::set<std::string>& target) {
            for (size_t i = 1; i < t.size(); ++i) target.insert(t[i]);
        };
        if (head == "%calls") rest_into(a.alphabet.calls);
        else if (head == "%returns") rest_into(a.alphabet.returns);
        else if (head == "%internals") rest_into(a.alphabet.internals);
        else if (head == "%states") rest_into(a.states);
        else if (head == "%initial") {
            if (t.size() != 2) throw ParseError(filename, lineno, "", "%initial expects one state");
            a.initial = t[1];
            initial_seen = true;
        } else if (head == "%final") rest_into(a.finals);
        else if (head == "%stack") rest_into(a.stack_alphabet);
        else if (head == "call") {
            if (t.size() != 5) throw ParseError(filename, lineno, head, "call expects: call q a q' Z");
            a.calls.insert({t[1], t[2], t[3], t[4]});
        } else if (head == "ret") {
            if (t.size() != 5) throw ParseError(filename, lineno, head, "ret expects: ret q a Z q'");
            a.rets.insert({t[1], t[2], t[3], t[4]});
        } else if (head == "int") {
            if (t.size() != 4) throw ParseError(filename, lineno, head, "int expects: int q a q'");
            a.ints.insert({t[1], t[2], t[3]});
        } else {
            throw ParseError(filename, lineno, head, "unknown line");
        }
    }
    if (!initial_seen) throw ParseError(filename, lineno, "", "missing %initial directive");
    try {
        validate(a);
    } catch (const ValidationError& e) {
        throw ParseError(filename, lineno, "", e.what());
    }
    return a;
}

Vpda load_vpda(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path, 0, "", "cannot open file");
    return parse_vpda(in, path);
}

std::string render_vpda(const Vpda& a) {
    std::ostringstream out;
    auto section = [&](const char* name, const std::set<std::string>& items) {
        out << name;
        for (const auto& s : items) out << " " << s;
        out << "\n";
    };
    section("%calls", a.alphabet.calls);
    section("%returns", a.alphabet.returns);
    section("%internals", a.alphabet.internals);
    section("%states", a.states);
    out << "%initial " << a.initial << "\n";
    section("%final", a.finals);
    section("%stack", a.stack_alphabet);
    for (const auto& t : a.calls) out << "call " << t.from << " " << t.letter << " " << t.to << " " << t.push << "\n";
    for (const auto& t : a.rets) out << "ret " << t.from << " " << t.letter << " " << t.top << " " << t.to << "\n";
    for (const auto& t : a.ints) out << "int " << t.from << " " << t.letter << " " << t.to << "\n";
    return out.str();
}

void save_vpda(const Vpda& a, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write file " + path);
    out << render_vpda(a);
}

}  // namespace floyd
