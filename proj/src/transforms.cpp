#include "floyd/transforms.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "floyd/errors.hpp"

namespace floyd {

int ConstructionReport::emitted_total() const {
    int n = 0;
    for (const auto& [name, count] : sections) n += count;
    return n;
}

std::string ConstructionReport::render() const {
    std::ostringstream out;
    out << "construction report\n";
    for (const auto& [name, count] : sections)
        out << "  " << name << ": " << count << "\n";
    out << "  removed by reduction: " << removed_by_reduction << "\n";
    out << "  final: " << final_count << "\n";
    out << "matrix (conflict-free: " << (conflict_free ? "yes" : "no") << ")\n";
    std::istringstream m(render_opm(opm));
    std::string line;
    while (std::getline(m, line)) out << "  " << line << "\n";
    if (vp_matrix && partition) {
        auto join = [](const std::set<std::string>& s) {
            std::string j;
            for (const auto& t : s) j += (j.empty() ? "" : " ") + t;
            return j.empty() ? "-" : j;
        };
        out << "vp-matrix: yes  calls {" << join(partition->calls) << "}  returns {"
            << join(partition->returns) << "}  internals {" << join(partition->internals) << "}\n";
    } else {
        out << "vp-matrix: no\n";
    }
    for (const auto& n : notes) out << "note: " << n << "\n";
    return out.str();
}

// === VPDA -> Floyd grammar ====================================================

namespace {

// Phase-tagged states of the preprocessed machine.
struct PState {
    int phase;  // 0 fresh initial, 1 prefix phase (q), 2 suffix phase (p)
    std::string base;

    friend bool operator==(const PState&, const PState&) = default;
    friend auto operator<=>(const PState&, const PState&) = default;

    std::string render() const {
        if (phase == 0) return "q0";
        return (phase == 1 ? "q." : "p.") + base;
    }
};

struct Phased {
    PState q0{0, ""};
    std::vector<PState> Qq, Qp;          // excluding q0
    std::vector<PState> Fq, Fp;
    // matched transitions, phase-internal; q-phase call/int/botret sources
    // include the fresh initial
    struct Call { PState from; std::string letter; PState to; std::string push; };
    struct Ret { PState from; std::string letter, top; PState to; };
    struct Int { PState from; std::string letter; PState to; };
    std::vector<Call> qcalls, pcalls;
    std::vector<Ret> qrets, prets;       // tops != bottom
    std::vector<Int> qints, pints;
    std::vector<Int> qbotrets;           // returns on the bottom marker
    std::vector<Int> cross;              // q-source -> p-target, pushes Z_U
    std::vector<Int> punm;               // p -> p unmatched call, pushes Z_U
    std::vector<std::string> pushables;  // symbols appearing in call pushes
};

Phased phase_expand(const Vpda& a) {
    Phased m;
    auto q = [](const std::string& s) { return PState{1, s}; };
    auto p = [](const std::string& s) { return PState{2, s}; };
    for (const auto& s : a.states) {
        m.Qq.push_back(q(s));
        m.Qp.push_back(p(s));
    }
    for (const auto& f : a.finals) {
        m.Fq.push_back(q(f));
        m.Fp.push_back(p(f));
    }

    std::set<std::string> pushed;
    std::set<std::pair<std::pair<std::string, std::string>, std::string>> cross_seen, punm_seen;
    for (const auto& t : a.calls) {
        pushed.insert(t.push);
        m.qcalls.push_back({q(t.from), t.letter, q(t.to), t.push});
        m.pcalls.push_back({p(t.from), t.letter, p(t.to), t.push});
        if (t.from == a.initial) m.qcalls.push_back({m.q0, t.letter, q(t.to), t.push});
        if (cross_seen.insert({{t.from, t.letter}, t.to}).second) {
            m.cross.push_back({q(t.from), t.letter, p(t.to)});
            if (t.from == a.initial) m.cross.push_back({m.q0, t.letter, p(t.to)});
        }
        if (punm_seen.insert({{t.from, t.letter}, t.to}).second)
            m.punm.push_back({p(t.from), t.letter, p(t.to)});
    }
    for (const auto& t : a.rets) {
        if (t.top == kBottom) {
            m.qbotrets.push_back({q(t.from), t.letter, q(t.to)});
            if (t.from == a.initial) m.qbotrets.push_back({m.q0, t.letter, q(t.to)});
        } else {
            m.qrets.push_back({q(t.from), t.letter, t.top, q(t.to)});
            m.prets.push_back({p(t.from), t.letter, t.top, p(t.to)});
        }
    }
    for (const auto& t : a.ints) {
        m.qints.push_back({q(t.from), t.letter, q(t.to)});
        m.pints.push_back({p(t.from), t.letter, p(t.to)});
        if (t.from == a.initial) m.qints.push_back({m.q0, t.letter, q(t.to)});
    }
    m.pushables.assign(pushed.begin(), pushed.end());
    return m;
}

// Nonterminal naming for the construction.
std::string nt_pair(const PState& l, const PState& r) {
    return "<" + l.render() + "," + r.render() + ">";
}
std::string nt_triple(const PState& l, const std::string& w, const PState& r) {
    return "<" + l.render() + "," + w + "," + r.render() + ">";
}
std::string nt_z(const PState& l, const PState& r) {
    return "Z<" + l.render() + "," + r.render() + ">";
}

struct RuleSink {
    std::vector<Rule> rules;
    std::set<std::pair<std::string, std::vector<Symbol>>> seen;
    std::vector<std::pair<std::string, int>> sections;

    void section(const std::string& name) { sections.push_back({name, 0}); }
    void emit(std::string lhs, std::vector<Symbol> rhs) {
        if (!seen.insert({lhs, rhs}).second) return;
        rules.push_back({std::move(lhs), std::move(rhs)});
        ++sections.back().second;
    }
};

}  // namespace

std::pair<Grammar, ConstructionReport> vpda_to_fg(const Vpda& a) {
    validate(a);
    Phased m = phase_expand(a);
    std::set<std::string> terminals = a.alphabet.alphabet();

    std::string axiom = "S";
    while (terminals.count(axiom)) axiom += "0";

    RuleSink sink;
    auto T = [](const std::string& t) { return Symbol::terminal(t); };
    auto N = [](const std::string& n) { return Symbol::nonterminal(n); };

    // --- axiom rules ---------------------------------------------------------
    sink.section("axiom");
    bool initial_final = a.finals.count(a.initial) > 0;
    if (initial_final) sink.emit(axiom, {});
    for (const auto& qf : m.Fq) sink.emit(axiom, {N(nt_pair(m.q0, qf))});  // S -> Y
    for (const auto& c : m.cross) {
        bool from_q0 = c.from == m.q0;
        bool to_final = a.finals.count(c.to.base) > 0;
        // S -> Y c0 Z  and the degenerate variants
        if (!from_q0) {
            for (const auto& pf : m.Fp)
                sink.emit(axiom, {N(nt_pair(m.q0, c.from)), T(c.letter), N(nt_z(c.to, pf))});
            if (to_final) sink.emit(axiom, {N(nt_pair(m.q0, c.from)), T(c.letter)});
        } else {
            for (const auto& pf : m.Fp) sink.emit(axiom, {T(c.letter), N(nt_z(c.to, pf))});
            if (to_final) sink.emit(axiom, {T(c.letter)});
        }
    }

    // --- class Y: prefix with recurring empty stack --------------------------
    sink.section("Y");
    for (const auto& t : m.qints) {
        if (t.from == m.q0)
            sink.emit(nt_pair(m.q0, t.to), {T(t.letter)});  // Y -> s
        else
            sink.emit(nt_pair(m.q0, t.to), {N(nt_pair(m.q0, t.from)), T(t.letter)});  // Y -> Y s
    }
    for (const auto& t : m.qbotrets) {
        if (t.from == m.q0)
            sink.emit(nt_pair(m.q0, t.to), {T(t.letter)});  // Y -> r
        else
            sink.emit(nt_pair(m.q0, t.to), {N(nt_pair(m.q0, t.from)), T(t.letter)});  // Y -> Y r
    }
    for (const auto& c : m.qcalls)
        for (const auto& r : m.qrets) {
            if (c.push != r.top) continue;
            if (c.from == m.q0) {
                // Y -> c B r  /  Y -> c r
                sink.emit(nt_pair(m.q0, r.to),
                          {T(c.letter), N(nt_triple(c.to, c.push, r.from)), T(r.letter)});
                if (c.to == r.from) sink.emit(nt_pair(m.q0, r.to), {T(c.letter), T(r.letter)});
            } else {
                // Y -> Y c B r  /  Y -> Y c r
                sink.emit(nt_pair(m.q0, r.to), {N(nt_pair(m.q0, c.from)), T(c.letter),
                                                N(nt_triple(c.to, c.push, r.from)), T(r.letter)});
                if (c.to == r.from)
                    sink.emit(nt_pair(m.q0, r.to),
                              {N(nt_pair(m.q0, c.from)), T(c.letter), T(r.letter)});
            }
        }

    // --- classes B1 / B2: well-balanced segments ------------------------------
    // Pair rules carry the chunk sequencing, triple rules the same content for
    // every possible stack top. Internal-letter rows exist for pairs as well:
    // the balanced prefix in front of a chunk may consist of internals only.
    auto emit_balanced = [&](const char* name, const std::vector<PState>& states,
                             const std::vector<Phased::Call>& calls,
                             const std::vector<Phased::Ret>& rets,
                             const std::vector<Phased::Int>& ints) {
        sink.section(name);
        for (const auto& c : calls) {
            if (c.from == m.q0) continue;  // q0 combinations live in class Y
            for (const auto& r : rets) {
                if (c.push != r.top) continue;
                // pairs
                sink.emit(nt_pair(c.from, r.to),
                          {T(c.letter), N(nt_triple(c.to, c.push, r.from)), T(r.letter)});
                if (c.to == r.from) sink.emit(nt_pair(c.from, r.to), {T(c.letter), T(r.letter)});
                for (const auto& q : states) {
                    sink.emit(nt_pair(q, r.to), {N(nt_pair(q, c.from)), T(c.letter),
                                                 N(nt_triple(c.to, c.push, r.from)), T(r.letter)});
                    if (c.to == r.from)
                        sink.emit(nt_pair(q, r.to),
                                  {N(nt_pair(q, c.from)), T(c.letter), T(r.letter)});
                }
                // triples, any stack top
                for (const auto& w : m.pushables) {
                    sink.emit(nt_triple(c.from, w, r.to),
                              {T(c.letter), N(nt_triple(c.to, c.push, r.from)), T(r.letter)});
                    if (c.to == r.from)
                        sink.emit(nt_triple(c.from, w, r.to), {T(c.letter), T(r.letter)});
                    for (const auto& q : states) {
                        sink.emit(nt_triple(q, w, r.to),
                                  {N(nt_pair(q, c.from)), T(c.letter),
                                   N(nt_triple(c.to, c.push, r.from)), T(r.letter)});
                        if (c.to == r.from)
                            sink.emit(nt_triple(q, w, r.to),
                                      {N(nt_pair(q, c.from)), T(c.letter), T(r.letter)});
                    }
                }
            }
        }
        for (const auto& t : ints) {
            if (t.from == m.q0) continue;
            sink.emit(nt_pair(t.from, t.to), {T(t.letter)});
            for (const auto& q : states)
                sink.emit(nt_pair(q, t.to), {N(nt_pair(q, t.from)), T(t.letter)});
            for (const auto& w : m.pushables) {
                sink.emit(nt_triple(t.from, w, t.to), {T(t.letter)});
                for (const auto& q : states)
                    sink.emit(nt_triple(q, w, t.to), {N(nt_pair(q, t.from)), T(t.letter)});
            }
        }
    };
    emit_balanced("B1", m.Qq, m.qcalls, m.qrets, m.qints);
    emit_balanced("B2", m.Qp, m.pcalls, m.prets, m.pints);

    // --- class Z: suffix over an untouched Z_U pile ----------------------------
    sink.section("Z");
    for (const auto& u : m.punm) {
        bool to_final = a.finals.count(u.to.base) > 0;
        for (const auto& pf : m.Fp) {
            sink.emit(nt_z(u.from, pf), {T(u.letter), N(nt_z(u.to, pf))});  // Z -> c Z
            for (const auto& q : m.Qp)
                sink.emit(nt_z(q, pf),
                          {N(nt_pair(q, u.from)), T(u.letter), N(nt_z(u.to, pf))});  // Z -> B c Z
        }
        if (to_final) {
            sink.emit(nt_z(u.from, u.to), {T(u.letter)});  // Z -> c
            for (const auto& q : m.Qp)
                sink.emit(nt_z(q, u.to), {N(nt_pair(q, u.from)), T(u.letter)});  // Z -> B c
        }
    }
    // the last well-balanced part ends in a final state
    for (const auto& c : m.pcalls)
        for (const auto& r : m.prets) {
            if (c.push != r.top || !a.finals.count(r.to.base)) continue;
            sink.emit(nt_z(c.from, r.to),
                      {T(c.letter), N(nt_triple(c.to, c.push, r.from)), T(r.letter)});
            if (c.to == r.from) sink.emit(nt_z(c.from, r.to), {T(c.letter), T(r.letter)});
            for (const auto& q : m.Qp) {
                sink.emit(nt_z(q, r.to), {N(nt_pair(q, c.from)), T(c.letter),
                                          N(nt_triple(c.to, c.push, r.from)), T(r.letter)});
                if (c.to == r.from)
                    sink.emit(nt_z(q, r.to), {N(nt_pair(q, c.from)), T(c.letter), T(r.letter)});
            }
        }
    for (const auto& t : m.pints) {
        if (!a.finals.count(t.to.base)) continue;
        sink.emit(nt_z(t.from, t.to), {T(t.letter)});  // Z -> s
        for (const auto& q : m.Qp)
            sink.emit(nt_z(q, t.to), {N(nt_pair(q, t.from)), T(t.letter)});  // Z -> B s
    }

    Grammar raw = make_grammar(terminals, axiom, sink.rules);
    ReduceResult red = reduce(raw);

    ConstructionReport rep;
    rep.sections = sink.sections;
    rep.removed_by_reduction = static_cast<int>(red.removed.size());
    rep.final_count = static_cast<int>(red.grammar.rules.size());
    auto opm = build_opm(red.grammar);
    rep.opm = opm.matrix;
    rep.conflict_free = opm.floyd();
    rep.vp_matrix = matrix_subset(opm.matrix, total_vp_matrix(a.alphabet));
    if (rep.conflict_free) rep.partition = classify_vp(opm.matrix);
    if (!red.axiom_productive) rep.notes.push_back("axiom unproductive: the language is empty");
    rep.notes.push_back("pair nonterminals carry internal-letter rows so balanced prefixes made "
                        "of internals derive; stack-tagged triples are quantified over pushed "
                        "symbols only");
    rep.notes.push_back("inner stack-tagged names run from the push target to the pop source; "
                        "suffix rows ending a balanced segment are instantiated at final states");
    return {red.grammar, rep};
}

// === Floyd grammar -> VPDA =====================================================

namespace {

// A =>* B through renaming rules only; anc[B] contains A (and B itself).
std::map<std::string, std::set<std::string>> unit_ancestors(const Grammar& g) {
    std::map<std::string, std::set<std::string>> anc;
    for (const auto& nt : g.nonterminals) anc[nt].insert(nt);
    bool grew = true;
    while (grew) {
        grew = false;
        for (const auto& r : g.rules) {
            if (r.rhs.size() != 1 || !r.rhs[0].is_nonterminal()) continue;
            auto& target = anc[r.rhs[0].name];
            for (const auto& up : anc[r.lhs])
                if (target.insert(up).second) grew = true;
        }
    }
    return anc;
}

// {A : S =>* A alpha}: leftmost-symbol closure.
std::set<std::string> leftmost_set(const Grammar& g) {
    std::set<std::string> lm{g.axiom};
    bool grew = true;
    while (grew) {
        grew = false;
        for (const auto& r : g.rules) {
            if (!lm.count(r.lhs) || r.rhs.empty() || !r.rhs[0].is_nonterminal()) continue;
            if (lm.insert(r.rhs[0].name).second) grew = true;
        }
    }
    return lm;
}

std::string fresh_name(std::string base, const std::set<std::string>& taken) {
    while (taken.count(base)) base += "'";
    return base;
}

}  // namespace

std::pair<Vpda, ConstructionReport> fg_to_vpda(const Grammar& g_in) {
    validate(g_in);
    Grammar g = reduce(g_in).grammar;  // table rows assume a reduced grammar
    auto opm_res = build_opm(g);
    if (!opm_res.floyd()) throw NotFloyd("fg_to_vpda: grammar has precedence conflicts");
    auto partition = classify_vp(opm_res.matrix);
    if (!partition) throw NotVpMatrix("fg_to_vpda: matrix is not a VP-matrix");
    const VpPartition& p = *partition;

    auto anc = unit_ancestors(g);
    auto lm = leftmost_set(g);

    std::set<std::string> taken = g.nonterminals;
    for (const auto& t : g.terminals) taken.insert(t);
    std::string q0 = fresh_name("q0", taken);
    std::string pstate = fresh_name("p", taken);
    std::string zu = fresh_name("Z_U", taken);

    // Pending continuations that can follow an unmatched call.
    std::set<std::string> pendings_set;
    auto stencil_of = [&](const Rule& r) {
        std::string s;
        for (const auto& sym : r.rhs) {
            if (sym.is_nonterminal()) s += 'N';
            else if (p.is_call(sym.name)) s += 'c';
            else if (p.is_return(sym.name)) s += 'r';
            else s += 's';
        }
        return s;
    };
    for (const auto& r : g.rules) {
        std::string st = stencil_of(r);
        if (st == "cN") pendings_set.insert(r.rhs[1].name);
        if (st == "NcN") pendings_set.insert(r.rhs[2].name);
    }
    std::vector<std::optional<std::string>> pendings{std::nullopt};
    for (const auto& c : pendings_set) pendings.push_back(c);

    // State = (base, pending continuation, inside-matched-frame bit). The bit
    // keeps acceptance honest under final-state-any-stack semantics: a run
    // that leaves a matched-call frame open must not end in a final state.
    // Frames remember the bit at push time so pops can restore it.
    auto state_name = [&](const std::string& base, const std::optional<std::string>& pend,
                          bool inside) {
        std::string n = pend ? base + "|" + *pend : base;
        return inside ? n + "+in" : n;
    };

    Vpda a;
    a.alphabet = p;
    a.initial = q0;
    a.states.insert(q0);
    for (const auto& pend : pendings)
        for (bool inside : {false, true}) {
            a.states.insert(state_name(pstate, pend, inside));
            for (const auto& nt : g.nonterminals) a.states.insert(state_name(nt, pend, inside));
        }
    // stack alphabet: (V_N u {-}) x calls x (V_N u {-}) frames, each in a
    // plain and an under-open-frame flavor, plus Z_U
    auto frame = [&](const std::string& b, const std::string& c, const std::string& d,
                     bool under) {
        return std::string("<") + b + "," + c + "," + d + (under ? ">in" : ">");
    };
    std::vector<std::string> vn_dash{"-"};
    for (const auto& nt : g.nonterminals) vn_dash.push_back(nt);
    for (const auto& b : vn_dash)
        for (const auto& c : p.calls)
            for (const auto& d : vn_dash)
                for (bool under : {false, true}) a.stack_alphabet.insert(frame(b, c, d, under));
    a.stack_alphabet.insert(zu);

    ConstructionReport rep;
    rep.opm = opm_res.matrix;
    rep.conflict_free = true;
    rep.vp_matrix = true;
    rep.partition = p;

    std::map<std::string, int> section_count;
    auto count = [&](const char* s) { ++section_count[s]; };

    // Completion targets: entering "subtree labeled A finished" may enter any
    // unit ancestor of A.
    auto targets = [&](const std::string& A) {
        std::vector<std::string> out(anc[A].begin(), anc[A].end());
        return out;
    };
    // An unmatched call with rule lhs A extends pending P when P (resp. the
    // axiom for the top level) unit-derives A.
    auto pending_allows = [&](const std::optional<std::string>& pend, const std::string& A) {
        const std::string& from = pend ? *pend : g.axiom;
        return anc[A].count(from) > 0;
    };

    bool has_epsilon = false;
    for (const auto& r : g.rules) {
        if (r.rhs.empty()) { has_epsilon = true; continue; }
        std::string st = stencil_of(r);
        const std::string& A = r.lhs;
        auto sym = [&](size_t i) { return r.rhs[i].name; };

        if (st == "N") continue;  // renaming rules act through closures only

        if (st == "s") {
            for (const auto& tgt : targets(A)) {
                a.ints.insert({q0, sym(0), state_name(tgt, std::nullopt, false)});
                count("1: start rows");
                for (const auto& pend : pendings)
                    for (bool in : {false, true}) {
                        a.ints.insert({state_name(pstate, pend, in), sym(0),
                                       state_name(tgt, pend, in)});
                        count("2: progress rows");
                    }
            }
        } else if (st == "Ns") {
            for (const auto& tgt : targets(A))
                for (const auto& pend : pendings)
                    for (bool in : {false, true}) {
                        a.ints.insert({state_name(sym(0), pend, in), sym(1),
                                       state_name(tgt, pend, in)});
                        count("2: progress rows");
                    }
        } else if (st == "r") {
            if (lm.count(A))
                for (const auto& tgt : targets(A)) {
                    a.rets.insert({q0, sym(0), kBottom, state_name(tgt, std::nullopt, false)});
                    count("1: start rows");
                }
        } else if (st == "Nr") {
            // the bottom marker is on top only before any call at all
            for (const auto& tgt : targets(A)) {
                a.rets.insert({state_name(sym(0), std::nullopt, false), sym(1), kBottom,
                               state_name(tgt, std::nullopt, false)});
                count("2: progress rows");
            }
        } else if (st == "cN") {
            // unmatched calls happen only with no frame open
            const std::string& cont = sym(1);
            if (pending_allows(std::nullopt, A)) {
                a.calls.insert({q0, sym(0), state_name(pstate, cont, false), zu});
                count("3: unmatched-call rows");
            }
            for (const auto& pend : pendings)
                if (pending_allows(pend, A)) {
                    a.calls.insert({state_name(pstate, pend, false), sym(0),
                                    state_name(pstate, cont, false), zu});
                    count("3: unmatched-call rows");
                }
        } else if (st == "NcN") {
            const std::string& cont = sym(2);
            for (const auto& pend : pendings)
                if (pending_allows(pend, A)) {
                    a.calls.insert({state_name(sym(0), pend, false), sym(1),
                                    state_name(pstate, cont, false), zu});
                    count("3: unmatched-call rows");
                }
        } else if (st == "Nc") {
            for (const auto& tgt : targets(A))
                for (const auto& pend : pendings) {
                    a.calls.insert({state_name(sym(0), pend, false), sym(1),
                                    state_name(tgt, pend, false), zu});
                    count("3: unmatched-call rows");
                }
        } else if (st == "c") {
            for (const auto& tgt : targets(A)) {
                a.calls.insert({q0, sym(0), state_name(tgt, std::nullopt, false), zu});
                count("3: unmatched-call rows");
                for (const auto& pend : pendings) {
                    a.calls.insert({state_name(pstate, pend, false), sym(0),
                                    state_name(tgt, pend, false), zu});
                    count("3: unmatched-call rows");
                }
            }
        } else if (st == "cr" || st == "cNr") {
            const std::string inner = st == "cNr" ? sym(1) : "-";
            const std::string& rl = st == "cNr" ? r.rhs[2].name : r.rhs[1].name;
            // pop state: completed inner subtree, or p right after the push
            a.calls.insert({q0, sym(0), state_name(pstate, std::nullopt, true),
                            frame("-", sym(0), inner, false)});
            count("5: matched-call rows");
            for (const auto& pend : pendings)
                for (bool in : {false, true}) {
                    a.calls.insert({state_name(pstate, pend, in), sym(0),
                                    state_name(pstate, pend, true),
                                    frame("-", sym(0), inner, in)});
                    count("5: matched-call rows");
                    for (const auto& tgt : targets(A)) {
                        const std::string popper =
                            st == "cNr" ? state_name(inner, pend, true)
                                        : state_name(pstate, pend, true);
                        a.rets.insert({popper, rl, frame("-", sym(0), inner, in),
                                       state_name(tgt, pend, in)});
                        count("5: matched-call rows");
                    }
                }
        } else if (st == "NcNr" || st == "Ncr") {
            const std::string& left = sym(0);
            const std::string inner = st == "NcNr" ? sym(2) : "-";
            const std::string& rl = st == "NcNr" ? r.rhs[3].name : r.rhs[2].name;
            for (const auto& pend : pendings)
                for (bool in : {false, true}) {
                    a.calls.insert({state_name(left, pend, in), sym(1),
                                    state_name(pstate, pend, true),
                                    frame(left, sym(1), inner, in)});
                    count("4: framed-call rows");
                    for (const auto& tgt : targets(A)) {
                        const std::string popper =
                            st == "NcNr" ? state_name(inner, pend, true)
                                         : state_name(pstate, pend, true);
                        a.rets.insert({popper, rl, frame(left, sym(1), inner, in),
                                       state_name(tgt, pend, in)});
                        count("4: framed-call rows");
                    }
                }
        } else {
            throw Error("fg_to_vpda: rule " + render_rule(r) + " has stencil '" + st +
                        "' impossible under a VP-matrix");
        }
    }

    // Final states: no frame open, and the last completed subtree is the root
    // of what the innermost pending continuation (or the axiom) expects.
    if (has_epsilon) a.finals.insert(q0);
    for (const auto& pend : pendings)
        for (const auto& nt : g.nonterminals) {
            const std::string& from = pend ? *pend : g.axiom;
            if (anc[nt].count(from)) a.finals.insert(state_name(nt, pend, false));
        }

    for (const auto& [name, n] : section_count) rep.sections.push_back({name, n});
    rep.final_count = static_cast<int>(a.calls.size() + a.rets.size() + a.ints.size());
    rep.notes.push_back("unmatched calls thread the expected continuation through the state; "
                        "acceptance checks the trailing spine against it and requires every "
                        "matched-call frame to be closed");
    validate(a);
    return {a, rep};
}

// === reversal ==================================================================

std::pair<Grammar, PrecedenceMatrix> reverse_fg(const Grammar& g) {
    auto orig = build_opm(g);
    if (!orig.floyd()) throw NotFloyd("reverse_fg: grammar has precedence conflicts");
    Grammar rev = reverse_rules(g);
    auto opm = build_opm(rev);

    // transpose with yields and takes interchanged
    PrecedenceMatrix expected = PrecedenceMatrix::over(
        std::set<std::string>(orig.matrix.alphabet.begin(), orig.matrix.alphabet.end()));
    for (const auto& x : orig.matrix.alphabet)
        for (const auto& y : orig.matrix.alphabet)
            for (auto rel : orig.matrix.at(x, y).values()) {
                PrecRel swapped = rel == PrecRel::Yields ? PrecRel::Takes
                                 : rel == PrecRel::Takes ? PrecRel::Yields
                                                         : PrecRel::Equal;
                expected.add(y, x, swapped);
            }
    if (!(opm.matrix == expected))
        throw Error("reverse_fg: matrix is not the swapped transpose");  // cannot happen
    if (!opm.floyd()) throw NotFloyd("reverse_fg: reversed grammar has conflicts");
    return {rev, opm.matrix};
}

}  // namespace floyd
