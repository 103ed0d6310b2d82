#include <random>

#include "doctest.h"
#include "floyd/errors.hpp"
#include "floyd/oracle.hpp"
#include "floyd/transforms.hpp"
#include "test_util.hpp"

using namespace floyd;
using testutil::fixture;
using testutil::grammar_from;
using testutil::w;

namespace {

const std::vector<const char*> kVpdaFixtures = {
    "a_dyck.vpda", "a_unmatched.vpda", "a_multiret.vpda",
    "a_mixed.vpda", "a_twostack.vpda", "a_nofinal.vpda"};

const std::vector<const char*> kVpGrammarFixtures = {
    "g_cdyck.fg", "g_int.fg", "g_unm.fg", "g_mret.fg", "g_rets.fg", "g_ab.fg", "g_spine.fg"};

}  // namespace

TEST_CASE("vpda_to_fg matches the automaton language") {
    for (const char* name : kVpdaFixtures) {
        Vpda a = load_vpda(fixture(name));
        auto [g, rep] = vpda_to_fg(a);
        CAPTURE(name);
        CHECK(enumerate_language(g, 6) == enumerate_accepted(a, 6));
        CHECK(rep.emitted_total() == rep.removed_by_reduction + rep.final_count);
    }
}

TEST_CASE("vpda_to_fg output satisfies the matrix guarantees") {
    for (const char* name : kVpdaFixtures) {
        Vpda a = load_vpda(fixture(name));
        auto [g, rep] = vpda_to_fg(a);
        CAPTURE(name);
        CHECK(is_operator_form(g));
        auto opm = build_opm(g);
        CHECK(opm.floyd());
        CHECK(matrix_subset(opm.matrix, total_vp_matrix(a.alphabet)));
        for (const auto& r : g.rules) CHECK(r.rhs.size() <= 4);
        auto part = classify_vp(opm.matrix);
        REQUIRE(part.has_value());
        CHECK(matrix_subset(opm.matrix, total_vp_matrix(*part)));
    }
}

TEST_CASE("vpda_to_fg on an automaton with no final states") {
    Vpda a = load_vpda(fixture("a_nofinal.vpda"));
    auto [g, rep] = vpda_to_fg(a);
    CHECK(g.rules.empty());
    CHECK(enumerate_language(g, 6).empty());
    bool noted = false;
    for (const auto& n : rep.notes) noted = noted || n.find("empty") != std::string::npos;
    CHECK(noted);
}

TEST_CASE("fg_to_vpda matches the grammar language") {
    for (const char* name : kVpGrammarFixtures) {
        Grammar g = load_grammar(fixture(name));
        auto [a, rep] = fg_to_vpda(g);
        CAPTURE(name);
        CHECK(enumerate_accepted(a, 8) == enumerate_language(g, 8));
    }
}

TEST_CASE("fg_to_vpda on the nested pair grammar, frozen expectations") {
    Grammar g = load_grammar(fixture("g_cdyck.fg"));
    auto [a, rep] = fg_to_vpda(g);
    CHECK(rep.partition->calls == std::set<std::string>{"c"});
    CHECK(rep.partition->returns == std::set<std::string>{"r"});
    std::set<Word> expected{w("c r"), w("c c r r"), w("c c c r r r"), w("c c c c r r r r")};
    CHECK(enumerate_accepted(a, 8) == expected);
}

TEST_CASE("fg_to_vpda rejects non-VP grammars") {
    Grammar g3 = load_grammar(fixture("g3.fg"));
    CHECK_THROWS_AS(fg_to_vpda(g3), NotVpMatrix);

    Grammar conflict = grammar_from("%axiom S\n%terminals a b\nS -> a S b | a b | a S\n");
    CHECK_THROWS_AS(fg_to_vpda(conflict), NotFloyd);
}

TEST_CASE("fg_to_vpda of an epsilon-only grammar accepts exactly the empty word") {
    Grammar g = grammar_from("%axiom S\n%terminals a\nS -> %empty\n");
    auto [a, rep] = fg_to_vpda(g);
    CHECK(a.finals.count(a.initial));
    CHECK(enumerate_accepted(a, 3) == std::set<Word>{{}});
}

TEST_CASE("round trip: automaton to grammar to automaton") {
    for (const char* name : kVpdaFixtures) {
        Vpda a = load_vpda(fixture(name));
        auto [g, rep1] = vpda_to_fg(a);
        CAPTURE(name);
        if (g.rules.empty()) continue;  // empty language: nothing to convert back
        auto [b, rep2] = fg_to_vpda(g);
        CHECK(enumerate_accepted(b, 6) == enumerate_accepted(a, 6));
    }
}

TEST_CASE("reverse_fg") {
    Grammar a = grammar_from("%axiom A\n%terminals b c\nA -> b A c | b c\n");
    auto [rev, matrix] = reverse_fg(a);
    CHECK(render_rule(rev.rules[0]) == "A -> c A b");
    CHECK(render_rule(rev.rules[1]) == "A -> c b");
    CHECK(matrix.at("c", "b") == RelSet(PrecRel::Equal));
    CHECK(matrix.at("b", "b") == RelSet(PrecRel::Takes));
    CHECK(matrix.at("c", "c") == RelSet(PrecRel::Yields));
    CHECK(matrix.conflict_free());

    // symmetric rule pair: the matrix is its own swap-transpose
    Grammar sym = grammar_from("%axiom S\n%terminals a b\nS -> a b | b a\n");
    auto [revs, msym] = reverse_fg(sym);
    CHECK(msym == build_opm(sym).matrix);

    // involution
    auto [back, mback] = reverse_fg(rev);
    CHECK(back == a);
    CHECK(mback == build_opm(a).matrix);

    Grammar conflict = grammar_from("%axiom S\n%terminals a b\nS -> a S b | a b | a S\n");
    CHECK_THROWS_AS(reverse_fg(conflict), NotFloyd);
}

TEST_CASE("random automata: equivalence, matrix guarantee, round trip") {
    std::mt19937 rng(12345);
    for (int iter = 0; iter < 200; ++iter) {
        Vpda a;
        a.alphabet = {{"c1", "c2"}, {"r1"}, {"s1"}};
        int nstates = 1 + static_cast<int>(rng() % 3);
        for (int i = 0; i < nstates; ++i) a.states.insert("q" + std::to_string(i));
        a.initial = "q0";
        for (int i = 0; i < nstates; ++i)
            if (rng() % 2) a.finals.insert("q" + std::to_string(i));
        a.stack_alphabet = {"Z", "W"};
        auto st = [&] { return "q" + std::to_string(rng() % nstates); };
        int ntr = 2 + static_cast<int>(rng() % 7);
        for (int t = 0; t < ntr; ++t) {
            switch (rng() % 4) {
                case 0: a.calls.insert({st(), rng() % 2 ? "c1" : "c2", st(), rng() % 2 ? "Z" : "W"}); break;
                case 1: a.rets.insert({st(), "r1", rng() % 2 ? "Z" : "W", st()}); break;
                case 2: a.rets.insert({st(), "r1", kBottom, st()}); break;
                case 3: a.ints.insert({st(), "s1", st()}); break;
            }
        }
        CAPTURE(iter);
        auto [g, rep] = vpda_to_fg(a);
        CHECK(enumerate_language(g, 6) == enumerate_accepted(a, 6));
        auto opm = build_opm(g);
        CHECK(opm.floyd());
        CHECK(matrix_subset(opm.matrix, total_vp_matrix(a.alphabet)));
        if (!g.rules.empty()) {
            auto [b, rep2] = fg_to_vpda(g);
            CHECK(enumerate_accepted(b, 5) == enumerate_accepted(a, 5));
        }
    }
}

TEST_CASE("random stencil grammars: equivalence") {
    std::mt19937 rng(777);
    std::vector<std::string> nts{"S", "A", "B"};
    std::vector<std::string> calls{"c1", "c2"}, rets{"r1", "r2"};
    int usable = 0;
    for (int iter = 0; iter < 400; ++iter) {
        std::vector<Rule> rules;
        auto nt = [&] { return nts[rng() % nts.size()]; };
        auto C = [&] { return Symbol::terminal(calls[rng() % calls.size()]); };
        auto R = [&] { return Symbol::terminal(rets[rng() % rets.size()]); };
        auto I = [&] { return Symbol::terminal("s1"); };
        auto N = [&] { return Symbol::nonterminal(nt()); };
        int nrules = 2 + static_cast<int>(rng() % 5);
        for (int k = 0; k < nrules; ++k) {
            std::vector<Symbol> rhs;
            switch (rng() % 13) {
                case 0: rhs = {I()}; break;
                case 1: rhs = {N(), I()}; break;
                case 2: rhs = {R()}; break;
                case 3: rhs = {N(), R()}; break;
                case 4: rhs = {C()}; break;
                case 5: rhs = {N(), C()}; break;
                case 6: rhs = {C(), N()}; break;
                case 7: rhs = {N(), C(), N()}; break;
                case 8: rhs = {C(), R()}; break;
                case 9: rhs = {C(), N(), R()}; break;
                case 10: rhs = {N(), C(), R()}; break;
                case 11: rhs = {N(), C(), N(), R()}; break;
                case 12: rhs = {N()}; break;
            }
            Rule r{nt(), rhs};
            bool dup = false;
            for (auto& e : rules) dup = dup || e == r;
            if (!dup) rules.push_back(r);
        }
        Grammar g;
        try {
            g = make_grammar({"c1", "c2", "r1", "r2", "s1"}, "S", rules);
        } catch (const ValidationError&) { continue; }
        auto red = reduce(g);
        if (!red.axiom_productive || red.grammar.rules.empty()) continue;
        auto opm = build_opm(red.grammar);
        if (!opm.floyd() || !classify_vp(opm.matrix)) continue;
        ++usable;
        CAPTURE(iter);
        auto [a, rep] = fg_to_vpda(red.grammar);
        CHECK(enumerate_accepted(a, 6) == enumerate_language(red.grammar, 6));
    }
    CHECK(usable > 100);  // the generator must keep producing real cases
}

TEST_CASE("reverse_fg mirrors bounded languages") {
    for (const char* name : {"g3.fg", "l1.fg", "g_cdyck.fg", "g_unm.fg"}) {
        Grammar g = load_grammar(fixture(name));
        auto [rev, matrix] = reverse_fg(g);
        auto lang = enumerate_language(g, 7);
        auto rlang = enumerate_language(rev, 7);
        CAPTURE(name);
        REQUIRE(lang.size() == rlang.size());
        for (auto word : lang) {
            std::reverse(word.begin(), word.end());
            CHECK(rlang.count(word));
        }
    }
}
