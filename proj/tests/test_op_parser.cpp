#include <functional>
#include <random>
#include <thread>

#include "doctest.h"
#include "floyd/errors.hpp"
#include "floyd/op_parser.hpp"
#include "floyd/oracle.hpp"
#include "test_util.hpp"

using namespace floyd;
using testutil::all_words;
using testutil::fixture;
using testutil::grammar_from;
using testutil::w;

TEST_CASE("single-rule reduction builds the expected tree") {
    Grammar g = grammar_from("%axiom A\n%terminals b c\nA -> b A c | b c\n");
    auto res = parse(g, w("b c"));
    REQUIRE(res.accept);
    REQUIRE(res.root.has_value());
    CHECK(res.root->labels == std::set<std::string>{"A"});
    REQUIRE(res.root->children.size() == 2);
    CHECK(res.root->children[0].terminal == "b");
    CHECK(res.root->children[1].terminal == "c");
    CHECK(res.root->frontier() == w("b c"));

    auto nested = parse(g, w("b b c c"));
    REQUIRE(nested.accept);
    CHECK(nested.root->frontier() == w("b b c c"));
    CHECK(nested.root->begin == 0);
    CHECK(nested.root->end == 4);
}

TEST_CASE("acceptance uses renaming closure") {
    Grammar g3 = load_grammar(fixture("g3.fg"));
    auto res = parse(g3, w("b b c c"));
    CHECK(res.accept);  // the residue node is labeled {A}; S -> A closes it
    CHECK_FALSE(parse(g3, w("b c d")).accept);

    // renaming inside the tree: S -> c A r, A -> B, B -> s
    Grammar inner = grammar_from("%axiom S\n%terminals c r s\nS -> c A r\nA -> B\nB -> s\n");
    CHECK(parse(inner, w("c s r")).accept);
}

TEST_CASE("reject reasons are reported distinctly") {
    // (a, a) has no relation here
    Grammar gap = grammar_from("%axiom S\n%terminals a b\nS -> a b\n");
    auto r1 = parse(gap, w("a a"));
    CHECK_FALSE(r1.accept);
    CHECK(r1.reason == RejectReason::PrecedenceGap);

    // (a, a) carries < but no rule matches the inner handle
    Grammar nomatch = grammar_from("%axiom S\n%terminals a b\nS -> a S b | a b\n");
    auto r2 = parse(nomatch, w("a a"));
    CHECK_FALSE(r2.accept);
    CHECK(r2.reason == RejectReason::NoMatchingRule);

    Grammar conflict = grammar_from("%axiom S\n%terminals a b\nS -> a S b | a b | a S\n");
    CHECK_THROWS_AS(parse(conflict, w("a b")), NotFloyd);
}

TEST_CASE("empty input") {
    Grammar eps = grammar_from("%axiom S\n%terminals a\nS -> %empty | a\n");
    CHECK(parse(eps, {}).accept);
    Grammar g3 = load_grammar(fixture("g3.fg"));
    CHECK_FALSE(parse(g3, {}).accept);
}

TEST_CASE("parser agrees with the membership oracle on all fixtures") {
    for (const char* name : {"g3.fg", "g_cdyck.fg", "g_int.fg", "g_unm.fg", "g_rets.fg",
                             "g_mret.fg", "g_ab.fg", "g_spine.fg"}) {
        Grammar g = load_grammar(fixture(name));
        OpParser parser(g);
        MembershipOracle oracle(g);
        std::vector<std::string> letters(g.terminals.begin(), g.terminals.end());
        size_t disagreements = 0;
        for (const auto& word : all_words(letters, 5))
            if (parser.parse(word).accept != oracle.contains(word)) ++disagreements;
        CAPTURE(name);
        CHECK(disagreements == 0);
    }
}

TEST_CASE("tree shapes depend only on the matrix") {
    Grammar g1 = load_grammar(fixture("g_cdyck.fg"));
    Grammar g2 = grammar_from("%axiom T\n%terminals c r\nT -> c T r | c r\n");
    REQUIRE(build_opm(g1).matrix == build_opm(g2).matrix);

    std::function<void(const ParseNode&, std::vector<std::pair<size_t, size_t>>&)> spans =
        [&](const ParseNode& n, std::vector<std::pair<size_t, size_t>>& out) {
            out.push_back({n.begin, n.end});
            for (const auto& c : n.children)
                if (!c.is_leaf) spans(c, out);
        };
    for (const auto& word : {w("c r"), w("c c r r"), w("c c c r r r")}) {
        auto r1 = parse(g1, word);
        auto r2 = parse(g2, word);
        REQUIRE(r1.accept);
        REQUIRE(r2.accept);
        std::vector<std::pair<size_t, size_t>> s1, s2;
        spans(*r1.root, s1);
        spans(*r2.root, s2);
        CHECK(s1 == s2);
    }
}

TEST_CASE("reduce events are fenced < ... > with = inside") {
    Grammar g3 = load_grammar(fixture("g3.fg"));
    for (const auto& word : enumerate_language(g3, 6)) {
        auto res = parse(g3, word);
        REQUIRE(res.accept);
        // replay the trace with a shadow stack of (is_node, rel) entries
        struct Entry { bool node; PrecRel rel; };
        std::vector<Entry> shadow;
        std::optional<PrecRel> last_rel;
        for (const auto& ev : res.trace) {
            if (ev.kind == TraceEvent::Kind::Compare) {
                last_rel = ev.rel;
            } else if (ev.kind == TraceEvent::Kind::Shift) {
                REQUIRE(last_rel.has_value());
                shadow.push_back({false, *last_rel});
            } else {
                size_t popped = 0;
                bool fence_seen = false;
                while (!shadow.empty()) {
                    Entry e = shadow.back();
                    shadow.pop_back();
                    ++popped;
                    if (!e.node) {
                        if (e.rel == PrecRel::Yields) { fence_seen = true; break; }
                        CHECK(e.rel == PrecRel::Equal);  // inner handle terminals
                    }
                }
                CHECK(fence_seen);
                if (!shadow.empty() && shadow.back().node) {
                    shadow.pop_back();
                    ++popped;
                }
                CHECK(popped == ev.handle_len);
                shadow.push_back({true, PrecRel::Yields});
            }
        }
    }
}

TEST_CASE("reversal coherence") {
    for (const char* name : {"g3.fg", "g_cdyck.fg", "g_int.fg"}) {
        Grammar g = load_grammar(fixture(name));
        Grammar rev = reverse_rules(g);
        OpParser fwd(g), bwd(rev);
        std::vector<std::string> letters(g.terminals.begin(), g.terminals.end());
        size_t disagreements = 0;
        for (const auto& word : all_words(letters, 5)) {
            Word mirrored(word.rbegin(), word.rend());
            if (fwd.parse(word).accept != bwd.parse(mirrored).accept) ++disagreements;
        }
        CAPTURE(name);
        CHECK(disagreements == 0);
    }
}

TEST_CASE("precedence trace") {
    Grammar g3 = load_grammar(fixture("g3.fg"));
    auto m = build_opm(g3).matrix;
    CHECK(render_trace(precedence_trace(m, w("b c"))) == "|-<b=c>-|");
    CHECK(render_trace(precedence_trace(m, w("b"))) == "|-<b>-|");
    // gap marker for an empty cell
    CHECK(render_trace(precedence_trace(m, w("b d"))) == "|-<b?d>-|");

    VpPartition p{{"c"}, {"r"}, {"s"}};
    auto mt = total_vp_matrix(p);
    CHECK(render_trace(precedence_trace(mt, w("c s r"))) == "|-<c<s>r>-|");
}

TEST_CASE("random conflict-free grammars agree with the oracle") {
    std::mt19937 rng(98765);
    std::vector<std::string> nts{"S", "A", "B", "C"};
    std::vector<std::string> ts{"a", "b", "c"};
    int tried = 0;
    size_t disagreements = 0;
    for (int iter = 0; iter < 1200 && tried < 400; ++iter) {
        auto nt = [&] { return nts[rng() % nts.size()]; };
        auto term = [&] { return Symbol::terminal(ts[rng() % ts.size()]); };
        std::vector<Rule> rules;
        int nrules = 2 + static_cast<int>(rng() % 6);
        for (int k = 0; k < nrules; ++k) {
            std::vector<Symbol> rhs;
            int len = 1 + static_cast<int>(rng() % 4);
            bool last_nt = false;
            for (int i = 0; i < len; ++i) {
                if (!last_nt && rng() % 3 == 0) {
                    rhs.push_back(Symbol::nonterminal(nt()));
                    last_nt = true;
                } else {
                    rhs.push_back(term());
                    last_nt = false;
                }
            }
            Rule r{nt(), rhs};
            bool dup = false;
            for (auto& e : rules) dup = dup || e == r;
            if (!dup) rules.push_back(r);
        }
        Grammar g;
        try {
            g = make_grammar({"a", "b", "c"}, "S", rules);
        } catch (const ValidationError&) { continue; }
        if (!build_opm(g).floyd()) continue;
        ++tried;
        OpParser parser(g);
        MembershipOracle oracle(g);
        for (const auto& word : all_words(ts, 5))
            if (parser.parse(word).accept != oracle.contains(word)) ++disagreements;
    }
    CHECK(tried == 400);
    CHECK(disagreements == 0);
}

TEST_CASE("concurrent parses over one grammar") {
    Grammar g3 = load_grammar(fixture("g3.fg"));
    std::vector<std::thread> threads;
    std::vector<int> accepted(4, 0);
    for (int t = 0; t < 4; ++t)
        threads.emplace_back([&, t] {
            for (const auto& word : enumerate_language(g3, 6))
                if (parse(g3, word).accept) ++accepted[static_cast<size_t>(t)];
        });
    for (auto& th : threads) th.join();
    for (int t = 1; t < 4; ++t) CHECK(accepted[static_cast<size_t>(t)] == accepted[0]);
}
