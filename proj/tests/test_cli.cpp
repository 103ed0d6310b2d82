#include <cstdio>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "floyd/cli.hpp"
#include "floyd/grammar.hpp"
#include "floyd/vpda.hpp"
#include "test_util.hpp"

using namespace floyd;
using testutil::fixture;

namespace {

struct CliRun {
    int status;
    std::string out, err;
};

CliRun cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    int status = run_cli(args, out, err);
    return {status, out.str(), err.str()};
}

std::string temp_path(const std::string& name) {
    return std::string("/tmp/floyd_cli_test_") + name;
}

}  // namespace

TEST_CASE("check prints the ten relations of the strict-inclusion fixture") {
    auto r = cli({"check", fixture("g3.fg")});
    CHECK(r.status == 0);
    CHECK(r.out.find("relations: 10") != std::string::npos);
    CHECK(r.out.find("floyd grammar: yes") != std::string::npos);
}

TEST_CASE("check reports conflicts with witnesses and exits 1") {
    std::string path = temp_path("conflict.fg");
    std::ofstream(path) << "%axiom S\n%terminals a b\nS -> a S b | a b | a S\n";
    auto r = cli({"check", path});
    CHECK(r.status == 1);
    CHECK(r.out.find("conflicts: 1") != std::string::npos);
    CHECK(r.out.find("S -> a S b") != std::string::npos);
    std::remove(path.c_str());
}

TEST_CASE("classify splits verdicts by exit code") {
    auto no = cli({"classify", fixture("g3.fg")});
    CHECK(no.status == 1);
    CHECK(no.out.find("not a VP-matrix") != std::string::npos);

    auto yes = cli({"classify", fixture("g_cdyck.fg")});
    CHECK(yes.status == 0);
    CHECK(yes.out.find("%calls c") != std::string::npos);
}

TEST_CASE("parse command") {
    auto acc = cli({"parse", fixture("g3.fg"), "--input", "b b c c"});
    CHECK(acc.status == 0);
    CHECK(acc.out.find("accept") == 0);
    auto rej = cli({"parse", fixture("g3.fg"), "--input", "b c d"});
    CHECK(rej.status == 1);
}

TEST_CASE("trace command accepts grammar and matrix files") {
    auto g = cli({"trace", fixture("g3.fg"), "--input", "b c"});
    CHECK(g.status == 0);
    CHECK(g.out == "|-<b=c>-|\n");

    std::string path = temp_path("mt.opm");
    std::ofstream(path) << "   c  r  s\nc  <  =  <\nr  >  >  >\ns  >  >  >\n";
    auto m = cli({"trace", path, "--input", "c s r"});
    CHECK(m.status == 0);
    CHECK(m.out == "|-<c<s>r>-|\n");
    std::remove(path.c_str());
}

TEST_CASE("enum works on both artifact kinds") {
    auto g = cli({"enum", fixture("g_cdyck.fg"), "--max-len", "4"});
    CHECK(g.status == 0);
    CHECK(g.out == "c r\nc c r r\n");
    auto a = cli({"enum", fixture("a_dyck.vpda"), "--max-len", "2"});
    CHECK(a.status == 0);
    CHECK(a.out == "%empty\nc\nc c\nc r\n");
}

TEST_CASE("run prints configurations") {
    auto r = cli({"run", fixture("a_dyck.vpda"), "--input", "c c"});
    CHECK(r.status == 0);
    CHECK(r.out == "q0 | _bot Z Z\n");
    auto stuck = cli({"run", fixture("a_dyck.vpda"), "--input", "r"});
    CHECK(stuck.status == 1);
    CHECK(stuck.out.empty());
}

TEST_CASE("factorize prints the canonical decomposition") {
    auto r = cli({"factorize", fixture("a_mixed.vpda"), "--input", "s c s r r"});
    CHECK(r.status == 0);
    CHECK(r.out == "u1 = s\nw1 = c s r\nu2 = r\n");
}

TEST_CASE("conversions write loadable artifacts and equiv confirms them") {
    std::string gpath = temp_path("dyck.fg");
    auto from = cli({"from-vpda", fixture("a_dyck.vpda"), "-o", gpath});
    CHECK(from.status == 0);
    CHECK(from.out.find("vp-matrix: yes") != std::string::npos);

    auto eq = cli({"equiv", gpath, fixture("a_dyck.vpda"), "--max-len", "6"});
    CHECK(eq.status == 0);
    CHECK(eq.out.find("equivalent") != std::string::npos);

    std::string apath = temp_path("dyck.vpda");
    auto to = cli({"to-vpda", gpath, "-o", apath});
    CHECK(to.status == 0);
    auto eq2 = cli({"equiv", apath, fixture("a_dyck.vpda"), "--max-len", "6"});
    CHECK(eq2.status == 0);

    std::remove(gpath.c_str());
    std::remove(apath.c_str());
}

TEST_CASE("to-vpda on a non-VP grammar exits 1") {
    auto r = cli({"to-vpda", fixture("g3.fg"), "-o", temp_path("never.vpda")});
    CHECK(r.status == 1);
}

TEST_CASE("equiv reports the first divergent string") {
    auto r = cli({"equiv", fixture("g_cdyck.fg"), fixture("a_dyck.vpda"), "--max-len", "4"});
    CHECK(r.status == 1);
    CHECK(r.out.find("divergent: %empty") != std::string::npos);
}

TEST_CASE("reverse writes the mirrored grammar") {
    std::string path = temp_path("rev.fg");
    auto r = cli({"reverse", fixture("g_cdyck.fg"), "-o", path});
    CHECK(r.status == 0);
    Grammar rev = load_grammar(path);
    CHECK(render_rule(rev.rules[0]) == "S -> r S c");
    std::remove(path.c_str());
}

TEST_CASE("check --balanced") {
    auto ok = cli({"check", fixture("g_cdyck.fg"), "--balanced", "--pairing", "c:r"});
    CHECK(ok.status == 0);
    CHECK(ok.out.find("balanced: yes") != std::string::npos);

    std::string path = temp_path("open.fg");
    std::ofstream(path) << "%axiom S\n%terminals c r s\nS -> c S r | c r | c B\nB -> s\n";
    auto bad = cli({"check", path, "--balanced", "--pairing", "c:r"});
    CHECK(bad.status == 1);
    CHECK(bad.out.find("stencil cN") != std::string::npos);
    std::remove(path.c_str());

    auto unpaired = cli({"check", fixture("g_cdyck.fg"), "--balanced"});
    CHECK(unpaired.status == 2);
}

TEST_CASE("help exits zero") {
    auto r = cli({"--help"});
    CHECK(r.status == 0);
    CHECK(r.out.find("check") != std::string::npos);
}

TEST_CASE("enum rejects a matrix file") {
    std::string path = temp_path("m.opm");
    std::ofstream(path) << "a\na .\n";
    auto r = cli({"enum", path, "--max-len", "3"});
    CHECK(r.status == 2);
    std::remove(path.c_str());
}

TEST_CASE("input errors exit 2 with a diagnostic") {
    std::string path = temp_path("broken.fg");
    std::ofstream(path) << "%axiom S\n%terminals a\nS - > a\n";
    auto r = cli({"check", path});
    CHECK(r.status == 2);
    CHECK(r.err.find(path) != std::string::npos);
    CHECK(r.err.find("3") != std::string::npos);  // line number
    std::remove(path.c_str());

    auto missing = cli({"check", "/nonexistent/nowhere.fg"});
    CHECK(missing.status == 2);
}

TEST_CASE("commands are deterministic") {
    for (int i = 0; i < 2; ++i) {
        auto a = cli({"opm", fixture("g3.fg")});
        auto b = cli({"opm", fixture("g3.fg")});
        CHECK(a.out == b.out);
        auto c = cli({"from-vpda", fixture("a_mixed.vpda"), "-o", temp_path("det.fg")});
        auto d = cli({"from-vpda", fixture("a_mixed.vpda"), "-o", temp_path("det.fg")});
        CHECK(c.out == d.out);
        std::ifstream f1(temp_path("det.fg"));
        std::stringstream s1;
        s1 << f1.rdbuf();
        CHECK(!s1.str().empty());
    }
    std::remove(temp_path("det.fg").c_str());
}

TEST_CASE("json output is parseable and stable") {
    auto r = cli({"classify", fixture("g_cdyck.fg"), "--json"});
    CHECK(r.status == 0);
    CHECK(r.out.find("\"vp_matrix\": true") != std::string::npos);
    auto p = cli({"parse", fixture("g3.fg"), "--input", "b c", "--json"});
    CHECK(p.status == 0);
    CHECK(p.out.find("\"accept\": true") != std::string::npos);
}

TEST_CASE("file round trips are lossless") {
    Grammar g = load_grammar(fixture("l1.fg"));
    std::string path = temp_path("roundtrip.fg");
    save_grammar(g, path);
    CHECK(load_grammar(path) == g);
    std::remove(path.c_str());

    Vpda a = load_vpda(fixture("a_twostack.vpda"));
    std::string vpath = temp_path("roundtrip.vpda");
    save_vpda(a, vpath);
    CHECK(load_vpda(vpath) == a);
    std::remove(vpath.c_str());
}
