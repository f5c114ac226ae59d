#include "doctest.h"

#include "json.hpp"
#include "linrec/cli.hpp"
#include "linrec/error.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

using namespace linrec;

namespace {

struct Out {
    int code;
    std::string out, err;
};

Out run_cli(std::vector<std::string> args) {
    std::ostringstream o, e;
    int c = run(args, o, e);
    return {c, o.str(), e.str()};
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

} // namespace

TEST_CASE("eval") {
    CHECK(run_cli({"eval", "@UnAdd 1 1"}).out == "2\n");
    CHECK(run_cli({"eval", "@Square 3"}).out == "9\n");
    CHECK(run_cli({"eval", "b\"01\""}).out == "b\"01\"\n");
    auto raw = run_cli({"eval", "--raw", "@UnAdd 1 0"});
    CHECK(raw.code == kExitOk);
    CHECK(raw.out == "c1_U c2_U\n");
    auto tr = run_cli({"eval", "--trace", "@UnAdd 1 0"});
    CHECK(tr.code == kExitOk);
    CHECK(tr.out == "1\n");
    std::size_t steps = 0;
    for (char c : tr.err)
        steps += c == '\n';
    CHECK(steps == 6);
    CHECK(run_cli({"eval", "--fuel", "3", "@Square 3"}).code == kExitInconclusive);
}

TEST_CASE("parse and typecheck") {
    auto p = run_cli({"parse", "(\\x:U^0. x) 2"});
    CHECK(p.code == kExitOk);
    CHECK_FALSE(p.out.empty());
    auto bad = run_cli({"parse", "(\\x:U^0. x"});
    CHECK(bad.code == kExitDiagnostics);
    CHECK_FALSE(bad.err.empty());
    auto t = run_cli({"typecheck", "@Add"});
    CHECK(t.code == kExitOk);
    CHECK(first_line(t.out) == "type: U^1 -o U^0 -o U^0");
    auto r = run_cli({"typecheck", "--system", "RH(W)", "@Exp"});
    CHECK(r.code == kExitDiagnostics);
    CHECK(r.err.find("ContractionNotAllowed") != std::string::npos);
    CHECK(run_cli({"typecheck", "--system", "H(Q)", "@Add"}).code == kExitDiagnostics);
}

TEST_CASE("files") {
    auto path = std::string("linrec_cli_test_input.lr");
    {
        std::ofstream f(path);
        f << "algebra N { c1/0, c2/1 }\n(\\x:N^0. x) (c2_N c1_N)\n";
    }
    auto r = run_cli({"eval", "--raw", "-f", path});
    std::remove(path.c_str());
    CHECK(r.code == kExitOk);
    CHECK(r.out == "c2_N c1_N\n");
    CHECK(run_cli({"eval", "-f", "/nonexistent/file"}).code == kExitDiagnostics);
    CHECK(run_cli({"parse", "algebra N { z/0 } c1_N"}).code == kExitDiagnostics);
}

TEST_CASE("graph and trees") {
    auto g = run_cli({"graph", "@UnAdd 1 1"});
    CHECK(g.code == kExitOk);
    std::size_t lines = 0;
    for (char c : g.out)
        lines += c == '\n';
    CHECK(lines == 38);
    auto dot = run_cli({"graph", "--dot", "@UnAdd 1 1"});
    CHECK(dot.out.rfind("digraph", 0) == 0);
    auto t = run_cli({"trees", "@UnAdd 1 1"});
    CHECK(t.code == kExitOk);
    CHECK(t.out.rfind("trees ", 0) == 0);
    auto capped = run_cli({"trees", "--caps", "max_trees=2", "@Square 2"});
    CHECK(capped.code == kExitInconclusive);
}

TEST_CASE("audit") {
    auto a = run_cli({"audit", "--system", "H(A)", "@UnAdd 1 1"});
    CHECK(a.code == kExitOk);
    auto j = nlohmann::json::parse(a.out);
    CHECK(j["verdict"] == "pass");
    CHECK(run_cli({"audit", "--system", "H(A)", "@UnAdd 1 1"}).out == a.out);
    auto rej = run_cli({"audit", "--system", "H(0)", "@UnAdd 1 1"});
    CHECK(rej.code == kExitDiagnostics);
}

TEST_CASE("stdlib and primrec") {
    CHECK(run_cli({"stdlib", "Square", "3"}).out == "9\n");
    CHECK(run_cli({"stdlib", "Add", "2", "4"}).out == "6\n");
    auto pr = run_cli({"stdlib", "Exp", "--print"});
    CHECK(pr.code == kExitOk);
    CHECK_FALSE(pr.out.empty());
    CHECK(run_cli({"stdlib", "Nope"}).code == kExitDiagnostics);
    auto m = run_cli({"primrec", "mul", "3", "4", "--check"});
    CHECK(m.code == kExitOk);
    CHECK(m.out == "12\n");
    CHECK(run_cli({"primrec", "rec(zero", "1"}).code == kExitDiagnostics);
}

TEST_CASE("caps strings") {
    AuditCaps c;
    apply_caps(c, "max_trees=100,fuel=5000,max_states=7");
    CHECK(c.trees.max_trees == 100);
    CHECK(c.fuel == 5000);
    CHECK(c.reducts.max_states == 7);
    CHECK_THROWS_AS(apply_caps(c, "bogus=1"), Error);
    CHECK_THROWS_AS(apply_caps(c, "fuel=0"), Error);
    CHECK(run_cli({"bogus"}).code == kExitDiagnostics);
}
