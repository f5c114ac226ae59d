#include "doctest.h"

#include "linrec/error.hpp"
#include "linrec/eval.hpp"
#include "linrec/stdlib.hpp"
#include "linrec/syntax.hpp"

#include <cstdint>
#include <sstream>

using namespace linrec;

namespace {

TermPtr P(const std::string& s) { return parse_term(s, AlgebraFamily::builtin(), stdlib_options()); }

std::uint64_t run_nat(const std::string& s) {
    auto nf = normalize(P(s)).term;
    auto a = to_algebraic(nf);
    REQUIRE(a.has_value());
    return decode_nat(*a);
}

// Leaf count of a tree over C (c1 binary, c2 nullary)
std::uint64_t leaves(const AlgebraicTerm& t) {
    if (t.args.empty())
        return 1;
    std::uint64_t n = 0;
    for (const auto& a : t.args)
        n += leaves(a);
    return n;
}

// Depth along the leftmost spine
std::uint64_t spine(const AlgebraicTerm& t) { return t.args.empty() ? 0 : 1 + spine(t.args[0]); }

} // namespace

TEST_CASE("builders against meta arithmetic") {
    for (std::uint64_t n = 0; n <= 4; ++n) {
        CAPTURE(n);
        CHECK(run_nat("@Coerc " + std::to_string(n)) == n);
        CHECK(run_nat("@Predecessor " + std::to_string(n)) == (n == 0 ? 0 : n - 1));
        CHECK(run_nat("@Exp " + std::to_string(n)) == (std::uint64_t{1} << n));
        CHECK(run_nat("@Square " + std::to_string(n)) == n * n);
        CHECK(run_nat("@Leaves (@Blowup " + std::to_string(n) + ")") == (std::uint64_t{1} << n));
        for (std::uint64_t m = 0; m <= 4; ++m) {
            CHECK(run_nat("@UnAdd " + std::to_string(n) + " " + std::to_string(m)) == n + m);
            CHECK(run_nat("@Add " + std::to_string(n) + " " + std::to_string(m)) == n + m);
        }
    }
}

TEST_CASE("Duplicate and Extract") {
    for (std::uint64_t n = 0; n <= 3; ++n) {
        auto d = to_algebraic(normalize(P("@Duplicate " + std::to_string(n))).term);
        REQUIRE(d.has_value());
        auto bar = overline(encode_nat(n));
        // a pair of two copies of the encoded input
        CHECK(d->args.size() == 2);
        CHECK(d->args[0] == bar);
        CHECK(d->args[1] == bar);
        CHECK(spine(bar) == n);
        CHECK(leaves(bar) == n + 1);
        auto e = to_algebraic(normalize(mk_app(build("Extract", 0), from_algebraic(bar))).term);
        REQUIRE(e.has_value());
        CHECK(decode_nat(*e) == n);
    }
    auto b = to_algebraic(normalize(P("@Blowup 3")).term);
    REQUIRE(b.has_value());
    CHECK(leaves(*b) == 8);
    CHECK(b->size() == 15);
}

TEST_CASE("recursive step unfolds one constructor") {
    // t = c1_U c2_U: branch b1 gets the subterm and its recursive image
    auto m = P("c1_U c2_U << \\y:U^0. \\z:U^0. c1_U z, c2_U >>");
    auto rs = redexes(m);
    REQUIRE(rs.size() == 1);
    CHECK(rs[0].kind == RedexKind::Recursive);
    auto expect = P("(\\y:U^0. \\z:U^0. c1_U z) c2_U (c2_U << \\y:U^0. \\z:U^0. c1_U z, c2_U >>)");
    CHECK(alpha_equal(step(m, rs[0]), expect));
    auto c = P("c1_U c2_U {{ \\y:U^0. y, c1_U c2_U }}");
    auto cr = redexes(c);
    REQUIRE(cr.size() == 1);
    CHECK(cr[0].kind == RedexKind::Conditional);
    CHECK(alpha_equal(step(c, cr[0]), P("(\\y:U^0. y) c2_U")));
    auto nullary = P("c2_U {{ \\y:U^0. y, c1_U c2_U }}");
    CHECK(alpha_equal(step(nullary, redexes(nullary)[0]), P("c1_U c2_U")));
}

TEST_CASE("redex positions") {
    // nothing fires under a binder or inside branches
    CHECK(redexes(P("\\x:U^0. (\\y:U^0. y) x")).empty());
    CHECK(redexes(P("c2_U {{ (\\y:U^0. y) c2_U, \\y:U^0. y }}")).size() == 1);
    // beta needs a value argument
    CHECK(redexes(P("(\\y:U^0. y) ((\\z:U^0. z) c2_U)")).size() == 1);
    auto two = redexes(P("c1_U ((\\y:U^0. y) c2_U) << \\a:U^0. \\b:U^0. b, c2_U >>"));
    CHECK(two.size() == 1);
    auto lo = redexes(P("(\\f:U^0 -o U^0. f) ((\\y:U^0. \\z:U^0. z) c2_U)"));
    REQUIRE(lo.size() == 1);
    CHECK(lo[0].position.size() == 1);
}

TEST_CASE("normalize stats and trace") {
    std::ostringstream trace;
    auto r = normalize(P("@UnAdd 2 1"), kDefaultFuel, AlgebraFamily::builtin(), &trace);
    CHECK(r.stats.steps == r.stats.beta + r.stats.conditional + r.stats.recursive);
    CHECK(r.stats.recursive == 3);
    std::size_t lines = 0;
    for (char ch : trace.str())
        lines += ch == '\n';
    CHECK(lines == r.stats.steps);
    CHECK(r.stats.max_term_size >= term_size(P("@UnAdd 2 1")));
    CHECK_THROWS_AS(normalize(P("@Square 3"), 5), FuelExhausted);
    try {
        normalize(P("@Square 3"), 5);
    } catch (const FuelExhausted& e) {
        CHECK(e.stats().steps == 5);
        CHECK(e.partial());
    }
}

TEST_CASE("reduct graph is confluent") {
    for (const char* s : {"@UnAdd 1 1", "@Coerc 2", "@Square 1", "(\\x:U^0. x) 2", "@Add 1 2"}) {
        CAPTURE(s);
        auto g = reducts(P(s));
        REQUIRE(g.exhaustive);
        CHECK(diamond_violations(g).empty());
        TermPtr nf;
        for (std::size_t i = 0; i < g.states.size(); ++i)
            if (g.succ[i].empty()) {
                if (nf)
                    CHECK(alpha_equal(nf, g.states[i]));
                nf = g.states[i];
            }
        REQUIRE(nf);
        CHECK(alpha_equal(nf, normalize(P(s)).term));
        CHECK(g.longest_path() >= normalize(P(s)).stats.steps);
        CHECK(g.max_term_size() >= term_size(P(s)));
    }
}

TEST_CASE("potential size") {
    auto p = algebraic_potential_size(P("@UnAdd 2 1"));
    CHECK(p.exhaustive);
    // the numeral 2 (three constructor occurrences) is the largest algebraic argument ever fired
    CHECK(p.value == encode_nat(2).size());
    CHECK(p.trace_value <= p.value);
    auto q = algebraic_potential_size(P("c2_U"));
    CHECK(q.value == 0);
}

TEST_CASE("assert_base_normal") {
    CHECK(decode_nat(assert_base_normal(P("@Add 2 2"), base_type(kU, 0))) == 4);
    CHECK(decode_binstring(assert_base_normal(P("b\"0110\""), base_type(kB, 0))) == "0110");
    CHECK_THROWS(assert_base_normal(P("\\x:U^0. x"), base_type(kU, 0)));
}
