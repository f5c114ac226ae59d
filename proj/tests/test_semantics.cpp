#include "doctest.h"

#include "linrec/error.hpp"
#include "linrec/eval.hpp"
#include "linrec/semantics.hpp"
#include "linrec/stdlib.hpp"
#include "linrec/syntax.hpp"

#include <algorithm>
#include <set>

using namespace linrec;

namespace {

TermPtr P(const std::string& s) { return parse_term(s, AlgebraFamily::builtin(), stdlib_options()); }

struct Built {
    TermPtr m;
    DerivPtr d;
    InteractionGraph g;
    TreeSet s;
};

Built make(const std::string& src, const char* sys = "H(A)") {
    Built b;
    b.m = P(src);
    b.d = synthesize({}, b.m, Subsystem::parse(sys));
    b.g = build_graph(*b.d);
    b.s = enumerate_trees(b.g);
    return b;
}

// Algebraic arguments fired anywhere in the reduct space, collected from the evaluator directly.
std::set<AlgebraicTerm> fired(const TermPtr& m) {
    std::set<AlgebraicTerm> out;
    auto g = reducts(m);
    REQUIRE(g.exhaustive);
    for (const auto& rs : g.redexes)
        for (const auto& r : rs)
            if (auto a = to_algebraic(r.argument))
                out.insert(*a);
    return out;
}

std::size_t occurrences_of(const AlgebraicTerm& t) {
    std::size_t n = 1;
    for (const auto& a : t.args)
        n += occurrences_of(a);
    return n;
}

} // namespace

TEST_CASE("term contexts") {
    auto t = plug({}, encode_nat(0));
    CHECK(t == encode_nat(0));
    auto tree = AlgebraicTerm(ConsRef{kC, 0}, {AlgebraicTerm(ConsRef{kC, 0}, {AlgebraicTerm(ConsRef{kC, 1}), AlgebraicTerm(ConsRef{kC, 1})}),
                                                AlgebraicTerm(ConsRef{kC, 1})});
    for (const auto& t0 : {encode_nat(3), encode_binstring("0110"), tree}) {
        auto ds = decompositions(t0);
        // one decomposition per constructor occurrence
        CHECK(ds.size() == occurrences_of(t0));
        CHECK(ds.front().first.is_hole());
        CHECK(ds.front().second == t0);
        for (const auto& [u, s] : ds) {
            CHECK(plug(u, s) == t0);
            CHECK(u.size() + s.size() == t0.size());
        }
    }
    CHECK(to_string(TermContext{}) == "[.]");
}

TEST_CASE("type contexts") {
    auto a = parse_type("(U^0 -o U^1) -o U^2");
    CHECK(TypeContext{""}.positive());
    CHECK_FALSE(TypeContext{"d"}.positive());
    CHECK(TypeContext{"dd"}.positive());
    CHECK(TypeContext{"dc"}.positive() == false);
    CHECK(type_equal(*focus_type(a, {"c"}), *base_type(kU, 2)));
    CHECK(type_equal(*focus_type(a, {"dd"}), *base_type(kU, 0)));
    CHECK(type_equal(*focus_type(a, {"dc"}), *base_type(kU, 1)));
    CHECK_FALSE(focus_type(a, {"d"}));
    CHECK_FALSE(focus_type(a, {""}));
    CHECK_FALSE(focus_type(a, {"cc"}));
}

TEST_CASE("labels are well typed and deterministic") {
    for (const char* src : {"(\\x:U^0. x) 2", "@UnAdd 1 1", "@Coerc 2", "@Square 1", "@Add 2 1"}) {
        CAPTURE(src);
        auto b = make(src);
        REQUIRE(b.s.exhaustive());
        REQUIRE(b.s.size() > 0);
        for (int n = 0; n < int(b.s.size()); ++n) {
            const auto& l = b.s.label(n);
            auto ft = focus_type(b.g.edges[static_cast<std::size_t>(l.edge)].type, l.focus);
            REQUIRE(ft);
            CHECK(ft->algebra == l.t.algebra());
            CHECK(l.stack.size() <= recursion_depth(*b.d));
            for (int c : b.s.children(n))
                CHECK(c < n);
            CHECK(b.s.find(l.edge, l.stack, l.focus) == n);
            auto t = b.s.materialize(n);
            CHECK(t.children.size() == b.s.children(n).size());
            CHECK(legal_stacks(t).size() == legal_stack_count(b.s, n));
            CHECK(subtree_locator(b.s, n, {}, l.t) == n);
        }
        CHECK(b.s.dump_all() == enumerate_trees(b.g).dump_all());
        CHECK_THROWS_AS(subtree_locator(b.s, 0, {}, encode_binstring("111")), DecompositionMismatch);
    }
}

TEST_CASE("completeness against fired arguments") {
    for (const char* src : {"(\\x:U^0. x) 2", "@UnAdd 1 1", "@Coerc 2", "@Square 1"}) {
        CAPTURE(src);
        auto b = make(src);
        auto terms = b.s.terms();
        std::set<AlgebraicTerm> have(terms.begin(), terms.end());
        for (const auto& a : fired(b.m))
            CHECK(have.count(a) == 1);
        auto r = completeness_check(b.m, *b.d);
        CHECK(r.conclusive);
        CHECK(r.ok());
        CHECK(r.arguments.size() == fired(b.m).size());
    }
}

TEST_CASE("lemma suite holds on the corpus") {
    struct Case {
        const char* src;
        const char* sys;
    };
    for (auto c : {Case{"@UnAdd 1 1", "H(A)"}, Case{"@Coerc 2", "RH(W)"}, Case{"@Square 1", "RH(0)"},
                   Case{"@Add 2 1", "RH(0)"}, Case{"@Exp 2", "RH(A)"}, Case{"@Leaves (@Blowup 2)", "H(A)"},
                   Case{"@Predecessor 2", "RH(W)"}}) {
        CAPTURE(c.src);
        auto b = make(c.src, c.sys);
        REQUIRE(b.s.exhaustive());
        for (const auto& r : check_lemmas(b.g, b.s, *b.d, Subsystem::parse(c.sys))) {
            CAPTURE(r.name);
            CHECK(r.ok());
            CHECK(r.checked > 0);
        }
        CHECK(b.s.uniqueness_conflicts().empty());
    }
}

TEST_CASE("lemma checks detect violations") {
    auto b = make("@UnAdd 1 1");
    // some token travels inside the box, so a zero bound on stack length must fail
    CHECK_FALSE(check_stack_length(b.s, 0).ok());
    CHECK(check_stack_length(b.s, 1).ok());
    std::size_t deepest = 0;
    for (int n = 0; n < int(b.s.size()); ++n)
        deepest = std::max(deepest, b.s.label(n).stack.size());
    CHECK(deepest == 1);
}

TEST_CASE("caps") {
    auto m = P("@Square 2");
    auto d = synthesize({}, m, Subsystem::parse("H(A)"));
    auto g = build_graph(*d);
    SemCaps caps;
    caps.max_trees = 5;
    auto s = enumerate_trees(g, caps);
    CHECK_FALSE(s.exhaustive());
    CHECK_FALSE(s.cap_note().empty());
    CHECK(s.size() <= 5);
}

TEST_CASE("preservation along a run") {
    for (const char* src : {"@UnAdd 1 1", "@Square 1"}) {
        auto m = P(src);
        auto sys = Subsystem::parse("H(A)");
        auto cur = m;
        for (int i = 0; i < 40; ++i) {
            auto rs = redexes(cur);
            if (rs.empty())
                break;
            auto next = step(cur, rs.front());
            auto r = preservation_check(cur, next, sys);
            CHECK(r.conclusive);
            CHECK(r.ok());
            cur = next;
        }
    }
}
