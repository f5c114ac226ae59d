#include "doctest.h"

#include "linrec/error.hpp"
#include "linrec/eval.hpp"
#include "linrec/stdlib.hpp"
#include "linrec/syntax.hpp"
#include "linrec/typecheck.hpp"

#include <map>
#include <set>

using namespace linrec;

namespace {

TermPtr P(const std::string& s) { return parse_term(s, AlgebraFamily::builtin(), stdlib_options()); }

std::string code_of(const TermPtr& m, const Subsystem& sys) {
    try {
        synthesize({}, m, sys);
        return "ok";
    } catch (const TypeError& e) {
        return e.diagnostic().code;
    }
}

} // namespace

TEST_CASE("subsystem names") {
    for (auto s : {"H(A)", "H(W)", "H(0)", "RH(A)", "RH(W)", "RH(0)"})
        CHECK(Subsystem::parse(s).name() == s);
    CHECK(Subsystem::all_six().size() == 6);
    CHECK_THROWS_AS(Subsystem::parse("H(X)"), Error);
    auto w = Subsystem::parse("H(W)");
    CHECK(w.admits(*base_type(kU, 3)));
    CHECK_FALSE(w.admits(*base_type(kC, 0)));
    CHECK_FALSE(Subsystem::parse("H(0)").admits(*base_type(kU, 0)));
}

TEST_CASE("stdlib typing matrix") {
    // Builders needing contraction at C (a tree algebra) live in A only; UnAdd's branch has a free
    // variable, so its recursion needs a nonempty context class.
    std::map<std::string, std::set<std::string>> rejected = {
        {"UnAdd", {"H(0)", "RH(0)"}},
        {"Blowup", {"H(W)", "H(0)", "RH(W)", "RH(0)"}},
        {"Exp", {"H(W)", "H(0)", "RH(W)", "RH(0)"}},
    };
    for (const auto& name : builder_names())
        for (const auto& sys : Subsystem::all_six()) {
            CAPTURE(name);
            CAPTURE(sys.name());
            auto code = code_of(build(name, 0), sys);
            bool expect_reject = rejected[name].count(sys.name()) > 0;
            CHECK((code != "ok") == expect_reject);
        }
    CHECK(code_of(build("UnAdd", 0), Subsystem::parse("RH(0)")) == "RecursionContextViolation");
    CHECK(code_of(build("Exp", 0), Subsystem::parse("RH(W)")) == "ContractionNotAllowed");
}

TEST_CASE("builders check at their stated types") {
    auto rha = Subsystem::parse("RH(A)");
    for (const auto& name : builder_names())
        for (unsigned i = 0; i < 3; ++i) {
            CAPTURE(name);
            auto d = check({}, build(name, i), builder_type(name, i), rha);
            CHECK(validate_derivation(*d, rha).empty());
            CHECK(is_standard_form(*d));
        }
    auto ha = Subsystem::parse("H(A)");
    CHECK(type_equal(synthesize({}, build("Add", 2), ha)->type, parse_type("U^3 -o U^2 -o U^2")));
    CHECK(type_equal(builder_type("Exp", 1), parse_type("U^3 -o U^1")));
    CHECK(type_equal(builder_type("Coerc", 0), parse_type("U^1 -o U^0")));
}

TEST_CASE("recursion depth and highest tier") {
    auto ha = Subsystem::parse("H(A)");
    auto d = synthesize({}, build("UnAdd", 0), ha);
    CHECK(recursion_depth(*d) == 1);
    CHECK(highest_tier(*d) == 1);
    CHECK(count_rule(*d, Rule::Recursion) == 1);
    auto c = synthesize({}, P("c2_U"), ha);
    CHECK(recursion_depth(*c) == 0);
    CHECK(highest_tier(*c) == 0);
    // Square nests a recursion inside a branch of another
    auto s = synthesize({}, build("Square", 0), Subsystem::parse("RH(0)"));
    CHECK(recursion_depth(*s) == 2);
}

TEST_CASE("diagnostics") {
    auto h0 = Subsystem::parse("H(0)");
    auto ha = Subsystem::parse("H(A)");
    auto rha = Subsystem::parse("RH(A)");
    CHECK(code_of(P("\\x:C^0. c1_C x x"), h0) == "ContractionNotAllowed");
    CHECK(code_of(P("\\x:C^0. c1_C x x"), ha) == "ok");
    CHECK(code_of(P("\\x:C^0. c1_C x x"), Subsystem::parse("H(W)")) == "ContractionNotAllowed");
    CHECK(code_of(P("\\x:U^0. x x"), ha) == "TypeMismatch");
    CHECK(code_of(P("\\x:U^0. x << \\w:U^0. \\z:U^0. z, c2_U >>"), ha) == "ok");
    CHECK(code_of(P("\\x:U^0. x << \\w:U^0. \\z:U^0. z, c2_U@0 >>"), rha) == "RamificationViolation");
    CHECK_THROWS_AS(P("\\x:U^1. x << c2_U >>"), ParseError);
    auto x = fresh_var_id();
    auto short_rec = mk_abs(x, "x", base_type(kU, 1), mk_rec(mk_var(x, "x"), {P("c2_U")}));
    CHECK(code_of(short_rec, ha) == "BranchArityMismatch");
    std::map<std::string, VarId> fv;
    auto opts = stdlib_options(&fv);
    auto open = parse_term("c1_U y", AlgebraFamily::builtin(), opts);
    try {
        synthesize({}, open, ha);
        FAIL("expected an error");
    } catch (const TypeError& e) {
        CHECK(e.diagnostic().code == "UnboundVariable");
        CHECK_FALSE(e.diagnostic().location.empty());
    }
    auto d = synthesize({{fv["y"], "y", base_type(kU, 2)}}, open, ha);
    CHECK(type_equal(d->type, base_type(kU, 2)));
}

TEST_CASE("contexts may drop unused variables") {
    std::map<std::string, VarId> fv;
    auto m = parse_term("c2_U", AlgebraFamily::builtin(), stdlib_options(&fv));
    auto x = fresh_var_id();
    auto d = check({{x, "x", base_type(kU, 0)}}, m, base_type(kU, 0), Subsystem::parse("H(0)"));
    CHECK(d->context.empty());
}

TEST_CASE("standardize is idempotent") {
    auto ha = Subsystem::parse("H(A)");
    for (const auto& name : builder_names()) {
        auto d = synthesize({}, build(name, 1), ha);
        auto s1 = standardize(d, ha);
        auto s2 = standardize(s1, ha);
        CHECK(derivation_summary(*s1) == derivation_summary(*s2));
        CHECK(is_standard_form(*s1));
    }
}

TEST_CASE("subject reduction along evaluation") {
    const char* corpus[] = {"@UnAdd 2 1", "@Add 2 2", "@Coerc 3", "@Square 2", "@Exp 2", "@Extract (@Duplicate@1 2)",
                            "@Leaves (@Blowup 2)", "@Predecessor 3"};
    auto rha = Subsystem::parse("RH(A)");
    for (const char* c : corpus) {
        CAPTURE(c);
        auto m = P(c);
        auto a = synthesize({}, m, rha)->type;
        for (int steps = 0; steps < 400; ++steps) {
            auto rs = redexes(m);
            if (rs.empty())
                break;
            m = step(m, rs.front());
            CHECK_NOTHROW(check({}, m, a, rha));
        }
    }
}
