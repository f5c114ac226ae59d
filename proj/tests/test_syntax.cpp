#include "doctest.h"

#include "linrec/error.hpp"
#include "linrec/stdlib.hpp"
#include "linrec/syntax.hpp"
#include "linrec/term.hpp"

using namespace linrec;

namespace {

const AlgebraFamily& F() { return AlgebraFamily::builtin(); }
ConsRef cU(int i) { return ConsRef{kU, i}; }

// Size clause by clause: atoms 1, abstraction +1, application additive, branches +n.
std::size_t oracle_size(const TermPtr& m) {
    switch (m->kind) {
    case TermKind::Var:
    case TermKind::Cons:
        return 1;
    case TermKind::Abs:
        return oracle_size(m->body()) + 1;
    case TermKind::App:
        return oracle_size(m->fun()) + oracle_size(m->arg());
    default: {
        std::size_t n = oracle_size(m->scrutinee());
        for (const auto& b : m->branches())
            n += oracle_size(b) + 1;
        return n;
    }
    }
}

} // namespace

TEST_CASE("builtin algebras") {
    CHECK(F().at(kU).is_word_algebra());
    CHECK(F().at(kB).is_word_algebra());
    CHECK_FALSE(F().at(kC).is_word_algebra());
    CHECK(F().max_arity() == 2);
    CHECK(F().constructor_name(cU(0)) == "c1_U");
    CHECK(F().find_constructor("c2_B").has_value());
    CHECK_FALSE(F().find_constructor("c9_U").has_value());
}

TEST_CASE("numerals and bit strings") {
    for (std::uint64_t n = 0; n < 20; ++n) {
        auto t = encode_nat(n);
        CHECK(t.size() == n + 1);
        CHECK(decode_nat(t) == n);
    }
    CHECK(to_string(encode_nat(2)) == "c1_U (c1_U c2_U)");
    for (std::string s : {"", "0", "1", "0110", "111000"})
        CHECK(decode_binstring(encode_binstring(s)) == s);
    CHECK_THROWS_AS(decode_nat(encode_binstring("01")), Error);
}

TEST_CASE("parse and print round trip") {
    const char* cases[] = {
        "\\x:U^0. x",
        "\\x:U^1. \\y:U^0. x << \\w:U^1. \\z:U^0. c1_U z, y >>",
        "\\x:U^1. x {{ \\y:U^1. y, c2_U }}",
        "(\\f:U^0 -o U^0. f) (\\x:U^0. c1_U x)",
        "c1_C c2_C (c1_C c2_C c2_C)",
        "c2_U@3",
    };
    for (const char* c : cases) {
        auto m = parse_term(c);
        auto back = parse_term(print_term(m));
        CHECK(alpha_equal(m, back));
        CHECK(print_term(back) == print_term(m));
    }
}

TEST_CASE("literals and macros") {
    auto m = parse_term("3", F(), stdlib_options());
    CHECK(to_algebraic(m) == encode_nat(3));
    auto b = parse_term("b\"10\"", F(), stdlib_options());
    CHECK(decode_binstring(*to_algebraic(b)) == "10");
    CHECK_THROWS_AS(parse_term("3"), ParseError);
    auto u = parse_term("@UnAdd@2", F(), stdlib_options());
    CHECK(alpha_equal(u, build("UnAdd", 2)));
}

TEST_CASE("parse errors carry positions") {
    try {
        parse_term("\\x:U^0.\n  (x");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
        CHECK(e.column() >= 3);
    }
    CHECK_THROWS_AS(parse_term("c7_U"), ParseError);
    CHECK_THROWS_AS(parse_term("x << >>"), ParseError);
}

TEST_CASE("user algebras keep declaration order") {
    auto p = parse_program("algebra T { c1/2, c2/0 } c1_T c2_T c2_T");
    auto id = p.family.find("T");
    REQUIRE(id.has_value());
    CHECK(p.family.constructor_count(*id) == 2);
    auto t = to_algebraic(p.term, p.family);
    REQUIRE(t.has_value());
    CHECK(t->size() == 3);
    CHECK(t->head.index == 0);
}

TEST_CASE("size follows the grammar") {
    for (const auto& name : builder_names()) {
        auto m = build(name, 1);
        CHECK(term_size(m) == oracle_size(m));
    }
    CHECK(term_size(parse_term("\\x:U^0. x")) == 2);
    CHECK(term_size(parse_term("c1_U c2_U")) == 2);
    CHECK(term_size(parse_term("\\x:U^1. x {{ \\y:U^1. y, c2_U }}")) == 7);
}

TEST_CASE("free variables and substitution") {
    std::map<std::string, VarId> fv;
    ParseOptions o;
    o.free_vars = &fv;
    auto m = parse_term("\\y:U^0. x y", F(), o);
    REQUIRE(fv.count("x"));
    CHECK(free_vars(m).size() == 1);
    CHECK_FALSE(is_closed(m));
    // substituting y for x must not capture
    auto yv = mk_var(fresh_var_id(), "y");
    auto s = substitute(m, fv["x"], yv);
    CHECK(free_vars(s).count(yv->var) == 1);
    CHECK(occurrences(s, yv->var) == 1);
    auto closed = substitute(m, fv["x"], parse_term("\\z:U^0. z"));
    CHECK(is_closed(closed));
}

TEST_CASE("alpha equivalence") {
    CHECK(alpha_equal(parse_term("\\x:U^0. x"), parse_term("\\y:U^0. y")));
    CHECK_FALSE(alpha_equal(parse_term("\\x:U^0. x"), parse_term("\\x:U^1. x")));
    CHECK(alpha_key(parse_term("\\a:U^0. \\b:U^0. a")) == alpha_key(parse_term("\\p:U^0. \\q:U^0. p")));
    CHECK(alpha_key(parse_term("\\a:U^0. \\b:U^0. a")) != alpha_key(parse_term("\\p:U^0. \\q:U^0. q")));
}

TEST_CASE("values") {
    CHECK(classify_value(parse_term("\\x:U^0. x")) == ValueClass::Abstraction);
    CHECK(classify_value(parse_term("c1_U c2_U")) == ValueClass::Algebraic);
    CHECK(classify_value(parse_term("(\\x:U^0. x) c2_U")) == ValueClass::NonValue);
    // partially applied constructors are not data
    CHECK_FALSE(to_algebraic(parse_term("c1_C c2_C")).has_value());
}

TEST_CASE("types and levels") {
    auto a = parse_type("U^2 -o U^0 -o C^1");
    CHECK(level(*a) == 2);
    CHECK(to_string(*a) == "U^2 -o U^0 -o C^1");
    CHECK(type_equal(arrows(2, base_type(kU, 0), base_type(kU, 0)), parse_type("U^0 -o U^0 -o U^0")));
    CHECK(type_equal(infer_constant_type(ConsRef{kC, 0}, 3), parse_type("C^3 -o C^3 -o C^3")));
}
