#include "doctest.h"

#include "json.hpp"
#include "linrec/audit.hpp"
#include "linrec/bounds.hpp"
#include "linrec/error.hpp"
#include "linrec/stdlib.hpp"
#include "linrec/syntax.hpp"

#include <random>

using namespace linrec;

namespace {

BigNat pw(unsigned k, const BigNat& e) {
    BigNat r = 1;
    for (BigNat i = 0; i < e; ++i)
        r *= k;
    return r;
}

// Direct transcriptions of the recursions, no saturation or caching.
BigNat naive_p(unsigned d, const BigNat& x, const BigNat& y, unsigned K);
BigNat naive_h(unsigned i, const BigNat& x, const BigNat& y, const BigNat& z, unsigned K) {
    if (z == 0)
        return pw(K, x * y);
    BigNat prev = naive_h(i, x, y, z - 1, K);
    return prev + naive_p(i - 1, x, y + prev, K);
}
BigNat naive_p(unsigned d, const BigNat& x, const BigNat& y, unsigned K) {
    if (d == 0)
        return pw(K, x * y);
    return naive_h(d, x, y, x * y, K);
}

BigNat naive_elem(unsigned i, unsigned m, const BigNat& x, unsigned K) {
    if (i == 0)
        return pw(K, x * x);
    return pw(K, x * boost::multiprecision::pow(x * naive_elem(i - 1, m, x, K), m));
}

BigNat naive_poly(unsigned i, unsigned m, const BigNat& x, bool printed) {
    if (i == 0)
        return x * x;
    unsigned e = printed ? i - 1 : m;
    return x * boost::multiprecision::pow(x * naive_poly(i - 1, m, x, printed), e);
}

bool le(const BoundValue& a, const BoundValue& b) {
    // a saturated value only says "at least"; the order is unknown past the ceiling
    if (b.saturated)
        return true;
    return !a.saturated && a.value <= b.value;
}

} // namespace

TEST_CASE("justification polynomials") {
    auto j = justification_bounds(2, 5, 3, 2);
    CHECK(j.s == 45);
    CHECK(j.r == 2 * (3 + 5 + 15));
    CHECK(j.q == 5 + 45 * 5 * 3 + 45 * j.r);
    CHECK(j.p == 45 * 5 + 45 + j.q);
    CHECK(justification_bounds(0, 7, 9, 3).s == 7);
    for (unsigned d = 0; d < 4; ++d)
        for (unsigned x = 0; x < 5; ++x)
            for (unsigned y = 0; y < 5; ++y) {
                auto a = justification_bounds(d, x, y, 2);
                CHECK(a.s == BigNat(x) * boost::multiprecision::pow(BigNat(y), d));
            }
}

TEST_CASE("primitive recursive family against the naive recursion") {
    for (unsigned K : {1u, 2u})
        for (unsigned x = 0; x <= 2; ++x)
            for (unsigned y = 0; y <= 2; ++y) {
                CHECK(primrec_bound(0, x, y, K) == naive_p(0, x, y, K));
                // past xy = 2 the K = 2 values leave the representable range
                if (K == 2 && x * y > 2)
                    continue;
                CHECK(primrec_bound(1, x, y, K) == naive_p(1, x, y, K));
                for (unsigned z = 0; z <= x * y; ++z)
                    CHECK(primrec_h(1, x, y, z, K) == naive_h(1, x, y, z, K));
            }
    CHECK(primrec_bound(0, 2, 3, 2) == 64);
    CHECK(primrec_bound(1, 1, 1, 2) == naive_p(1, 1, 1, 2));
    CHECK(primrec_bound(2, 1, 1, 1) == naive_p(2, 1, 1, 1));
    auto big = primrec_bound_lower(1, 2, 2, 2);
    CHECK(big.saturated);
    CHECK(big.str().rfind(">=2^", 0) == 0);
    CHECK_THROWS_AS(primrec_bound(1, 2, 2, 2), ResourceLimit);
    auto exact = primrec_bound_lower(1, 2, 1, 2);
    CHECK_FALSE(exact.saturated);
    CHECK(exact.value == naive_p(1, 2, 1, 2));
}

TEST_CASE("elementary and polynomial families") {
    for (unsigned i = 0; i <= 1; ++i)
        for (unsigned m = 0; m <= 2; ++m)
            for (unsigned x = 0; x <= 2; ++x) {
                CAPTURE(i);
                CAPTURE(m);
                CAPTURE(x);
                CHECK(elementary_bound(i, m, x, 2) == naive_elem(i, m, x, 2));
            }
    CHECK(elementary_bound(0, 1, 4, 2) == 65536);
    for (unsigned i = 0; i <= 3; ++i)
        for (unsigned m = 0; m <= 3; ++m)
            for (unsigned x = 0; x <= 4; ++x) {
                CHECK(polynomial_bound(i, m, x, PolyExponent::Printed) == naive_poly(i, m, x, true));
                CHECK(polynomial_bound(i, m, x, PolyExponent::M) == naive_poly(i, m, x, false));
            }
    CHECK(polynomial_bound(0, 0, 5) == 25);
    CHECK(polynomial_bound(1, 3, 2, PolyExponent::M) == 2 * 8 * 8 * 8);
    // the printed exponent drops to zero one tier up
    CHECK(polynomial_bound(1, 3, 2, PolyExponent::Printed) == 2);
    CHECK(polynomial_bound(1, 0, 2, PolyExponent::M) == 2);
}

TEST_CASE("monotonicity samples") {
    std::mt19937 rng(7);
    std::uniform_int_distribution<unsigned> small(0, 3);
    for (int n = 0; n < 100; ++n) {
        unsigned d = small(rng) % 3, x = small(rng), y = small(rng);
        CHECK(le(primrec_bound_lower(d, x, y, 2), primrec_bound_lower(d, x + 1, y, 2)));
        CHECK(le(primrec_bound_lower(d, x, y, 2), primrec_bound_lower(d, x, y + 1, 2)));
        CHECK(le(primrec_bound_lower(d, x, y, 2), primrec_bound_lower(d + 1, x, y, 2)));
        unsigned i = small(rng) % 3, m = small(rng);
        CHECK(le(elementary_bound_lower(i, m, x, 2), elementary_bound_lower(i, m, x + 1, 2)));
        CHECK(le(elementary_bound_lower(i, m % 2, x + 1, 2), elementary_bound_lower(i, m % 2 + 1, x + 1, 2)));
        CHECK(polynomial_bound(i, m, x, PolyExponent::M) <= polynomial_bound(i, m, x + 1, PolyExponent::M));
        CHECK(polynomial_bound(i, m, x + 1, PolyExponent::M) <= polynomial_bound(i, m + 1, x + 1, PolyExponent::M));
        CHECK(polynomial_bound(i, m, x, PolyExponent::Printed) <= polynomial_bound(i, m, x + 1, PolyExponent::Printed));
        CHECK(polynomial_bound(i, m, x, PolyExponent::Printed) == polynomial_bound(i, m + 1, x, PolyExponent::Printed));
        // growth in the tier needs a positive exponent: at m = 0 the step collapses to x
        unsigned m1 = 1 + m % 2;
        CHECK(le(elementary_bound_lower(i, m1, x + 1, 2), elementary_bound_lower(i + 1, m1, x + 1, 2)));
        CHECK(polynomial_bound(i, m1, x + 1, PolyExponent::M) <= polynomial_bound(i + 1, m1, x + 1, PolyExponent::M));
    }
}

TEST_CASE("verdicts") {
    BoundValue ten{10, false};
    BoundValue sat{BigNat(1) << 20, true};
    CHECK(compare_bound(5, true, ten, true) == Verdict::Pass);
    CHECK(compare_bound(5, false, ten, true) == Verdict::Inconclusive);
    CHECK(compare_bound(11, true, ten, true) == Verdict::Fail);
    CHECK(compare_bound(11, true, ten, false) == Verdict::Inconclusive);
    CHECK(compare_bound(11, true, sat, true) == Verdict::Pass);
    CHECK(std::string(verdict_name(Verdict::Pass)) == "pass");
}

TEST_CASE("audit report") {
    auto m = parse_term("@UnAdd 1 1", AlgebraFamily::builtin(), stdlib_options());
    auto sys = Subsystem::parse("H(A)");
    auto r = audit(m, sys);
    CHECK(r.overall() == Verdict::Pass);
    auto a = to_json(r);
    CHECK(a == to_json(audit(m, sys)));
    auto j = nlohmann::json::parse(a);
    CHECK(j["subsystem"] == "H(A)");
    CHECK(j["verdict"] == "pass");
    CHECK(j["sizes"]["term"] == term_size(m));
    CHECK(j["sizes"]["recursion_depth"] == 1);
    CHECK(j["evaluation"]["normal_form"] == "c1_U (c1_U c2_U)");
    for (const char* k : {"term", "type", "sizes", "evaluation", "semantics", "lemmas", "checks"})
        CHECK(j.contains(k));
    for (const auto& c : j["checks"])
        CHECK(c["verdict"] != "fail");
    for (const auto& l : j["lemmas"])
        CHECK(l["ok"] == true);
}
