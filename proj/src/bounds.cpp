#include "linrec/bounds.hpp"

#include <limits>

namespace linrec {

namespace {

class Sat {
public:
    explicit Sat(std::size_t ceiling) : ceiling_(ceiling) {}

    BoundValue make(BigNat v, bool sat = false) const {
        if (sat || bits(v) > ceiling_)
            return top();
        return {std::move(v), false};
    }

    BoundValue top() const { return {BigNat(1) << ceiling_, true}; }

    BoundValue add(const BoundValue& a, const BoundValue& b) const {
        if (a.saturated || b.saturated)
            return top();
        return make(a.value + b.value);
    }

    BoundValue mul(const BoundValue& a, const BoundValue& b) const {
        // a saturated value is never 0, so a zero factor is exact
        if (a.value == 0 || b.value == 0)
            return make(0);
        if (a.saturated || b.saturated)
            return top();
        if (bits(a.value) + bits(b.value) > ceiling_ + 1)
            return top();
        return make(a.value * b.value);
    }

    BoundValue pow(const BoundValue& base, unsigned e) const {
        BoundValue r = make(1);
        for (unsigned i = 0; i < e; ++i)
            r = mul(r, base);
        return r;
    }

    // K^e
    BoundValue exp(unsigned K, const BoundValue& e) const {
        if (K <= 1 || e.value == 0)
            return make(K == 0 && e.value != 0 ? 0 : 1);
        if (e.saturated)
            return top();
        std::size_t lg = bits(BigNat(K)) - 1;            // floor(log2 K) >= 1
        if (e.value > BigNat(ceiling_) || static_cast<std::size_t>(e.value) * lg > ceiling_)
            return top();
        return make(boost::multiprecision::pow(BigNat(K), static_cast<unsigned>(e.value)));
    }

    static std::size_t bits(const BigNat& v) { return v == 0 ? 0 : boost::multiprecision::msb(v) + 1; }

private:
    std::size_t ceiling_;
};

BoundValue h_rec(const Sat& a, unsigned i, const BoundValue& x, const BoundValue& y, const BigNat& z, unsigned K);

BoundValue p_rec(const Sat& a, unsigned d, const BoundValue& x, const BoundValue& y, unsigned K) {
    if (d == 0)
        return a.exp(K, a.mul(x, y));
    BoundValue xy = a.mul(x, y);
    if (xy.saturated)
        return a.top();
    return h_rec(a, d, x, y, xy.value, K);
}

BoundValue h_rec(const Sat& a, unsigned i, const BoundValue& x, const BoundValue& y, const BigNat& z, unsigned K) {
    BoundValue h = a.exp(K, a.mul(x, y));
    BigNat steps = 0;
    for (BigNat j = 0; j < z; ++j) {
        if (h.saturated)
            return h; // monotone, stays at the ceiling
        if (++steps > 10'000'000)
            throw ResourceLimit("recurrence too long to unfold");
        h = a.add(h, p_rec(a, i - 1, x, a.add(y, h), K));
    }
    return h;
}

BigNat exact(const BoundValue& v, const char* what) {
    if (v.saturated)
        throw ResourceLimit(std::string(what) + " exceeds the bit-length ceiling");
    return v.value;
}

} // namespace

std::string BoundValue::str() const {
    if (saturated)
        return ">=2^" + std::to_string(Sat::bits(value) - 1);
    return value.str();
}

Justification justification_bounds(unsigned d, const BigNat& x, const BigNat& y, unsigned K) {
    Justification j;
    j.s = x * boost::multiprecision::pow(y, d);
    j.r = BigNat(K) * (y + x + x * y);
    j.q = x + j.s * x * y + j.s * j.r;
    j.p = j.s * x + j.s + j.q;
    return j;
}

BoundValue primrec_bound_lower(unsigned d, const BigNat& x, const BigNat& y, unsigned K, std::size_t ceiling) {
    Sat a(ceiling);
    return p_rec(a, d, a.make(x), a.make(y), K);
}

BoundValue primrec_h_lower(unsigned i, const BigNat& x, const BigNat& y, const BigNat& z, unsigned K,
                           std::size_t ceiling) {
    if (i == 0)
        throw Error("h_i is defined for i >= 1");
    Sat a(ceiling);
    return h_rec(a, i, a.make(x), a.make(y), z, K);
}

BigNat primrec_bound(unsigned d, const BigNat& x, const BigNat& y, unsigned K, std::size_t ceiling) {
    return exact(primrec_bound_lower(d, x, y, K, ceiling), "primitive recursive bound");
}

BigNat primrec_h(unsigned i, const BigNat& x, const BigNat& y, const BigNat& z, unsigned K, std::size_t ceiling) {
    return exact(primrec_h_lower(i, x, y, z, K, ceiling), "h recurrence");
}

BoundValue elementary_bound_lower(unsigned i, unsigned m, const BigNat& x, unsigned K, std::size_t ceiling) {
    Sat a(ceiling);
    BoundValue X = a.make(x);
    BoundValue p = a.exp(K, a.mul(X, X));
    for (unsigned n = 0; n < i; ++n)
        p = a.exp(K, a.mul(X, a.pow(a.mul(X, p), m)));
    return p;
}

BigNat elementary_bound(unsigned i, unsigned m, const BigNat& x, unsigned K, std::size_t ceiling) {
    return exact(elementary_bound_lower(i, m, x, K, ceiling), "elementary bound");
}

BigNat polynomial_bound(unsigned i, unsigned m, const BigNat& x, PolyExponent e) {
    BigNat p = x * x;
    for (unsigned n = 0; n < i; ++n)
        p = x * boost::multiprecision::pow(x * p, e == PolyExponent::Printed ? n : m);
    return p;
}

} // namespace linrec
