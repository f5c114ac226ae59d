#pragma once

#include "linrec/error.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cstddef>
#include <string>

namespace linrec {

using BigNat = boost::multiprecision::cpp_int;

inline constexpr std::size_t kDefaultBitCeiling = std::size_t{1} << 20;

// A lower bound on a monotone quantity. Exact unless saturated; a saturated value is 2^ceiling,
// and the true value is at least that.
struct BoundValue {
    BigNat value;
    bool saturated = false;
    std::string str() const; // decimal, or ">=2^N"
};

struct Justification {
    BigNat s, r, q, p;
};

// s_d = x y^d; r = K(y + x + xy); q_d = x + s_d x y + s_d r; p_d = s_d x + s_d + q_d.
Justification justification_bounds(unsigned d, const BigNat& x, const BigNat& y, unsigned K);

// p_0(x,y) = K^{xy}; h_i(x,y,0) = K^{xy}; h_i(x,y,z+1) = h_i(x,y,z) + p_{i-1}(x, y + h_i(x,y,z)); p_i = h_i(x,y,xy).
BoundValue primrec_bound_lower(unsigned d, const BigNat& x, const BigNat& y, unsigned K,
                               std::size_t ceiling = kDefaultBitCeiling);
BoundValue primrec_h_lower(unsigned i, const BigNat& x, const BigNat& y, const BigNat& z, unsigned K,
                           std::size_t ceiling = kDefaultBitCeiling);
// Exact; ResourceLimit once a value passes the ceiling.
BigNat primrec_bound(unsigned d, const BigNat& x, const BigNat& y, unsigned K,
                     std::size_t ceiling = kDefaultBitCeiling);
BigNat primrec_h(unsigned i, const BigNat& x, const BigNat& y, const BigNat& z, unsigned K,
                 std::size_t ceiling = kDefaultBitCeiling);

// p^0_m(x) = K^{x^2}; p^{n+1}_m(x) = K^{x (x p^n_m(x))^m}.
BoundValue elementary_bound_lower(unsigned i, unsigned m, const BigNat& x, unsigned K,
                                  std::size_t ceiling = kDefaultBitCeiling);
BigNat elementary_bound(unsigned i, unsigned m, const BigNat& x, unsigned K, std::size_t ceiling = kDefaultBitCeiling);

// p^0_m(x) = x^2; p^{n+1}_m(x) = x (x p^n_m(x))^e with e = n as printed, or e = m.
enum class PolyExponent { Printed, M };
BigNat polynomial_bound(unsigned i, unsigned m, const BigNat& x, PolyExponent e = PolyExponent::Printed);

} // namespace linrec
