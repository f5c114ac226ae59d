#pragma once

#include "linrec/algebra.hpp"

#include <memory>
#include <string>

namespace linrec {

struct Type;
using TypePtr = std::shared_ptr<const Type>;

// Either a tiered base type A^n or a linear arrow.
struct Type {
    bool is_arrow = false;
    int algebra = -1;
    unsigned tier = 0;
    TypePtr dom;
    TypePtr cod;
};

TypePtr base_type(int algebra, unsigned tier);
TypePtr arrow_type(TypePtr dom, TypePtr cod);
// A -o^n B: n copies of A in front of B.
TypePtr arrows(unsigned n, const TypePtr& a, TypePtr b);

bool type_equal(const Type& a, const Type& b);
inline bool type_equal(const TypePtr& a, const TypePtr& b) { return type_equal(*a, *b); }

// V(A): the maximum tier occurring in A.
unsigned level(const Type& a);

std::string to_string(const Type& a, const AlgebraFamily& fam = AlgebraFamily::builtin());

// Type of a constructor at tier n: A^n -o^{arity} A^n.
TypePtr infer_constant_type(ConsRef c, unsigned tier, const AlgebraFamily& fam = AlgebraFamily::builtin());

} // namespace linrec
