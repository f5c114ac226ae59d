#include "linrec/types.hpp"

#include <algorithm>

namespace linrec {

TypePtr base_type(int algebra, unsigned tier) {
    auto t = std::make_shared<Type>();
    t->algebra = algebra;
    t->tier = tier;
    return t;
}

TypePtr arrow_type(TypePtr dom, TypePtr cod) {
    auto t = std::make_shared<Type>();
    t->is_arrow = true;
    t->dom = std::move(dom);
    t->cod = std::move(cod);
    return t;
}

TypePtr arrows(unsigned n, const TypePtr& a, TypePtr b) {
    for (unsigned i = 0; i < n; ++i)
        b = arrow_type(a, std::move(b));
    return b;
}

bool type_equal(const Type& a, const Type& b) {
    if (&a == &b)
        return true;
    if (a.is_arrow != b.is_arrow)
        return false;
    if (!a.is_arrow)
        return a.algebra == b.algebra && a.tier == b.tier;
    return type_equal(*a.dom, *b.dom) && type_equal(*a.cod, *b.cod);
}

unsigned level(const Type& a) {
    if (!a.is_arrow)
        return a.tier;
    return std::max(level(*a.dom), level(*a.cod));
}

static void print_type(const Type& a, const AlgebraFamily& fam, std::string& out) {
    if (!a.is_arrow) {
        out += fam.at(a.algebra).name + "^" + std::to_string(a.tier);
        return;
    }
    if (a.dom->is_arrow) {
        out += '(';
        print_type(*a.dom, fam, out);
        out += ')';
    } else {
        print_type(*a.dom, fam, out);
    }
    out += " -o ";
    print_type(*a.cod, fam, out);
}

std::string to_string(const Type& a, const AlgebraFamily& fam) {
    std::string out;
    print_type(a, fam, out);
    return out;
}

TypePtr infer_constant_type(ConsRef c, unsigned tier, const AlgebraFamily& fam) {
    auto b = base_type(c.algebra, tier);
    return arrows(fam.arity(c), b, b);
}

} // namespace linrec
