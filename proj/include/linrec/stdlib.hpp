#pragma once

#include "linrec/algebra.hpp"
#include "linrec/syntax.hpp"
#include "linrec/term.hpp"
#include "linrec/types.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace linrec {

// Library terms, annotated at result tier i. Names: UnAdd Predecessor Coerc Add Square
// Extract Duplicate Blowup Leaves Exp. Throws Error on an unknown name.
TermPtr build(std::string_view name, unsigned i = 0);
// The typing each builder is annotated for (valid in RH(A); see README for Square).
TypePtr builder_type(std::string_view name, unsigned i = 0);
const std::vector<std::string>& builder_names();

// Options enabling @Name / @Name@i macros and numeric literals.
ParseOptions stdlib_options(std::map<std::string, VarId>* free_vars = nullptr);

AlgebraicTerm overline(const AlgebraicTerm& t);
AlgebraicTerm ct(unsigned n);

// Some closed term of type a, built from nullary constructors and weakening.
TermPtr canonical_inhabitant(const TypePtr& a, const AlgebraFamily& fam = AlgebraFamily::builtin());

// [M]^w_{x,y}: M has free x:U^tx, y:U^ty and type a; the result has free w instead.
// Flat layout (tx == ty == n): w:U^n, typable in H(0). Ramified layout: w:U^{max+2}, typable in RH(0).
TermPtr dup_context(const TermPtr& m, VarId x, VarId y, VarId w, const std::string& w_name, const TypePtr& a,
                    unsigned tx, unsigned ty, bool ramified);

// Generalized duplication <M>^z_{x1..xn} at U^0 for a term M : U^0.
TermPtr dup_many(const TermPtr& m, const std::vector<VarId>& xs, VarId z, const std::string& z_name);

struct PrimRec;
using PrimRecPtr = std::shared_ptr<const PrimRec>;
struct PrimRec {
    enum class Kind { Zero, Succ, Proj, Compose, Rec } kind = Kind::Zero;
    unsigned n = 0, i = 0; // Proj
    std::vector<PrimRecPtr> args; // Compose: f, g1..gn; Rec: f, g

    unsigned arity() const;
};

PrimRecPtr pr_zero();
PrimRecPtr pr_succ();
PrimRecPtr pr_proj(unsigned n, unsigned i);
PrimRecPtr pr_compose(PrimRecPtr f, std::vector<PrimRecPtr> gs);
PrimRecPtr pr_rec(PrimRecPtr f, PrimRecPtr g);
PrimRecPtr pr_add();
PrimRecPtr pr_mul();

// `zero | succ | proj(n,i) | comp(f,g1,..) | rec(f,g) | add | mul`
PrimRecPtr parse_primrec(std::string_view s);
std::string to_string(const PrimRec& f);

// Meta-level evaluation; throws ResourceLimit past the step budget.
std::uint64_t eval_primrec(const PrimRec& f, const std::vector<std::uint64_t>& args,
                           std::uint64_t budget = 100'000'000);

// A closed term of type U^0 -o^n U^0 representing f, typable in H(0).
TermPtr compile_primrec(const PrimRec& f);

} // namespace linrec
