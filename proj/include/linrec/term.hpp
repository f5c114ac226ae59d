#pragma once

#include "linrec/algebra.hpp"
#include "linrec/types.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace linrec {

enum class TermKind { Var, Cons, App, Abs, Cond, Rec };

using VarId = std::uint64_t;

// Process-wide fresh identifier.
VarId fresh_var_id();

struct Term;
using TermPtr = std::shared_ptr<const Term>;

// Immutable term node. Children layout by kind:
//   App: {fun, arg}; Abs: {body}; Cond/Rec: {scrutinee, branch_1, ..., branch_k}.
struct Term {
    TermKind kind = TermKind::Var;
    VarId var = 0;      // Var, Abs (binder)
    std::string name;   // Var, Abs (binder name, for printing only)
    ConsRef cons;       // Cons
    std::optional<unsigned> tier; // Cons: explicit @n annotation
    TypePtr annotation; // Abs
    std::vector<TermPtr> kids;
    std::size_t size = 1; // |M|, cached

    const TermPtr& fun() const { return kids[0]; }
    const TermPtr& arg() const { return kids[1]; }
    const TermPtr& body() const { return kids[0]; }
    const TermPtr& scrutinee() const { return kids[0]; }
    std::span<const TermPtr> branches() const { return {kids.data() + 1, kids.size() - 1}; }
};

TermPtr mk_var(VarId id, std::string name);
TermPtr mk_cons(ConsRef c, std::optional<unsigned> tier = std::nullopt);
TermPtr mk_app(TermPtr f, TermPtr a);
TermPtr mk_apps(TermPtr f, const std::vector<TermPtr>& args);
TermPtr mk_abs(VarId id, std::string name, TypePtr annotation, TermPtr body);
TermPtr mk_cond(TermPtr scrutinee, std::vector<TermPtr> branches);
TermPtr mk_rec(TermPtr scrutinee, std::vector<TermPtr> branches);

TermPtr from_algebraic(const AlgebraicTerm& t);
// Some(t) iff M is a constructor application with matching arities.
std::optional<AlgebraicTerm> to_algebraic(const TermPtr& m, const AlgebraFamily& fam = AlgebraFamily::builtin());

inline std::size_t term_size(const TermPtr& m) { return m->size; }

// Free variables with their printing names.
std::map<VarId, std::string> free_vars(const TermPtr& m);
bool is_closed(const TermPtr& m);
// Number of free occurrences of x.
std::size_t occurrences(const TermPtr& m, VarId x);

// M{V/x}, capture-avoiding. Binders clashing with free variables of V are renamed.
TermPtr substitute(const TermPtr& m, VarId x, const TermPtr& v);
// Simultaneous replacement of free variable identifiers by other variables.
TermPtr rename_vars(const TermPtr& m, const std::map<VarId, std::pair<VarId, std::string>>& ren);

enum class ValueClass { Variable, Abstraction, Algebraic, NonValue };
ValueClass classify_value(const TermPtr& m);
inline bool is_value(const TermPtr& m) { return classify_value(m) != ValueClass::NonValue; }
const char* value_class_name(ValueClass c);

// Identifier-insensitive structural equality (binder annotations and tiers included).
bool alpha_equal(const TermPtr& a, const TermPtr& b);
// Canonical serialization: alpha-equivalent terms get the same key.
std::string alpha_key(const TermPtr& m);

// Subterm selection by child-index path.
using Path = std::vector<int>;
const TermPtr& subterm_at(const TermPtr& m, const Path& p);
TermPtr replace_at(const TermPtr& m, const Path& p, TermPtr replacement);
std::string path_string(const Path& p);

} // namespace linrec
