#pragma once

#include "linrec/algebra.hpp"
#include "linrec/error.hpp"
#include "linrec/term.hpp"
#include "linrec/types.hpp"

#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace linrec {

enum class ContractionClass { All, WordBases, Empty, Custom };

// H(D) when !ramified, RH(D) otherwise.
struct Subsystem {
    ContractionClass contraction = ContractionClass::All;
    bool ramified = false;
    std::function<bool(const Type&)> custom; // ContractionClass::Custom

    // Membership of a type in D. D only ever holds base types.
    bool admits(const Type& t, const AlgebraFamily& fam = AlgebraFamily::builtin()) const;
    std::string name() const;

    // "H(A) | H(W) | H(0) | RH(A) | RH(W) | RH(0)"; throws linrec::Error otherwise.
    static Subsystem parse(std::string_view s);
    static std::vector<Subsystem> all_six();
};

enum class Rule { Axiom, Weakening, Contraction, LolliIntro, LolliElim, Constant, Conditional, Recursion };
const char* rule_name(Rule r);

struct ContextEntry {
    VarId id;
    std::string name;
    TypePtr type;
};

struct TypeDerivation;
using DerivPtr = std::shared_ptr<const TypeDerivation>;

// One rule instance. Premise order follows the subject's children:
//   LolliElim {function, argument}; Conditional/Recursion {scrutinee, branch_1..branch_k};
//   Weakening/Contraction/LolliIntro {premise}.
struct TypeDerivation {
    Rule rule = Rule::Axiom;
    std::vector<ContextEntry> context; // sorted by id
    TermPtr subject;
    TypePtr type;
    std::vector<DerivPtr> premises;

    VarId var = 0;                   // Axiom/Weakening: the variable; Contraction: the result z
    VarId left = 0, right = 0;       // Contraction: the two premise variables
    ConsRef cons;                    // Constant
    unsigned tier = 0;               // Constant: instantiated tier; Conditional/Recursion: scrutinee tier m
    int algebra = -1;                // Conditional/Recursion
    TypePtr result;                  // Conditional/Recursion: C
};

// Builds a standard-form derivation of ctx |- m : a in sys, or throws TypeError with codes
// TypeMismatch, ContractionNotAllowed, RamificationViolation, RecursionContextViolation,
// UnboundVariable, BranchArityMismatch. Context entries whose variable does not occur in m are dropped.
DerivPtr check(const std::vector<ContextEntry>& ctx, const TermPtr& m, const TypePtr& a, const Subsystem& sys,
               const AlgebraFamily& fam = AlgebraFamily::builtin());

// Same, with the type synthesized (unconstrained tiers resolved to their least values).
DerivPtr synthesize(const std::vector<ContextEntry>& ctx, const TermPtr& m, const Subsystem& sys,
                    const AlgebraFamily& fam = AlgebraFamily::builtin());

// R(pi): maximum number of Recursion instances on a root-to-leaf path.
unsigned recursion_depth(const TypeDerivation& d);
// I(pi): maximum scrutinee tier over Recursion instances; 0 without recursion.
unsigned highest_tier(const TypeDerivation& d);
std::size_t count_rule(const TypeDerivation& d, Rule r);

// Local schema check of every instance plus standard form; returns the violations found.
std::vector<std::string> validate_derivation(const TypeDerivation& d, const Subsystem& sys,
                                             const AlgebraFamily& fam = AlgebraFamily::builtin());
bool is_standard_form(const TypeDerivation& d);
// Canonical derivation of the same judgment; idempotent.
DerivPtr standardize(const DerivPtr& d, const Subsystem& sys, const AlgebraFamily& fam = AlgebraFamily::builtin());

std::string derivation_summary(const TypeDerivation& d, const AlgebraFamily& fam = AlgebraFamily::builtin());

} // namespace linrec
