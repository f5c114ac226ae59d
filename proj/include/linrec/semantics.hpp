#pragma once

#include "linrec/algebra.hpp"
#include "linrec/error.hpp"
#include "linrec/graph.hpp"
#include "linrec/typecheck.hpp"

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace linrec {

// One constructor application with a hole among its arguments.
struct ContextLayer {
    ConsRef head;
    unsigned hole = 0; // 0-based argument index
    std::vector<AlgebraicTerm> others;
    friend bool operator==(const ContextLayer&, const ContextLayer&) = default;
};

// Term context with exactly one hole, outermost layer first; no layers is the bare hole.
struct TermContext {
    std::vector<ContextLayer> layers;
    bool is_hole() const { return layers.empty(); }
    // Size with the hole counted as 0.
    std::size_t size() const;
    friend bool operator==(const TermContext&, const TermContext&) = default;
};

AlgebraicTerm plug(const TermContext& u, const AlgebraicTerm& t);
// Every (u, s) with u[s] = t, the bare-hole decomposition first.
std::vector<std::pair<TermContext, AlgebraicTerm>> decompositions(const AlgebraicTerm& t);
std::string to_string(const TermContext& u, const AlgebraFamily& fam = AlgebraFamily::builtin());

// Type context, as the path from the root of the edge type to its hole: 'd' enters a domain, 'c' a codomain.
struct TypeContext {
    std::string path;
    // Hole positive; each domain step flips.
    bool positive() const;
    friend bool operator==(const TypeContext&, const TypeContext&) = default;
    friend auto operator<=>(const TypeContext&, const TypeContext&) = default;
};

// The type sitting at the hole when L is a focus for a, i.e. a base type; none otherwise.
TypePtr focus_type(const TypePtr& a, const TypeContext& l);
std::string to_string(const TypePtr& a, const TypeContext& l, const AlgebraFamily& fam = AlgebraFamily::builtin());

struct StackEntry {
    TermContext u;
    AlgebraicTerm t;
    int box = -1; // C^R vertex
    friend bool operator==(const StackEntry&, const StackEntry&) = default;
};
// Innermost entry first.
using Stack = std::vector<StackEntry>;

struct TokenLabel {
    AlgebraicTerm t;
    int edge = -1;
    Stack stack;
    TypeContext focus;
};

struct SemTree {
    TokenLabel label;
    std::vector<SemTree> children;
};

enum class ClosureRule {
    IntroBound, IntroOut, IntroBodyOut, IntroBody, // I-o
    ElimFun, ElimArg, ElimFunOut, ElimOut,         // E-o
    Contraction,                                   // X
    ConsLeaf, ConsLeafBoxed, ConsNode,             // I^c
    CondExit, CondEnter, CondArg,                  // C^N
    RecCopyOut, RecCopyIn, RecExit, RecEnter, RecArg, // C^R
    Promotion                                      // P^R
};
const char* closure_rule_name(ClosureRule r);

struct SemCaps {
    std::size_t max_trees = 10'000;
    std::size_t max_label_size = 1'000;
    std::size_t max_stack_depth = 32;
};

// Saturated T(G). Each node is one tree, identified by its root label; children are node indices.
class TreeSet {
public:
    struct Impl;

    TreeSet();
    ~TreeSet();
    TreeSet(TreeSet&&) noexcept;
    TreeSet& operator=(TreeSet&&) noexcept;

    std::size_t size() const;
    bool exhaustive() const;
    const std::string& cap_note() const; // which cap bound, empty when exhaustive

    const TokenLabel& label(int node) const;
    const std::vector<int>& children(int node) const;
    ClosureRule rule(int node) const;
    std::optional<int> find(int edge, const Stack& u, const TypeContext& l) const;

    // Second derivations of an existing root label that produced a different tree.
    const std::vector<std::string>& uniqueness_conflicts() const;

    SemTree materialize(int node) const;
    std::string label_string(int node, const AlgebraFamily& fam = AlgebraFamily::builtin()) const;
    // Indented, one node per line.
    std::string dump(int node, const AlgebraFamily& fam = AlgebraFamily::builtin()) const;
    std::string dump_all(const AlgebraFamily& fam = AlgebraFamily::builtin()) const;

    // Distinct algebraic terms over all root labels, sorted.
    std::vector<AlgebraicTerm> terms() const;

private:
    std::unique_ptr<Impl> impl_;
    friend TreeSet enumerate_trees(const InteractionGraph&, const SemCaps&, const AlgebraFamily&);
};

TreeSet enumerate_trees(const InteractionGraph& g, const SemCaps& caps = {},
                        const AlgebraFamily& fam = AlgebraFamily::builtin());

inline const AlgebraicTerm& tree_term(const SemTree& t) { return t.label.t; }
inline const AlgebraicTerm& tree_term(const TreeSet& s, int node) { return s.label(node).t; }

// U(T): distinct stacks over every label of the tree.
std::vector<Stack> legal_stacks(const SemTree& t);
std::vector<Stack> legal_stacks(const TreeSet& s, int node);
std::size_t legal_stack_count(const TreeSet& s, int node);

// B(T, u, s); throws DecompositionMismatch unless u[s] = L(T).
const SemTree& subtree_locator(const SemTree& t, const TermContext& u, const AlgebraicTerm& s);
int subtree_locator(const TreeSet& set, int node, const TermContext& u, const AlgebraicTerm& s);

struct LemmaReport {
    std::string name;
    std::size_t checked = 0;
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

LemmaReport check_uniqueness(const TreeSet& s);
// Violations of the stack lemma for one label, checked against the trees of s.
std::vector<std::string> legal_stack_violations(const InteractionGraph& g, const TreeSet& s, const TokenLabel& l);
LemmaReport check_legal_stack_structure(const InteractionGraph& g, const TreeSet& s);
// The base type at the hole; throws InvariantViolation if the labels of the tree disagree.
TypePtr guiding_type(const InteractionGraph& g, const TreeSet& s, int node);
LemmaReport check_guiding_types(const InteractionGraph& g, const TreeSet& s);
LemmaReport check_stack_length(const TreeSet& s, unsigned recursion_depth);
// |L(T)| <= K^{|G||U(T)|} always; additionally |L(T)| <= |G||U(T)| when sys is RH(W) or RH(0).
LemmaReport check_size_bounds(const InteractionGraph& g, const TreeSet& s, const Subsystem& sys,
                              const AlgebraFamily& fam = AlgebraFamily::builtin());
// Ancestors of a label whose innermost box has scrutinee tier at most the guiding tier extend its stack.
LemmaReport check_ramified_monotone(const InteractionGraph& g, const TreeSet& s);
LemmaReport check_subtree_closure(const TreeSet& s);

// Every structural check applicable to the derivation's subsystem.
std::vector<LemmaReport> check_lemmas(const InteractionGraph& g, const TreeSet& s, const TypeDerivation& d,
                                      const Subsystem& sys, const AlgebraFamily& fam = AlgebraFamily::builtin());

struct CoverageReport {
    bool conclusive = true;
    std::string note;
    std::vector<AlgebraicTerm> arguments;  // algebraic redex arguments over all reducts
    std::vector<AlgebraicTerm> tree_terms; // {L(T)}
    std::vector<AlgebraicTerm> missing;
    bool ok() const { return missing.empty(); }
};

CoverageReport completeness_check(const TermPtr& m, const TypeDerivation& d, const SemCaps& caps = {},
                                  const AlgebraFamily& fam = AlgebraFamily::builtin());

// {L(T)} of N's graph against that of M's; N is re-typed at M's type.
CoverageReport preservation_check(const TermPtr& m, const TermPtr& n, const Subsystem& sys, const SemCaps& caps = {},
                                  const AlgebraFamily& fam = AlgebraFamily::builtin());

} // namespace linrec
