#pragma once

#include "linrec/bounds.hpp"
#include "linrec/eval.hpp"
#include "linrec/semantics.hpp"
#include "linrec/typecheck.hpp"

#include <string>
#include <vector>

namespace linrec {

struct AuditCaps {
    SemCaps trees;
    ReductCaps reducts;
    std::size_t fuel = kDefaultFuel;
    std::size_t bit_ceiling = kDefaultBitCeiling;
};

enum class Verdict { Pass, Fail, Inconclusive };
const char* verdict_name(Verdict v);

// measured <= bound, where either side may only be known from below.
Verdict compare_bound(const BigNat& measured, bool measured_exact, const BoundValue& bound, bool bound_exact);

struct BoundCheck {
    std::string name;
    std::string argument; // what the bound was evaluated at
    std::string bound;
    std::string measured;
    Verdict verdict = Verdict::Inconclusive;
    bool informational = false; // reported, not part of the overall verdict
};

struct AuditReport {
    std::string term;
    std::string subsystem;
    std::string type;
    std::size_t term_size = 0, graph_size = 0;
    unsigned recursion_depth = 0, highest_tier = 0;
    unsigned max_arity = 0;

    std::string normal_form;
    bool normalized = false;
    std::size_t steps = 0;
    std::size_t reduct_states = 0;
    bool reducts_exhaustive = false;
    std::size_t longest_path = 0;
    std::size_t max_reduct_size = 0;
    std::size_t potential = 0; // A(M)
    bool potential_exhaustive = false;

    std::size_t trees = 0;
    bool trees_exhaustive = false;
    std::size_t max_label_size = 0;
    std::size_t max_stack_count = 0; // max |U(T)|

    std::vector<LemmaReport> lemmas;
    std::vector<BoundCheck> checks;

    Verdict overall() const;
};

// Throws TypeError when m does not type in sys.
AuditReport audit(const TermPtr& m, const Subsystem& sys, const AuditCaps& caps = {},
                  const AlgebraFamily& fam = AlgebraFamily::builtin());

// One JSON document; identical reports give identical bytes.
std::string to_json(const AuditReport& r);

} // namespace linrec
