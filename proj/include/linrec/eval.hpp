#pragma once

#include "linrec/algebra.hpp"
#include "linrec/error.hpp"
#include "linrec/term.hpp"
#include "linrec/types.hpp"

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

namespace linrec {

enum class RedexKind { Beta, Conditional, Recursive };
const char* redex_kind_name(RedexKind k);

struct Redex {
    Path position;
    RedexKind kind;
    TermPtr argument; // the value V, or the scrutinee t
};

struct RunStats {
    std::size_t steps = 0;
    std::size_t max_term_size = 0;
    std::size_t max_argument_size = 0; // largest algebraic argument fired
    std::size_t beta = 0, conditional = 0, recursive = 0;
};

class FuelExhausted : public ResourceLimit {
public:
    FuelExhausted(RunStats s, TermPtr partial)
        : ResourceLimit("fuel exhausted after " + std::to_string(s.steps) + " steps"), stats_(s),
          partial_(std::move(partial)) {}
    const RunStats& stats() const { return stats_; }
    const TermPtr& partial() const { return partial_; }

private:
    RunStats stats_;
    TermPtr partial_;
};

// Positions where a step may fire: not under an abstraction, not inside branches.
// Listed leftmost-outermost first.
std::vector<Redex> redexes(const TermPtr& m, const AlgebraFamily& fam = AlgebraFamily::builtin());
TermPtr step(const TermPtr& m, const Redex& r, const AlgebraFamily& fam = AlgebraFamily::builtin());

struct Normalized {
    TermPtr term;
    RunStats stats;
};

constexpr std::size_t kDefaultFuel = 1'000'000;

// Leftmost-outermost until no redex remains. Writes one line per step to trace when given:
// index, kind, path, argument size, term size.
Normalized normalize(const TermPtr& m, std::size_t fuel = kDefaultFuel,
                     const AlgebraFamily& fam = AlgebraFamily::builtin(), std::ostream* trace = nullptr);

struct ReductCaps {
    std::size_t max_states = 200'000;
    std::size_t max_steps = kDefaultFuel; // depth limit on the exploration
};

// All reducts reachable from a term, deduplicated up to alpha. succ[i] lists one-step successors.
struct ReductGraph {
    std::vector<TermPtr> states;
    std::vector<std::vector<std::size_t>> succ;
    std::vector<std::vector<Redex>> redexes;
    bool exhaustive = true;

    std::size_t max_term_size() const;
    std::size_t longest_path() const; // in steps; meaningful when exhaustive (the space is acyclic)
};

ReductGraph reducts(const TermPtr& m, const ReductCaps& caps = {}, const AlgebraFamily& fam = AlgebraFamily::builtin());

struct PotentialSize {
    std::size_t value = 0; // max |t| over algebraic redex arguments in all reducts
    bool exhaustive = true;
    std::size_t trace_value = 0; // same quantity along the deterministic run only
    std::size_t states = 0;
};

PotentialSize algebraic_potential_size(const TermPtr& m, const ReductCaps& caps = {},
                                       const AlgebraFamily& fam = AlgebraFamily::builtin());
std::size_t algebraic_potential_size(const ReductGraph& g, const AlgebraFamily& fam = AlgebraFamily::builtin());

// Normalizes a closed term of base type and returns its normal form as data.
AlgebraicTerm assert_base_normal(const TermPtr& m, const TypePtr& a, std::size_t fuel = kDefaultFuel,
                                 const AlgebraFamily& fam = AlgebraFamily::builtin());

// States with two distinct successors that have no common successor.
std::vector<std::string> diamond_violations(const ReductGraph& g);

} // namespace linrec
