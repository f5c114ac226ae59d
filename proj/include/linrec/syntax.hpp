#pragma once

#include "linrec/algebra.hpp"
#include "linrec/term.hpp"
#include "linrec/types.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace linrec {

struct ParseOptions {
    // Expands `@Name` and `@Name@i` atoms; unset means such atoms are a syntax error.
    std::function<TermPtr(const std::string& name, std::optional<unsigned> tier)> macro;
    // Accept bare integers (unary naturals) and b"0110" (binary strings) as atoms.
    bool literals = false;
    // Identifiers given to free variables, shared across calls when set.
    std::map<std::string, VarId>* free_vars = nullptr;
};

struct Program {
    AlgebraFamily family;
    TermPtr term;
};

// Optional `algebra Name { c1/2, c2/0 }` declarations followed by one term.
Program parse_program(std::string_view source, const ParseOptions& opts = {});
TermPtr parse_term(std::string_view source, const AlgebraFamily& fam = AlgebraFamily::builtin(),
                   const ParseOptions& opts = {});
TypePtr parse_type(std::string_view source, const AlgebraFamily& fam = AlgebraFamily::builtin());

// Canonical concrete syntax; parse_term(print_term(M)) is alpha-equal to M.
std::string print_term(const TermPtr& m, const AlgebraFamily& fam = AlgebraFamily::builtin());

} // namespace linrec
