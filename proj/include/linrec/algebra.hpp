#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace linrec {

struct Constructor {
    std::string name; // local name, e.g. "c1"
    unsigned arity = 0;
};

struct FreeAlgebra {
    std::string name;
    std::vector<Constructor> constructors;

    // Exactly one nullary constructor, every other one unary.
    bool is_word_algebra() const;
    unsigned max_arity() const;
};

struct ConsRef {
    int algebra = -1;
    int index = -1; // 0-based; constructor c<index+1>

    friend auto operator<=>(const ConsRef&, const ConsRef&) = default;
};

// Indices of the built-in algebras; always present in every family.
inline constexpr int kU = 0;
inline constexpr int kB = 1;
inline constexpr int kC = 2;
inline constexpr int kD = 3;

class AlgebraFamily {
public:
    // The family with just U, B, C and D.
    AlgebraFamily();

    // Adds a user algebra, keeping declaration order of its constructors.
    // Throws linrec::Error on duplicate names or an empty constructor list.
    int add(FreeAlgebra a);

    std::size_t size() const { return algebras_.size(); }
    const FreeAlgebra& at(int i) const { return algebras_.at(static_cast<std::size_t>(i)); }
    std::optional<int> find(std::string_view name) const;

    // Resolves a concrete constructor name "c<i>_<Alg>".
    std::optional<ConsRef> find_constructor(std::string_view full) const;
    std::string constructor_name(ConsRef c) const;
    unsigned arity(ConsRef c) const;
    unsigned constructor_count(int algebra) const;

    // K: the maximum arity over all constructors of the family.
    unsigned max_arity() const;

    static const AlgebraFamily& builtin();

private:
    std::vector<FreeAlgebra> algebras_;
};

// Closed first-order term over one algebra's constructors.
struct AlgebraicTerm {
    ConsRef head;
    std::vector<AlgebraicTerm> args;

    AlgebraicTerm() = default;
    AlgebraicTerm(ConsRef h, std::vector<AlgebraicTerm> a = {}) : head(h), args(std::move(a)) {}

    // Number of constructor occurrences.
    std::size_t size() const;
    int algebra() const { return head.algebra; }
    // Checks child counts against declared arities.
    bool well_formed(const AlgebraFamily& fam) const;
};

bool operator==(const AlgebraicTerm& a, const AlgebraicTerm& b);
std::strong_ordering operator<=>(const AlgebraicTerm& a, const AlgebraicTerm& b);

std::string to_string(const AlgebraicTerm& t, const AlgebraFamily& fam = AlgebraFamily::builtin());

AlgebraicTerm encode_nat(std::uint64_t n);
// Throws linrec::Error when t is not a term of U.
std::uint64_t decode_nat(const AlgebraicTerm& t);

AlgebraicTerm encode_binstring(std::string_view bits);
std::string decode_binstring(const AlgebraicTerm& t);

} // namespace linrec
