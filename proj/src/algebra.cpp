#include "linrec/algebra.hpp"

#include "linrec/error.hpp"

#include <algorithm>
#include <charconv>

namespace linrec {

bool FreeAlgebra::is_word_algebra() const {
    int nullary = 0;
    for (const auto& c : constructors) {
        if (c.arity == 0)
            ++nullary;
        else if (c.arity != 1)
            return false;
    }
    return nullary == 1;
}

unsigned FreeAlgebra::max_arity() const {
    unsigned k = 0;
    for (const auto& c : constructors)
        k = std::max(k, c.arity);
    return k;
}

AlgebraFamily::AlgebraFamily() {
    algebras_.push_back({"U", {{"c1", 1}, {"c2", 0}}});
    algebras_.push_back({"B", {{"c1", 1}, {"c2", 1}, {"c3", 0}}});
    algebras_.push_back({"C", {{"c1", 2}, {"c2", 0}}});
    algebras_.push_back({"D", {{"c1", 2}, {"c2", 2}, {"c3", 0}}});
}

int AlgebraFamily::add(FreeAlgebra a) {
    if (find(a.name))
        throw Error("algebra '" + a.name + "' already declared");
    if (a.constructors.empty())
        throw Error("algebra '" + a.name + "' has no constructors");
    for (std::size_t i = 0; i < a.constructors.size(); ++i) {
        if (a.constructors[i].name != "c" + std::to_string(i + 1))
            throw Error("algebra '" + a.name + "': constructor " + std::to_string(i + 1) + " must be named c" +
                        std::to_string(i + 1));
    }
    algebras_.push_back(std::move(a));
    return static_cast<int>(algebras_.size() - 1);
}

std::optional<int> AlgebraFamily::find(std::string_view name) const {
    for (std::size_t i = 0; i < algebras_.size(); ++i)
        if (algebras_[i].name == name)
            return static_cast<int>(i);
    return std::nullopt;
}

std::optional<ConsRef> AlgebraFamily::find_constructor(std::string_view full) const {
    if (full.size() < 4 || full[0] != 'c')
        return std::nullopt;
    auto us = full.find('_');
    if (us == std::string_view::npos || us < 2)
        return std::nullopt;
    unsigned idx = 0;
    auto digits = full.substr(1, us - 1);
    auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), idx);
    if (ec != std::errc() || p != digits.data() + digits.size() || idx == 0)
        return std::nullopt;
    auto alg = find(full.substr(us + 1));
    if (!alg || idx > at(*alg).constructors.size())
        return std::nullopt;
    return ConsRef{*alg, static_cast<int>(idx - 1)};
}

std::string AlgebraFamily::constructor_name(ConsRef c) const {
    const auto& a = at(c.algebra);
    return a.constructors.at(static_cast<std::size_t>(c.index)).name + "_" + a.name;
}

unsigned AlgebraFamily::arity(ConsRef c) const {
    return at(c.algebra).constructors.at(static_cast<std::size_t>(c.index)).arity;
}

unsigned AlgebraFamily::constructor_count(int algebra) const {
    return static_cast<unsigned>(at(algebra).constructors.size());
}

unsigned AlgebraFamily::max_arity() const {
    unsigned k = 0;
    for (const auto& a : algebras_)
        k = std::max(k, a.max_arity());
    return k;
}

const AlgebraFamily& AlgebraFamily::builtin() {
    static const AlgebraFamily fam;
    return fam;
}

std::size_t AlgebraicTerm::size() const {
    std::size_t n = 1;
    for (const auto& a : args)
        n += a.size();
    return n;
}

bool AlgebraicTerm::well_formed(const AlgebraFamily& fam) const {
    if (head.algebra < 0 || static_cast<std::size_t>(head.algebra) >= fam.size())
        return false;
    if (head.index < 0 || static_cast<unsigned>(head.index) >= fam.constructor_count(head.algebra))
        return false;
    if (args.size() != fam.arity(head))
        return false;
    for (const auto& a : args)
        if (a.head.algebra != head.algebra || !a.well_formed(fam))
            return false;
    return true;
}

bool operator==(const AlgebraicTerm& a, const AlgebraicTerm& b) {
    return a.head == b.head && a.args == b.args;
}

std::strong_ordering operator<=>(const AlgebraicTerm& a, const AlgebraicTerm& b) {
    if (auto c = a.head <=> b.head; c != 0)
        return c;
    if (auto c = a.args.size() <=> b.args.size(); c != 0)
        return c;
    for (std::size_t i = 0; i < a.args.size(); ++i)
        if (auto c = a.args[i] <=> b.args[i]; c != 0)
            return c;
    return std::strong_ordering::equal;
}

static void print_alg(const AlgebraicTerm& t, const AlgebraFamily& fam, bool nested, std::string& out) {
    if (t.args.empty()) {
        out += fam.constructor_name(t.head);
        return;
    }
    if (nested)
        out += '(';
    out += fam.constructor_name(t.head);
    for (const auto& a : t.args) {
        out += ' ';
        print_alg(a, fam, true, out);
    }
    if (nested)
        out += ')';
}

std::string to_string(const AlgebraicTerm& t, const AlgebraFamily& fam) {
    std::string out;
    print_alg(t, fam, false, out);
    return out;
}

AlgebraicTerm encode_nat(std::uint64_t n) {
    AlgebraicTerm t(ConsRef{kU, 1});
    for (std::uint64_t i = 0; i < n; ++i)
        t = AlgebraicTerm(ConsRef{kU, 0}, {std::move(t)});
    return t;
}

std::uint64_t decode_nat(const AlgebraicTerm& t) {
    std::uint64_t n = 0;
    const AlgebraicTerm* cur = &t;
    while (true) {
        if (cur->head.algebra != kU)
            throw Error("decode_nat: not a term of U");
        if (cur->head.index == 1 && cur->args.empty())
            return n;
        if (cur->head.index != 0 || cur->args.size() != 1)
            throw Error("decode_nat: malformed term of U");
        ++n;
        cur = &cur->args[0];
    }
}

AlgebraicTerm encode_binstring(std::string_view bits) {
    AlgebraicTerm t(ConsRef{kB, 2});
    for (auto it = bits.rbegin(); it != bits.rend(); ++it) {
        if (*it != '0' && *it != '1')
            throw Error("encode_binstring: not a bit string");
        t = AlgebraicTerm(ConsRef{kB, *it == '0' ? 0 : 1}, {std::move(t)});
    }
    return t;
}

std::string decode_binstring(const AlgebraicTerm& t) {
    std::string s;
    const AlgebraicTerm* cur = &t;
    while (true) {
        if (cur->head.algebra != kB)
            throw Error("decode_binstring: not a term of B");
        if (cur->head.index == 2 && cur->args.empty())
            return s;
        if (cur->head.index > 1 || cur->args.size() != 1)
            throw Error("decode_binstring: malformed term of B");
        s += cur->head.index == 0 ? '0' : '1';
        cur = &cur->args[0];
    }
}

} // namespace linrec
