#include "linrec/stdlib.hpp"

#include "linrec/error.hpp"

#include <cctype>
#include <functional>

namespace linrec {

namespace {

std::string T(unsigned k) { return std::to_string(k); }

TermPtr parse_with_macros(const std::string& src) { return parse_term(src, AlgebraFamily::builtin(), stdlib_options()); }

TermPtr extract_between(unsigned k, unsigned j) {
    return parse_term("\\x:C^" + T(k) + ". x << \\y:C^" + T(k) + ". \\w:C^" + T(k) + ". \\z:U^" + T(j) + ". \\q:U^" +
                      T(j) + ". c1_U z, c2_U >>");
}

TermPtr duplicate_between(unsigned m, unsigned k) {
    std::string c = "C^" + T(k);
    return parse_term("\\x:U^" + T(m) + ". x << \\y:U^" + T(m) + ". \\w:" + c + ". w {{ \\z:" + c + ". \\q:" + c +
                      ". c1_C (c1_C z c2_C) (c1_C q c2_C), c2_C }}, c1_C c2_C c2_C >>");
}

// Branch of the triangular-number recursion: n << Tri, c2 >> = n(n+1)/2.
std::string tri_branch(unsigned j) {
    return "\\y:U^" + T(j + 1) + ". \\w:U^" + T(j) + ". @Add@" + T(j) + " (c1_U y) w";
}

TermPtr square(unsigned i) {
    std::map<std::string, VarId> fv;
    auto opts = stdlib_options(&fv);
    auto body = parse_term("@Add@" + T(i) + " ((@Coerc@" + T(i + 2) + " x1) << " + tri_branch(i + 1) +
                               ", c2_U >>) ((@Predecessor@" + T(i + 1) + " x2) << " + tri_branch(i) + ", c2_U >>)",
                           AlgebraFamily::builtin(), opts);
    VarId x = fresh_var_id();
    auto d = dup_context(body, fv.at("x1"), fv.at("x2"), x, "x", base_type(kU, i), i + 3, i + 1, true);
    return mk_abs(x, "x", base_type(kU, i + 5), d);
}

} // namespace

const std::vector<std::string>& builder_names() {
    static const std::vector<std::string> names{"UnAdd",     "Predecessor", "Coerc",  "Add",    "Square",
                                                "Extract",   "Duplicate",   "Blowup", "Leaves", "Exp"};
    return names;
}

TermPtr build(std::string_view name, unsigned i) {
    std::string u0 = "U^" + T(i), u1 = "U^" + T(i + 1), u2 = "U^" + T(i + 2);
    if (name == "UnAdd")
        return parse_term("\\x:" + u1 + ". \\y:" + u0 + ". x << \\w:" + u1 + ". \\z:" + u0 + ". c1_U z, y >>");
    if (name == "Predecessor")
        return parse_term("\\x:" + u0 + ". x {{ \\y:" + u0 + ". y, c2_U }}");
    if (name == "Coerc")
        return parse_term("\\x:" + u1 + ". x << \\y:" + u1 + ". \\w:" + u0 + ". c1_U w, c2_U >>");
    if (name == "Add")
        return parse_term("\\x:" + u1 + ". \\y:" + u0 + ". (x << \\w:" + u1 + ". \\z:(" + u0 + " -o " + u0 +
                          "). \\q:" + u0 + ". c1_U (z q), \\z:" + u0 + ". z >>) y");
    if (name == "Square")
        return square(i);
    if (name == "Extract")
        return extract_between(i + 1, i);
    if (name == "Duplicate")
        return duplicate_between(i + 1, i);
    if (name == "Blowup")
        return parse_term("\\x:" + u2 + ". x << \\y:" + u2 + ". \\w:C^" + T(i + 1) + ". c1_C w w, c2_C >>");
    if (name == "Leaves") {
        std::string c = "C^" + T(i + 1), r = "(" + u0 + " -o " + u0 + ")";
        return parse_term("\\x:" + c + ". (x << \\y:" + c + ". \\w:" + c + ". \\z:" + r + ". \\q:" + r + ". \\r:" +
                          u0 + ". z (q r), \\x:" + u0 + ". c1_U x >>) c2_U");
    }
    if (name == "Exp")
        return parse_with_macros("\\x:" + u2 + ". @Leaves@" + T(i) + " (@Blowup@" + T(i) + " x)");
    throw Error("unknown stdlib term '" + std::string(name) + "'");
}

TypePtr builder_type(std::string_view name, unsigned i) {
    auto U = [](unsigned k) { return base_type(kU, k); };
    auto C = [](unsigned k) { return base_type(kC, k); };
    if (name == "UnAdd" || name == "Add")
        return arrow_type(U(i + 1), arrow_type(U(i), U(i)));
    if (name == "Predecessor")
        return arrow_type(U(i), U(i));
    if (name == "Coerc")
        return arrow_type(U(i + 1), U(i));
    if (name == "Square")
        return arrow_type(U(i + 5), U(i));
    if (name == "Extract")
        return arrow_type(C(i + 1), U(i));
    if (name == "Duplicate")
        return arrow_type(U(i + 1), C(i));
    if (name == "Blowup")
        return arrow_type(U(i + 2), C(i + 1));
    if (name == "Leaves")
        return arrow_type(C(i + 1), U(i));
    if (name == "Exp")
        return arrow_type(U(i + 2), U(i));
    throw Error("unknown stdlib term '" + std::string(name) + "'");
}

ParseOptions stdlib_options(std::map<std::string, VarId>* free_vars) {
    ParseOptions o;
    o.macro = [](const std::string& name, std::optional<unsigned> tier) { return build(name, tier.value_or(0)); };
    o.literals = true;
    o.free_vars = free_vars;
    return o;
}

AlgebraicTerm overline(const AlgebraicTerm& t) {
    if (t.head.algebra != kU)
        throw Error("overline expects a term of U");
    std::size_t n = decode_nat(t);
    AlgebraicTerm out{{kC, 1}, {}};
    for (std::size_t k = 0; k < n; ++k)
        out = AlgebraicTerm{{kC, 0}, {out, AlgebraicTerm{{kC, 1}, {}}}};
    return out;
}

AlgebraicTerm ct(unsigned n) {
    AlgebraicTerm out{{kC, 1}, {}};
    for (unsigned k = 0; k < n; ++k)
        out = AlgebraicTerm{{kC, 0}, {out, out}};
    return out;
}

TermPtr canonical_inhabitant(const TypePtr& a, const AlgebraFamily& fam) {
    if (a->is_arrow)
        return mk_abs(fresh_var_id(), "v", a->dom, canonical_inhabitant(a->cod, fam));
    for (std::size_t k = 0; k < fam.constructor_count(a->algebra); ++k) {
        ConsRef c{a->algebra, static_cast<int>(k)};
        if (fam.arity(c) == 0)
            return mk_cons(c, a->tier);
    }
    throw Error("algebra " + fam.at(a->algebra).name + " has no nullary constructor");
}

TermPtr dup_context(const TermPtr& m, VarId x, VarId y, VarId w, const std::string& w_name, const TypePtr& a,
                    unsigned tx, unsigned ty, bool ramified) {
    unsigned k, tw;
    if (ramified) {
        k = std::max(tx, ty) + 1;
        tw = k + 1;
    } else {
        if (tx != ty)
            throw Error("flat duplication needs equal tiers");
        k = tw = tx;
    }
    auto fv = free_vars(m);
    auto name_of = [&](VarId v, const char* dflt) {
        auto it = fv.find(v);
        return it == fv.end() ? std::string(dflt) : it->second;
    };
    VarId z = fresh_var_id(), q = fresh_var_id();
    auto ck = base_type(kC, k);
    auto inner = mk_abs(x, name_of(x, "x"), base_type(kU, tx), mk_abs(y, name_of(y, "y"), base_type(kU, ty), m));
    auto branch = mk_abs(
        z, "z", ck,
        mk_abs(q, "q", ck,
               mk_apps(inner, {mk_app(extract_between(k, tx), mk_var(z, "z")),
                               mk_app(extract_between(k, ty), mk_var(q, "q"))})));
    return mk_cond(mk_app(duplicate_between(tw, k), mk_var(w, w_name)), {branch, canonical_inhabitant(a)});
}

TermPtr dup_many(const TermPtr& m, const std::vector<VarId>& xs, VarId z, const std::string& z_name) {
    const std::size_t n = xs.size();
    if (n == 0)
        throw Error("dup_many needs at least one variable");
    auto u0 = base_type(kU, 0);
    auto fv = free_vars(m);
    TermPtr lam = m;
    for (std::size_t k = n; k-- > 0;) {
        auto it = fv.find(xs[k]);
        lam = mk_abs(xs[k], it == fv.end() ? "x" + std::to_string(k + 1) : it->second, u0, lam);
    }
    // M_1 = (lam) a_1, M_{i+1} = [M_i b]^{a_{i+1}}_{a_i, b}
    VarId a = fresh_var_id();
    TermPtr cur = mk_app(lam, mk_var(a, "a1"));
    for (std::size_t i = 1; i < n; ++i) {
        VarId b = fresh_var_id(), next = fresh_var_id();
        std::string nm = "a" + std::to_string(i + 1);
        cur = dup_context(mk_app(cur, mk_var(b, nm)), a, b, next, nm, arrows(static_cast<unsigned>(n - i - 1), u0, u0),
                          0, 0, false);
        a = next;
    }
    return mk_app(mk_abs(a, "a" + std::to_string(n), u0, cur), mk_var(z, z_name));
}

// Primitive recursion ---------------------------------------------------------

unsigned PrimRec::arity() const {
    switch (kind) {
    case Kind::Zero:
    case Kind::Succ:
        return 1;
    case Kind::Proj:
        return n;
    case Kind::Compose:
        return args[1]->arity();
    case Kind::Rec:
        return args[0]->arity() + 1;
    }
    return 0;
}

namespace {
PrimRecPtr mk(PrimRec p) { return std::make_shared<const PrimRec>(std::move(p)); }
} // namespace

PrimRecPtr pr_zero() { return mk({PrimRec::Kind::Zero, 0, 0, {}}); }
PrimRecPtr pr_succ() { return mk({PrimRec::Kind::Succ, 0, 0, {}}); }
PrimRecPtr pr_proj(unsigned n, unsigned i) {
    if (i < 1 || i > n)
        throw Error("proj(" + std::to_string(n) + "," + std::to_string(i) + ") out of range");
    return mk({PrimRec::Kind::Proj, n, i, {}});
}
PrimRecPtr pr_compose(PrimRecPtr f, std::vector<PrimRecPtr> gs) {
    if (gs.empty() || f->arity() != gs.size())
        throw Error("comp: f has arity " + std::to_string(f->arity()) + " but " + std::to_string(gs.size()) +
                    " functions were given");
    for (const auto& g : gs)
        if (g->arity() != gs[0]->arity())
            throw Error("comp: the inner functions have different arities");
    std::vector<PrimRecPtr> args{std::move(f)};
    args.insert(args.end(), gs.begin(), gs.end());
    return mk({PrimRec::Kind::Compose, 0, 0, std::move(args)});
}
PrimRecPtr pr_rec(PrimRecPtr f, PrimRecPtr g) {
    if (g->arity() != f->arity() + 2)
        throw Error("rec: g must have arity " + std::to_string(f->arity() + 2));
    return mk({PrimRec::Kind::Rec, 0, 0, {std::move(f), std::move(g)}});
}
PrimRecPtr pr_add() { return pr_rec(pr_proj(1, 1), pr_compose(pr_succ(), {pr_proj(3, 2)})); }
PrimRecPtr pr_mul() { return pr_rec(pr_zero(), pr_compose(pr_add(), {pr_proj(3, 2), pr_proj(3, 3)})); }

namespace {

class PrParser {
public:
    explicit PrParser(std::string_view s) : s_(s) {}
    PrimRecPtr parse() {
        auto f = expr();
        ws();
        if (pos_ != s_.size())
            fail("trailing input");
        return f;
    }

private:
    std::string_view s_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& m) {
        throw ParseError("primrec: " + m, 1, static_cast<int>(pos_ + 1));
    }
    void ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
            ++pos_;
    }
    bool eat(char c) {
        ws();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    void need(char c) {
        if (!eat(c))
            fail(std::string("expected '") + c + "'");
    }
    std::string ident() {
        ws();
        std::size_t b = pos_;
        while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_])))
            ++pos_;
        if (b == pos_)
            fail("expected a function name");
        return std::string(s_.substr(b, pos_ - b));
    }
    unsigned number() {
        ws();
        std::size_t b = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
            ++pos_;
        if (b == pos_)
            fail("expected a number");
        return static_cast<unsigned>(std::stoul(std::string(s_.substr(b, pos_ - b))));
    }
    PrimRecPtr expr() {
        auto id = ident();
        try {
            if (id == "zero")
                return pr_zero();
            if (id == "succ")
                return pr_succ();
            if (id == "add")
                return pr_add();
            if (id == "mul")
                return pr_mul();
            if (id == "proj") {
                need('(');
                unsigned n = number();
                need(',');
                unsigned i = number();
                need(')');
                return pr_proj(n, i);
            }
            if (id == "comp" || id == "rec") {
                need('(');
                std::vector<PrimRecPtr> xs{expr()};
                while (eat(','))
                    xs.push_back(expr());
                need(')');
                if (id == "rec") {
                    if (xs.size() != 2)
                        fail("rec takes two functions");
                    return pr_rec(xs[0], xs[1]);
                }
                if (xs.size() < 2)
                    fail("comp takes at least two functions");
                return pr_compose(xs[0], {xs.begin() + 1, xs.end()});
            }
        } catch (const ParseError&) {
            throw;
        } catch (const Error& e) {
            fail(e.what());
        }
        fail("unknown function '" + id + "'");
    }
};

} // namespace

PrimRecPtr parse_primrec(std::string_view s) { return PrParser(s).parse(); }

std::string to_string(const PrimRec& f) {
    switch (f.kind) {
    case PrimRec::Kind::Zero:
        return "zero";
    case PrimRec::Kind::Succ:
        return "succ";
    case PrimRec::Kind::Proj:
        return "proj(" + std::to_string(f.n) + "," + std::to_string(f.i) + ")";
    case PrimRec::Kind::Compose:
    case PrimRec::Kind::Rec: {
        std::string s = f.kind == PrimRec::Kind::Rec ? "rec(" : "comp(";
        for (std::size_t k = 0; k < f.args.size(); ++k)
            s += (k ? "," : "") + to_string(*f.args[k]);
        return s + ")";
    }
    }
    return "?";
}

std::uint64_t eval_primrec(const PrimRec& f, const std::vector<std::uint64_t>& args, std::uint64_t budget) {
    std::uint64_t spent = 0;
    std::function<std::uint64_t(const PrimRec&, const std::vector<std::uint64_t>&)> go =
        [&](const PrimRec& g, const std::vector<std::uint64_t>& a) -> std::uint64_t {
        if (++spent > budget)
            throw ResourceLimit("primrec evaluation budget exhausted");
        if (a.size() != g.arity())
            throw Error("arity mismatch evaluating " + to_string(g));
        switch (g.kind) {
        case PrimRec::Kind::Zero:
            return 0;
        case PrimRec::Kind::Succ:
            return a[0] + 1;
        case PrimRec::Kind::Proj:
            return a[g.i - 1];
        case PrimRec::Kind::Compose: {
            std::vector<std::uint64_t> inner;
            for (std::size_t k = 1; k < g.args.size(); ++k)
                inner.push_back(go(*g.args[k], a));
            return go(*g.args[0], inner);
        }
        case PrimRec::Kind::Rec: {
            std::vector<std::uint64_t> rest(a.begin() + 1, a.end());
            std::uint64_t acc = go(*g.args[0], rest);
            for (std::uint64_t n = 0; n < a[0]; ++n) {
                std::vector<std::uint64_t> b{n, acc};
                b.insert(b.end(), rest.begin(), rest.end());
                acc = go(*g.args[1], b);
            }
            return acc;
        }
        }
        return 0;
    };
    return go(f, args);
}

TermPtr compile_primrec(const PrimRec& f) {
    auto u0 = base_type(kU, 0);
    switch (f.kind) {
    case PrimRec::Kind::Zero: {
        VarId x = fresh_var_id();
        return mk_abs(x, "x", u0, mk_cons({kU, 1}));
    }
    case PrimRec::Kind::Succ: {
        VarId x = fresh_var_id();
        return mk_abs(x, "x", u0, mk_app(mk_cons({kU, 0}), mk_var(x, "x")));
    }
    case PrimRec::Kind::Proj: {
        std::vector<VarId> xs;
        for (unsigned k = 0; k < f.n; ++k)
            xs.push_back(fresh_var_id());
        TermPtr body = mk_var(xs[f.i - 1], "x" + std::to_string(f.i));
        for (unsigned k = f.n; k-- > 0;)
            body = mk_abs(xs[k], "x" + std::to_string(k + 1), u0, body);
        return body;
    }
    case PrimRec::Kind::Compose: {
        const std::size_t n = f.args.size() - 1;
        const unsigned m = f.args[1]->arity();
        // x[k][j]: the j-th argument handed to g_k.
        std::vector<std::vector<VarId>> x(n, std::vector<VarId>(m));
        TermPtr body = compile_primrec(*f.args[0]);
        std::vector<TermPtr> calls;
        for (std::size_t k = 0; k < n; ++k) {
            TermPtr c = compile_primrec(*f.args[k + 1]);
            for (unsigned j = 0; j < m; ++j) {
                x[k][j] = fresh_var_id();
                c = mk_app(c, mk_var(x[k][j], "x" + std::to_string(k + 1) + "_" + std::to_string(j + 1)));
            }
            calls.push_back(c);
        }
        body = mk_apps(body, calls);
        std::vector<VarId> ys(m);
        for (unsigned j = m; j-- > 0;) {
            ys[j] = fresh_var_id();
            std::vector<VarId> group;
            for (std::size_t k = 0; k < n; ++k)
                group.push_back(x[k][j]);
            body = dup_many(body, group, ys[j], "y" + std::to_string(j + 1));
        }
        for (unsigned j = m; j-- > 0;)
            body = mk_abs(ys[j], "y" + std::to_string(j + 1), u0, body);
        return body;
    }
    case PrimRec::Kind::Rec: {
        const unsigned m = f.args[0]->arity();
        auto result = arrows(m, u0, u0);
        VarId y = fresh_var_id(), w = fresh_var_id();
        std::vector<VarId> a(m), b(m), z(m);
        TermPtr call = mk_var(w, "w");
        for (unsigned k = 0; k < m; ++k) {
            a[k] = fresh_var_id();
            call = mk_app(call, mk_var(a[k], "a" + std::to_string(k + 1)));
        }
        TermPtr body = mk_apps(compile_primrec(*f.args[1]), {mk_var(y, "y"), call});
        for (unsigned k = 0; k < m; ++k) {
            b[k] = fresh_var_id();
            body = mk_app(body, mk_var(b[k], "b" + std::to_string(k + 1)));
        }
        for (unsigned k = m; k-- > 0;) {
            z[k] = fresh_var_id();
            body = dup_context(body, a[k], b[k], z[k], "z" + std::to_string(k + 1), u0, 0, 0, false);
        }
        for (unsigned k = m; k-- > 0;)
            body = mk_abs(z[k], "z" + std::to_string(k + 1), u0, body);
        TermPtr nh = mk_abs(y, "y", u0, mk_abs(w, "w", result, body));
        VarId xv = fresh_var_id();
        return mk_abs(xv, "x", u0, mk_rec(mk_var(xv, "x"), {nh, compile_primrec(*f.args[0])}));
    }
    }
    throw Error("unreachable");
}

} // namespace linrec
