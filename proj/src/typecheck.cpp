#include "linrec/typecheck.hpp"

#include "linrec/syntax.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <sstream>
#include <unordered_map>

namespace linrec {

bool Subsystem::admits(const Type& t, const AlgebraFamily& fam) const {
    if (t.is_arrow)
        return false;
    switch (contraction) {
    case ContractionClass::All:
        return true;
    case ContractionClass::WordBases:
        return fam.at(t.algebra).is_word_algebra();
    case ContractionClass::Empty:
        return false;
    case ContractionClass::Custom:
        return custom && custom(t);
    }
    return false;
}

std::string Subsystem::name() const {
    std::string d;
    switch (contraction) {
    case ContractionClass::All:
        d = "A";
        break;
    case ContractionClass::WordBases:
        d = "W";
        break;
    case ContractionClass::Empty:
        d = "0";
        break;
    case ContractionClass::Custom:
        d = "custom";
        break;
    }
    return std::string(ramified ? "RH(" : "H(") + d + ")";
}

Subsystem Subsystem::parse(std::string_view s) {
    Subsystem sys;
    std::string_view rest;
    if (s.substr(0, 3) == "RH(") {
        sys.ramified = true;
        rest = s.substr(3);
    } else if (s.substr(0, 2) == "H(") {
        rest = s.substr(2);
    } else {
        throw Error("unknown subsystem '" + std::string(s) + "'");
    }
    if (rest == "A)")
        sys.contraction = ContractionClass::All;
    else if (rest == "W)")
        sys.contraction = ContractionClass::WordBases;
    else if (rest == "0)" || rest == "\xE2\x88\x85)")
        sys.contraction = ContractionClass::Empty;
    else
        throw Error("unknown subsystem '" + std::string(s) + "'");
    return sys;
}

std::vector<Subsystem> Subsystem::all_six() {
    std::vector<Subsystem> out;
    for (bool r : {false, true})
        for (auto c : {ContractionClass::All, ContractionClass::WordBases, ContractionClass::Empty})
            out.push_back({c, r, {}});
    return out;
}

const char* rule_name(Rule r) {
    switch (r) {
    case Rule::Axiom:
        return "A";
    case Rule::Weakening:
        return "W";
    case Rule::Contraction:
        return "C";
    case Rule::LolliIntro:
        return "I-o";
    case Rule::LolliElim:
        return "E-o";
    case Rule::Constant:
        return "I_A";
    case Rule::Conditional:
        return "E^C";
    case Rule::Recursion:
        return "E^R";
    }
    return "?";
}

namespace {

using Ctx = std::vector<ContextEntry>;

Ctx merge(const Ctx& a, const Ctx& b) {
    Ctx out;
    out.reserve(a.size() + b.size());
    std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out),
               [](const ContextEntry& x, const ContextEntry& y) { return x.id < y.id; });
    return out;
}

Ctx without(const Ctx& a, VarId x) {
    Ctx out;
    for (const auto& e : a)
        if (e.id != x)
            out.push_back(e);
    return out;
}

Ctx with(const Ctx& a, ContextEntry e) { return merge(a, Ctx{std::move(e)}); }

const ContextEntry* lookup(const Ctx& a, VarId x) {
    for (const auto& e : a)
        if (e.id == x)
            return &e;
    return nullptr;
}

struct TT;
using TTP = std::shared_ptr<TT>;
struct TT {
    bool arrow = false;
    int alg = -1;
    int tv = -1;
    TTP dom, cod;
};

[[noreturn]] void fail(const char* code, const Path& p, const std::string& msg) {
    throw TypeError(Diagnostic{code, path_string(p), msg});
}

class Checker {
public:
    Checker(const AlgebraFamily& fam, const Subsystem& sys) : fam_(fam), sys_(sys) {}

    DerivPtr run(const Ctx& ctx, const TermPtr& m, const TypePtr* goal) {
        for (const auto& e : ctx)
            ctx_types_[e.id] = e;
        std::vector<std::pair<VarId, int>> scope;
        count(m, {}, scope);
        scope.clear();
        next_instance_ = 0;
        Path root;
        TermPtr r = rebuild(m, root, scope);
        TTP top = synth(r, root);
        if (goal) {
            TTP g = lift(**goal);
            if (!unify(top, g))
                fail("TypeMismatch", root,
                     "term has type " + show(top) + " but " + to_string(**goal, fam_) + " was expected");
        }
        solve();
        auto d = build(r, root);
        if (!alpha_equal(d->subject, m))
            throw InvariantViolation("derivation subject differs from the checked term");
        d->subject = m;
        return d;
    }

private:
    struct Instance {
        VarId id;
        std::string name;
        TypePtr type;
        std::vector<Path> paths;
        std::vector<VarId> occ_ids;
        bool free = false;
    };
    struct Site {
        int rec_var;
        TTP result;
        Path path;
    };

    const AlgebraFamily& fam_;
    const Subsystem& sys_;
    std::map<VarId, ContextEntry> ctx_types_;
    std::vector<Instance> inst_;
    std::map<VarId, int> free_inst_;
    int next_instance_ = 0;
    std::map<Path, std::vector<int>> lca_at_;
    std::unordered_map<VarId, int> occ_inst_; // occurrence id -> instance
    std::unordered_map<const Term*, TTP> type_of_;
    std::vector<int> parent_;
    std::vector<std::optional<unsigned>> fixed_;
    std::vector<Site> sites_;
    std::vector<unsigned> value_;

    // Pass 1: occurrence paths per binder instance.
    void count(const TermPtr& m, Path p, std::vector<std::pair<VarId, int>>& scope) {
        switch (m->kind) {
        case TermKind::Var: {
            int in = -1;
            for (auto it = scope.rbegin(); it != scope.rend(); ++it)
                if (it->first == m->var) {
                    in = it->second;
                    break;
                }
            if (in < 0) {
                auto f = free_inst_.find(m->var);
                if (f == free_inst_.end()) {
                    auto c = ctx_types_.find(m->var);
                    if (c == ctx_types_.end())
                        fail("UnboundVariable", p, "variable '" + m->name + "' is not in the context");
                    inst_.push_back({m->var, m->name, c->second.type, {}, {}, true});
                    in = static_cast<int>(inst_.size() - 1);
                    free_inst_[m->var] = in;
                } else {
                    in = f->second;
                }
            }
            inst_[static_cast<std::size_t>(in)].paths.push_back(p);
            return;
        }
        case TermKind::Cons:
            return;
        case TermKind::Abs: {
            inst_.push_back({m->var, m->name, m->annotation, {}, {}, false});
            scope.emplace_back(m->var, static_cast<int>(inst_.size() - 1));
            p.push_back(0);
            count(m->body(), p, scope);
            scope.pop_back();
            return;
        }
        default:
            for (std::size_t i = 0; i < m->kids.size(); ++i) {
                Path q = p;
                q.push_back(static_cast<int>(i));
                count(m->kids[i], q, scope);
            }
        }
    }

    static Path common_prefix(const std::vector<Path>& ps) {
        Path out = ps.front();
        for (const auto& q : ps) {
            std::size_t n = 0;
            while (n < out.size() && n < q.size() && out[n] == q[n])
                ++n;
            out.resize(n);
        }
        return out;
    }

    // Pass 2: fresh copy with one identifier per occurrence of multiply-used variables.
    TermPtr rebuild(const TermPtr& m, Path& p, std::vector<std::pair<VarId, int>>& scope) {
        switch (m->kind) {
        case TermKind::Var: {
            int in = -1;
            for (auto it = scope.rbegin(); it != scope.rend(); ++it)
                if (it->first == m->var) {
                    in = it->second;
                    break;
                }
            if (in < 0)
                in = free_inst_.at(m->var);
            auto& I = inst_[static_cast<std::size_t>(in)];
            if (I.paths.size() == 1 && I.occ_ids.empty()) {
                occ_inst_[m->var] = in;
                I.occ_ids.push_back(m->var);
                return mk_var(m->var, m->name);
            }
            VarId o = fresh_var_id();
            occ_inst_[o] = in;
            I.occ_ids.push_back(o);
            register_site(in);
            return mk_var(o, m->name);
        }
        case TermKind::Cons:
            return mk_cons(m->cons, m->tier);
        case TermKind::Abs: {
            int in = next_binder_instance(m);
            scope.emplace_back(m->var, in);
            p.push_back(0);
            auto body = rebuild(m->body(), p, scope);
            p.pop_back();
            scope.pop_back();
            return mk_abs(m->var, m->name, m->annotation, body);
        }
        default: {
            std::vector<TermPtr> kids;
            for (std::size_t i = 0; i < m->kids.size(); ++i) {
                p.push_back(static_cast<int>(i));
                kids.push_back(rebuild(m->kids[i], p, scope));
                p.pop_back();
            }
            if (m->kind == TermKind::App)
                return mk_app(kids[0], kids[1]);
            TermPtr s = kids[0];
            kids.erase(kids.begin());
            return m->kind == TermKind::Cond ? mk_cond(s, kids) : mk_rec(s, kids);
        }
        }
    }

    int next_binder_instance(const TermPtr& m) {
        // Binder instances were numbered in pre-order by count(); free instances interleave, so skip them.
        while (inst_[static_cast<std::size_t>(next_instance_)].free)
            ++next_instance_;
        int in = next_instance_++;
        if (inst_[static_cast<std::size_t>(in)].id != m->var)
            throw InvariantViolation("binder numbering out of sync");
        return in;
    }

    void register_site(int in) {
        auto& I = inst_[static_cast<std::size_t>(in)];
        if (I.paths.size() < 2)
            return;
        auto& v = lca_at_[common_prefix(I.paths)];
        if (std::find(v.begin(), v.end(), in) == v.end())
            v.push_back(in);
    }

    // Tier variables --------------------------------------------------------
    int new_tv(std::optional<unsigned> fixed) {
        parent_.push_back(static_cast<int>(parent_.size()));
        fixed_.push_back(fixed);
        return static_cast<int>(parent_.size() - 1);
    }
    int find(int v) {
        while (parent_[static_cast<std::size_t>(v)] != v) {
            parent_[static_cast<std::size_t>(v)] = parent_[static_cast<std::size_t>(parent_[static_cast<std::size_t>(v)])];
            v = parent_[static_cast<std::size_t>(v)];
        }
        return v;
    }
    bool union_tv(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b)
            return true;
        auto fa = fixed_[static_cast<std::size_t>(a)], fb = fixed_[static_cast<std::size_t>(b)];
        if (fa && fb && *fa != *fb)
            return false;
        parent_[static_cast<std::size_t>(b)] = a;
        if (!fa)
            fixed_[static_cast<std::size_t>(a)] = fb;
        return true;
    }

    TTP lift(const Type& t) {
        auto r = std::make_shared<TT>();
        if (t.is_arrow) {
            r->arrow = true;
            r->dom = lift(*t.dom);
            r->cod = lift(*t.cod);
        } else {
            r->alg = t.algebra;
            r->tv = new_tv(t.tier);
        }
        return r;
    }
    TTP base_tt(int alg, int tv) {
        auto r = std::make_shared<TT>();
        r->alg = alg;
        r->tv = tv;
        return r;
    }
    TTP arrow_tt(TTP a, TTP b) {
        auto r = std::make_shared<TT>();
        r->arrow = true;
        r->dom = std::move(a);
        r->cod = std::move(b);
        return r;
    }

    bool unify(const TTP& a, const TTP& b) {
        if (a->arrow != b->arrow)
            return false;
        if (a->arrow)
            return unify(a->dom, b->dom) && unify(a->cod, b->cod);
        return a->alg == b->alg && union_tv(a->tv, b->tv);
    }

    std::string show(const TTP& t) {
        if (t->arrow) {
            std::string d = show(t->dom);
            if (t->dom->arrow)
                d = "(" + d + ")";
            return d + " -o " + show(t->cod);
        }
        auto f = fixed_[static_cast<std::size_t>(find(t->tv))];
        return fam_.at(t->alg).name + "^" + (f ? std::to_string(*f) : std::string("?"));
    }

    // Pass 3: synthesis with tier variables.
    TTP synth(const TermPtr& m, Path& p) {
        TTP r = synth_node(m, p);
        type_of_[m.get()] = r;
        return r;
    }

    TTP synth_node(const TermPtr& m, Path& p) {
        switch (m->kind) {
        case TermKind::Var:
            return lift(*inst_[static_cast<std::size_t>(occ_inst_.at(m->var))].type);
        case TermKind::Cons: {
            int tv = new_tv(m->tier);
            TTP b = base_tt(m->cons.algebra, tv);
            TTP r = b;
            for (unsigned i = 0; i < fam_.arity(m->cons); ++i)
                r = arrow_tt(base_tt(m->cons.algebra, tv), r);
            return r;
        }
        case TermKind::Abs: {
            p.push_back(0);
            TTP body = synth(m->body(), p);
            p.pop_back();
            return arrow_tt(lift(*m->annotation), body);
        }
        case TermKind::App: {
            p.push_back(0);
            TTP f = synth(m->fun(), p);
            p.back() = 1;
            TTP a = synth(m->arg(), p);
            p.pop_back();
            if (!f->arrow)
                fail("TypeMismatch", p, "applying a term of base type " + show(f));
            if (!unify(f->dom, a))
                fail("TypeMismatch", p, "argument has type " + show(a) + " but " + show(f->dom) + " was expected");
            return f->cod;
        }
        default:
            return synth_elim(m, p);
        }
    }

    TTP synth_elim(const TermPtr& m, Path& p) {
        bool rec = m->kind == TermKind::Rec;
        p.push_back(0);
        TTP s = synth(m->scrutinee(), p);
        p.pop_back();
        if (s->arrow)
            fail("TypeMismatch", p, "scrutinee has arrow type " + show(s));
        int alg = s->alg;
        auto k = fam_.constructor_count(alg);
        if (m->branches().size() != k)
            fail("BranchArityMismatch", p,
                 std::to_string(m->branches().size()) + " branches given but " + fam_.at(alg).name + " has " +
                     std::to_string(k) + " constructors");
        TTP result;
        for (unsigned i = 0; i < k; ++i) {
            p.push_back(static_cast<int>(i + 1));
            TTP b = synth(m->branches()[i], p);
            unsigned r = fam_.arity(ConsRef{alg, static_cast<int>(i)});
            TTP cur = b;
            std::vector<TTP> rec_doms;
            for (unsigned j = 0; j < r; ++j) {
                if (!cur->arrow || !unify(cur->dom, base_tt(alg, s->tv)))
                    fail("TypeMismatch", p,
                         "branch has type " + show(b) + " but must take " + std::to_string(r) + " argument(s) of type " +
                             show(s));
                cur = cur->cod;
            }
            if (rec) {
                for (unsigned j = 0; j < r; ++j) {
                    if (!cur->arrow)
                        fail("TypeMismatch", p,
                             "recursive branch has type " + show(b) + " but must also take " + std::to_string(r) +
                                 " recursive result(s)");
                    rec_doms.push_back(cur->dom);
                    cur = cur->cod;
                }
                for (const auto& d : rec_doms)
                    if (!unify(d, cur))
                        fail("TypeMismatch", p,
                             "recursive result argument has type " + show(d) + " but the result type is " + show(cur));
            }
            if (!result) {
                result = cur;
            } else if (!unify(result, cur)) {
                fail("TypeMismatch", p, "branch result " + show(cur) + " differs from " + show(result));
            }
            p.pop_back();
        }
        if (rec && sys_.ramified)
            sites_.push_back({s->tv, result, p});
        return result;
    }

    void tiers_of(const TTP& t, std::vector<int>& out) {
        if (t->arrow) {
            tiers_of(t->dom, out);
            tiers_of(t->cod, out);
        } else {
            out.push_back(find(t->tv));
        }
    }

    // Pass 4: least tiers satisfying m > V(C) at every ramified recursion.
    void solve() {
        std::map<int, std::vector<int>> above; // m-class -> classes it must exceed
        for (const auto& s : sites_) {
            std::vector<int> ts;
            tiers_of(s.result, ts);
            auto& v = above[find(s.rec_var)];
            v.insert(v.end(), ts.begin(), ts.end());
        }
        value_.assign(parent_.size(), 0);
        std::vector<int> state(parent_.size(), 0);
        std::function<unsigned(int)> eval = [&](int c) -> unsigned {
            auto cs = static_cast<std::size_t>(c);
            if (state[cs] == 2 || state[cs] == 1)
                return value_[cs];
            state[cs] = 1;
            unsigned v = fixed_[cs].value_or(0);
            if (!fixed_[cs]) {
                auto it = above.find(c);
                if (it != above.end())
                    for (int t : it->second)
                        if (t != c)
                            v = std::max(v, eval(t) + 1);
            }
            value_[cs] = v;
            state[cs] = 2;
            return v;
        };
        for (std::size_t i = 0; i < parent_.size(); ++i)
            eval(find(static_cast<int>(i)));
        for (const auto& s : sites_) {
            unsigned m = tier(s.rec_var);
            unsigned vc = level_tt(s.result);
            if (m <= vc)
                fail("RamificationViolation", s.path,
                     "recursion on tier " + std::to_string(m) + " with result level " + std::to_string(vc) +
                         " (needs m > V(C))");
        }
    }

    unsigned tier(int tv) { return value_[static_cast<std::size_t>(find(tv))]; }
    unsigned level_tt(const TTP& t) {
        if (t->arrow)
            return std::max(level_tt(t->dom), level_tt(t->cod));
        return tier(t->tv);
    }
    TypePtr lower(const TTP& t) {
        if (t->arrow)
            return arrow_type(lower(t->dom), lower(t->cod));
        return base_type(t->alg, tier(t->tv));
    }

    // Pass 5: explicit derivation.
    std::shared_ptr<TypeDerivation> node(Rule r, Ctx ctx, TermPtr subj, TypePtr ty, std::vector<DerivPtr> prem) {
        auto d = std::make_shared<TypeDerivation>();
        d->rule = r;
        d->context = std::move(ctx);
        d->subject = std::move(subj);
        d->type = std::move(ty);
        d->premises = std::move(prem);
        return d;
    }

    std::shared_ptr<TypeDerivation> build(const TermPtr& m, Path& p) {
        auto d = build_node(m, p);
        auto it = lca_at_.find(p);
        if (it != lca_at_.end())
            for (int in : it->second)
                d = contract(d, inst_[static_cast<std::size_t>(in)], p);
        return d;
    }

    std::shared_ptr<TypeDerivation> contract(std::shared_ptr<TypeDerivation> d, const Instance& I, const Path& p) {
        if (!sys_.admits(*I.type, fam_))
            fail("ContractionNotAllowed", p,
                 "variable '" + I.name + "' of type " + to_string(*I.type, fam_) + " is used " +
                     std::to_string(I.occ_ids.size()) + " times but " + sys_.name() + " does not contract at that type");
        VarId acc = I.occ_ids[0];
        for (std::size_t i = 1; i < I.occ_ids.size(); ++i) {
            VarId other = I.occ_ids[i];
            VarId z = i + 1 == I.occ_ids.size() ? I.id : fresh_var_id();
            Ctx ctx = with(without(without(d->context, acc), other), {z, I.name, I.type});
            auto subj = rename_vars(d->subject, {{acc, {z, I.name}}, {other, {z, I.name}}});
            auto c = node(Rule::Contraction, std::move(ctx), subj, d->type, {d});
            c->var = z;
            c->left = acc;
            c->right = other;
            d = c;
            acc = z;
        }
        return d;
    }

    std::shared_ptr<TypeDerivation> build_node(const TermPtr& m, Path& p) {
        TypePtr ty = lower(type_of_.at(m.get()));
        switch (m->kind) {
        case TermKind::Var: {
            auto d = node(Rule::Axiom, {{m->var, m->name, ty}}, m, ty, {});
            d->var = m->var;
            return d;
        }
        case TermKind::Cons: {
            const TTP& t = type_of_.at(m.get());
            const TT* b = t.get();
            while (b->arrow)
                b = b->cod.get();
            auto d = node(Rule::Constant, {}, m, ty, {});
            d->cons = m->cons;
            d->tier = tier(b->tv);
            return d;
        }
        case TermKind::Abs: {
            p.push_back(0);
            std::shared_ptr<TypeDerivation> body = build(m->body(), p);
            p.pop_back();
            if (!lookup(body->context, m->var)) {
                auto w = node(Rule::Weakening, with(body->context, {m->var, m->name, m->annotation}), body->subject,
                              body->type, {body});
                w->var = m->var;
                body = w;
            }
            return node(Rule::LolliIntro, without(body->context, m->var),
                        mk_abs(m->var, m->name, m->annotation, body->subject), ty, {body});
        }
        case TermKind::App: {
            p.push_back(0);
            auto f = build(m->fun(), p);
            p.back() = 1;
            auto a = build(m->arg(), p);
            p.pop_back();
            return node(Rule::LolliElim, merge(f->context, a->context), mk_app(f->subject, a->subject), ty, {f, a});
        }
        default: {
            bool rec = m->kind == TermKind::Rec;
            std::vector<DerivPtr> prem;
            Ctx ctx;
            std::vector<TermPtr> bs;
            TermPtr scrut;
            for (std::size_t i = 0; i < m->kids.size(); ++i) {
                p.push_back(static_cast<int>(i));
                auto d = build(m->kids[i], p);
                p.pop_back();
                if (rec && i > 0) {
                    for (const auto& e : d->context)
                        if (!sys_.admits(*e.type, fam_))
                            fail("RecursionContextViolation", p,
                                 "branch " + std::to_string(i) + " uses free variable '" + e.name + "' of type " +
                                     to_string(*e.type, fam_) + ", outside the contraction class of " + sys_.name());
                }
                ctx = merge(ctx, d->context);
                if (i == 0)
                    scrut = d->subject;
                else
                    bs.push_back(d->subject);
                prem.push_back(d);
            }
            auto d = node(rec ? Rule::Recursion : Rule::Conditional, std::move(ctx),
                          rec ? mk_rec(scrut, bs) : mk_cond(scrut, bs), ty, std::move(prem));
            const TTP& st = type_of_.at(m->scrutinee().get());
            d->algebra = st->alg;
            d->tier = tier(st->tv);
            d->result = ty;
            return d;
        }
        }
    }
};

} // namespace

DerivPtr check(const std::vector<ContextEntry>& ctx, const TermPtr& m, const TypePtr& a, const Subsystem& sys,
               const AlgebraFamily& fam) {
    Checker c(fam, sys);
    return c.run(ctx, m, &a);
}

DerivPtr synthesize(const std::vector<ContextEntry>& ctx, const TermPtr& m, const Subsystem& sys,
                    const AlgebraFamily& fam) {
    Checker c(fam, sys);
    return c.run(ctx, m, nullptr);
}

unsigned recursion_depth(const TypeDerivation& d) {
    unsigned best = 0;
    for (const auto& p : d.premises)
        best = std::max(best, recursion_depth(*p));
    return best + (d.rule == Rule::Recursion ? 1 : 0);
}

unsigned highest_tier(const TypeDerivation& d) {
    unsigned best = d.rule == Rule::Recursion ? d.tier : 0;
    for (const auto& p : d.premises)
        best = std::max(best, highest_tier(*p));
    return best;
}

std::size_t count_rule(const TypeDerivation& d, Rule r) {
    std::size_t n = d.rule == r ? 1 : 0;
    for (const auto& p : d.premises)
        n += count_rule(*p, r);
    return n;
}

namespace {

bool same_ctx(const Ctx& a, const Ctx& b) {
    if (a.size() != b.size())
        return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].id != b[i].id || !type_equal(*a[i].type, *b[i].type))
            return false;
    return true;
}

bool disjoint_union(const std::vector<const Ctx*>& parts, const Ctx& whole) {
    Ctx all;
    for (const auto* p : parts)
        all = merge(all, *p);
    for (std::size_t i = 1; i < all.size(); ++i)
        if (all[i].id == all[i - 1].id)
            return false;
    return same_ctx(all, whole);
}

void validate_rec(const TypeDerivation& d, const TypeDerivation* parent, const Subsystem& sys,
                  const AlgebraFamily& fam, const std::string& where, std::vector<std::string>& out) {
    auto bad = [&](const std::string& msg) { out.push_back(where + " [" + rule_name(d.rule) + "]: " + msg); };
    const auto& P = d.premises;
    auto need = [&](std::size_t n) {
        if (P.size() != n) {
            bad("expected " + std::to_string(n) + " premises");
            return false;
        }
        return true;
    };
    switch (d.rule) {
    case Rule::Axiom:
        if (!need(0))
            break;
        if (d.subject->kind != TermKind::Var || d.context.size() != 1 || d.context[0].id != d.subject->var ||
            !type_equal(*d.context[0].type, *d.type))
            bad("not of the form x:A |- x:A");
        break;
    case Rule::Weakening:
        if (!need(1))
            break;
        if (lookup(P[0]->context, d.var) || !lookup(d.context, d.var))
            bad("weakened variable handling");
        else if (!same_ctx(without(d.context, d.var), P[0]->context))
            bad("context mismatch");
        if (!alpha_equal(d.subject, P[0]->subject) || !type_equal(*d.type, *P[0]->type))
            bad("judgment changed");
        if (!parent || parent->rule != Rule::LolliIntro)
            bad("not immediately above an I-o instance (standard form)");
        break;
    case Rule::Contraction: {
        if (!need(1))
            break;
        const auto* x = lookup(P[0]->context, d.left);
        const auto* y = lookup(P[0]->context, d.right);
        const auto* z = lookup(d.context, d.var);
        if (!x || !y || !z || d.left == d.right) {
            bad("contracted variables missing");
            break;
        }
        if (!type_equal(*x->type, *y->type) || !type_equal(*x->type, *z->type))
            bad("contracted variables have different types");
        if (!sys.admits(*z->type, fam))
            bad("contraction at a type outside D");
        if (!same_ctx(without(without(P[0]->context, d.left), d.right), without(d.context, d.var)))
            bad("context mismatch");
        auto expect = rename_vars(P[0]->subject, {{d.left, {d.var, z->name}}, {d.right, {d.var, z->name}}});
        if (!alpha_equal(expect, d.subject))
            bad("subject is not M{z/x,z/y}");
        break;
    }
    case Rule::LolliIntro: {
        if (!need(1))
            break;
        if (d.subject->kind != TermKind::Abs || !d.type->is_arrow) {
            bad("shape");
            break;
        }
        const auto* x = lookup(P[0]->context, d.subject->var);
        if (!x || !type_equal(*x->type, *d.subject->annotation) || !type_equal(*d.type->dom, *x->type))
            bad("bound variable not in premise context at its annotation");
        if (!type_equal(*d.type->cod, *P[0]->type) || !alpha_equal(d.subject->body(), P[0]->subject))
            bad("body judgment mismatch");
        if (!same_ctx(without(P[0]->context, d.subject->var), d.context))
            bad("context mismatch");
        break;
    }
    case Rule::LolliElim:
        if (!need(2))
            break;
        if (d.subject->kind != TermKind::App || !P[0]->type->is_arrow) {
            bad("shape");
            break;
        }
        if (!type_equal(*P[0]->type->dom, *P[1]->type) || !type_equal(*P[0]->type->cod, *d.type))
            bad("types do not compose");
        if (!disjoint_union({&P[0]->context, &P[1]->context}, d.context))
            bad("contexts not a disjoint split");
        if (!alpha_equal(d.subject->fun(), P[0]->subject) || !alpha_equal(d.subject->arg(), P[1]->subject))
            bad("subject mismatch");
        break;
    case Rule::Constant:
        if (!need(0))
            break;
        if (d.subject->kind != TermKind::Cons || !d.context.empty() ||
            !type_equal(*d.type, *infer_constant_type(d.subject->cons, d.tier, fam)))
            bad("not |- c : A^n -o^R(c) A^n");
        break;
    case Rule::Conditional:
    case Rule::Recursion: {
        bool rec = d.rule == Rule::Recursion;
        auto k = fam.constructor_count(d.algebra);
        if (!need(k + 1))
            break;
        auto a = base_type(d.algebra, d.tier);
        if (!type_equal(*P[0]->type, *a))
            bad("scrutinee not at A^m");
        if (!type_equal(*d.type, *d.result))
            bad("conclusion type differs from C");
        std::vector<const Ctx*> parts;
        for (const auto& q : P)
            parts.push_back(&q->context);
        if (!disjoint_union(parts, d.context))
            bad("contexts not a disjoint split");
        for (unsigned i = 0; i < k; ++i) {
            unsigned r = fam.arity(ConsRef{d.algebra, static_cast<int>(i)});
            TypePtr want = rec ? arrows(r, a, arrows(r, d.result, d.result)) : arrows(r, a, d.result);
            if (!type_equal(*P[i + 1]->type, *want))
                bad("branch " + std::to_string(i + 1) + " has the wrong type");
            if (rec)
                for (const auto& e : P[i + 1]->context)
                    if (!sys.admits(*e.type, fam))
                        bad("branch context outside D");
        }
        if (rec && sys.ramified && d.tier <= level(*d.result))
            bad("m <= V(C) under ramification");
        break;
    }
    }
    for (std::size_t i = 0; i < P.size(); ++i)
        validate_rec(*P[i], &d, sys, fam, where + "." + std::to_string(i), out);
}

bool standard_rec(const TypeDerivation& d, const TypeDerivation* parent) {
    if (d.rule == Rule::Weakening && (!parent || parent->rule != Rule::LolliIntro))
        return false;
    for (const auto& p : d.premises)
        if (!standard_rec(*p, &d))
            return false;
    return true;
}

} // namespace

std::vector<std::string> validate_derivation(const TypeDerivation& d, const Subsystem& sys,
                                             const AlgebraFamily& fam) {
    std::vector<std::string> out;
    validate_rec(d, nullptr, sys, fam, "root", out);
    return out;
}

bool is_standard_form(const TypeDerivation& d) { return standard_rec(d, nullptr); }

DerivPtr standardize(const DerivPtr& d, const Subsystem& sys, const AlgebraFamily& fam) {
    return check(d->context, d->subject, d->type, sys, fam);
}

std::string derivation_summary(const TypeDerivation& d, const AlgebraFamily& fam) {
    std::ostringstream os;
    os << "type: " << to_string(*d.type, fam) << "\n";
    os << "R: " << recursion_depth(d) << "\n";
    os << "I: " << highest_tier(d) << "\n";
    os << "instances:";
    for (Rule r : {Rule::Axiom, Rule::Weakening, Rule::Contraction, Rule::LolliIntro, Rule::LolliElim, Rule::Constant,
                   Rule::Conditional, Rule::Recursion})
        os << " " << rule_name(r) << "=" << count_rule(d, r);
    os << "\n";
    return os.str();
}

} // namespace linrec
