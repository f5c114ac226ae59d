#include "linrec/term.hpp"

#include "linrec/error.hpp"

#include <atomic>
#include <unordered_map>

namespace linrec {

VarId fresh_var_id() {
    static std::atomic<VarId> next{1};
    return next.fetch_add(1, std::memory_order_relaxed);
}

static std::size_t sum_sizes(const std::vector<TermPtr>& kids) {
    std::size_t n = 0;
    for (const auto& k : kids)
        n += k->size;
    return n;
}

TermPtr mk_var(VarId id, std::string name) {
    auto t = std::make_shared<Term>();
    t->kind = TermKind::Var;
    t->var = id;
    t->name = std::move(name);
    return t;
}

TermPtr mk_cons(ConsRef c, std::optional<unsigned> tier) {
    auto t = std::make_shared<Term>();
    t->kind = TermKind::Cons;
    t->cons = c;
    t->tier = tier;
    return t;
}

TermPtr mk_app(TermPtr f, TermPtr a) {
    auto t = std::make_shared<Term>();
    t->kind = TermKind::App;
    t->kids = {std::move(f), std::move(a)};
    t->size = sum_sizes(t->kids);
    return t;
}

TermPtr mk_apps(TermPtr f, const std::vector<TermPtr>& args) {
    for (const auto& a : args)
        f = mk_app(std::move(f), a);
    return f;
}

TermPtr mk_abs(VarId id, std::string name, TypePtr annotation, TermPtr body) {
    auto t = std::make_shared<Term>();
    t->kind = TermKind::Abs;
    t->var = id;
    t->name = std::move(name);
    t->annotation = std::move(annotation);
    t->kids = {std::move(body)};
    t->size = t->kids[0]->size + 1;
    return t;
}

static TermPtr mk_elim(TermKind k, TermPtr s, std::vector<TermPtr> branches) {
    auto t = std::make_shared<Term>();
    t->kind = k;
    t->kids.reserve(branches.size() + 1);
    t->kids.push_back(std::move(s));
    for (auto& b : branches)
        t->kids.push_back(std::move(b));
    t->size = sum_sizes(t->kids) + branches.size();
    return t;
}

TermPtr mk_cond(TermPtr scrutinee, std::vector<TermPtr> branches) {
    return mk_elim(TermKind::Cond, std::move(scrutinee), std::move(branches));
}

TermPtr mk_rec(TermPtr scrutinee, std::vector<TermPtr> branches) {
    return mk_elim(TermKind::Rec, std::move(scrutinee), std::move(branches));
}

static TermPtr with_kids(const Term& m, std::vector<TermPtr> kids) {
    switch (m.kind) {
    case TermKind::App:
        return mk_app(std::move(kids[0]), std::move(kids[1]));
    case TermKind::Abs:
        return mk_abs(m.var, m.name, m.annotation, std::move(kids[0]));
    case TermKind::Cond:
    case TermKind::Rec: {
        TermPtr s = std::move(kids[0]);
        kids.erase(kids.begin());
        return mk_elim(m.kind, std::move(s), std::move(kids));
    }
    default:
        throw InvariantViolation("with_kids on a leaf");
    }
}

TermPtr from_algebraic(const AlgebraicTerm& t) {
    TermPtr r = mk_cons(t.head);
    for (const auto& a : t.args)
        r = mk_app(r, from_algebraic(a));
    return r;
}

std::optional<AlgebraicTerm> to_algebraic(const TermPtr& m, const AlgebraFamily& fam) {
    std::vector<const TermPtr*> args;
    const TermPtr* cur = &m;
    while ((*cur)->kind == TermKind::App) {
        args.push_back(&(*cur)->kids[1]);
        cur = &(*cur)->kids[0];
    }
    if ((*cur)->kind != TermKind::Cons)
        return std::nullopt;
    ConsRef c = (*cur)->cons;
    if (fam.arity(c) != args.size())
        return std::nullopt;
    AlgebraicTerm t(c);
    t.args.reserve(args.size());
    for (auto it = args.rbegin(); it != args.rend(); ++it) {
        auto sub = to_algebraic(**it, fam);
        if (!sub || sub->head.algebra != c.algebra)
            return std::nullopt;
        t.args.push_back(std::move(*sub));
    }
    return t;
}

static void collect_free(const TermPtr& m, std::set<VarId>& bound, std::map<VarId, std::string>& out) {
    switch (m->kind) {
    case TermKind::Var:
        if (!bound.count(m->var))
            out.emplace(m->var, m->name);
        return;
    case TermKind::Cons:
        return;
    case TermKind::Abs: {
        bool fresh = bound.insert(m->var).second;
        collect_free(m->body(), bound, out);
        if (fresh)
            bound.erase(m->var);
        return;
    }
    default:
        for (const auto& k : m->kids)
            collect_free(k, bound, out);
    }
}

std::map<VarId, std::string> free_vars(const TermPtr& m) {
    std::set<VarId> bound;
    std::map<VarId, std::string> out;
    collect_free(m, bound, out);
    return out;
}

bool is_closed(const TermPtr& m) { return free_vars(m).empty(); }

std::size_t occurrences(const TermPtr& m, VarId x) {
    switch (m->kind) {
    case TermKind::Var:
        return m->var == x ? 1 : 0;
    case TermKind::Cons:
        return 0;
    case TermKind::Abs:
        return m->var == x ? 0 : occurrences(m->body(), x);
    default: {
        std::size_t n = 0;
        for (const auto& k : m->kids)
            n += occurrences(k, x);
        return n;
    }
    }
}

static bool name_taken(const std::map<VarId, std::string>& fv, const std::string& n) {
    for (const auto& [id, name] : fv)
        if (name == n)
            return true;
    return false;
}

TermPtr rename_vars(const TermPtr& m, const std::map<VarId, std::pair<VarId, std::string>>& ren) {
    switch (m->kind) {
    case TermKind::Var: {
        auto it = ren.find(m->var);
        return it == ren.end() ? m : mk_var(it->second.first, it->second.second);
    }
    case TermKind::Cons:
        return m;
    case TermKind::Abs:
        if (ren.count(m->var)) {
            auto inner = ren;
            inner.erase(m->var);
            auto b = rename_vars(m->body(), inner);
            return b == m->body() ? m : mk_abs(m->var, m->name, m->annotation, b);
        }
        [[fallthrough]];
    default: {
        std::vector<TermPtr> kids;
        bool changed = false;
        for (const auto& k : m->kids) {
            kids.push_back(rename_vars(k, ren));
            changed |= kids.back() != k;
        }
        return changed ? with_kids(*m, std::move(kids)) : m;
    }
    }
}

static TermPtr subst(const TermPtr& m, VarId x, const TermPtr& v, const std::map<VarId, std::string>& fv) {
    switch (m->kind) {
    case TermKind::Var:
        return m->var == x ? v : m;
    case TermKind::Cons:
        return m;
    case TermKind::Abs: {
        if (m->var == x)
            return m;
        if (fv.count(m->var)) {
            VarId fresh = fresh_var_id();
            std::string nm = m->name + "'";
            while (name_taken(fv, nm))
                nm += "'";
            auto body = rename_vars(m->body(), {{m->var, {fresh, nm}}});
            return mk_abs(fresh, nm, m->annotation, subst(body, x, v, fv));
        }
        auto b = subst(m->body(), x, v, fv);
        return b == m->body() ? m : mk_abs(m->var, m->name, m->annotation, b);
    }
    default: {
        std::vector<TermPtr> kids;
        kids.reserve(m->kids.size());
        bool changed = false;
        for (const auto& k : m->kids) {
            kids.push_back(subst(k, x, v, fv));
            changed |= kids.back() != k;
        }
        return changed ? with_kids(*m, std::move(kids)) : m;
    }
    }
}

TermPtr substitute(const TermPtr& m, VarId x, const TermPtr& v) {
    auto fv = free_vars(v);
    return subst(m, x, v, fv);
}

ValueClass classify_value(const TermPtr& m) {
    switch (m->kind) {
    case TermKind::Var:
        return ValueClass::Variable;
    case TermKind::Abs:
        return ValueClass::Abstraction;
    case TermKind::Cons:
        return ValueClass::Algebraic;
    case TermKind::App:
        if (classify_value(m->fun()) == ValueClass::Algebraic && classify_value(m->arg()) == ValueClass::Algebraic)
            return ValueClass::Algebraic;
        return ValueClass::NonValue;
    default:
        return ValueClass::NonValue;
    }
}

const char* value_class_name(ValueClass c) {
    switch (c) {
    case ValueClass::Variable:
        return "variable-value";
    case ValueClass::Abstraction:
        return "abstraction-value";
    case ValueClass::Algebraic:
        return "algebraic-value";
    default:
        return "non-value";
    }
}

static void type_key(const Type& t, std::string& out) {
    if (!t.is_arrow) {
        out += 'B';
        out += std::to_string(t.algebra);
        out += '.';
        out += std::to_string(t.tier);
        return;
    }
    out += '(';
    type_key(*t.dom, out);
    out += '>';
    type_key(*t.cod, out);
    out += ')';
}

static void key_rec(const TermPtr& m, std::unordered_map<VarId, std::size_t>& depth_of, std::size_t depth,
                    std::string& out) {
    switch (m->kind) {
    case TermKind::Var: {
        auto it = depth_of.find(m->var);
        if (it != depth_of.end()) {
            out += '#';
            out += std::to_string(depth - it->second);
        } else {
            out += '$';
            out += std::to_string(m->var);
        }
        out += ' ';
        return;
    }
    case TermKind::Cons:
        out += 'c';
        out += std::to_string(m->cons.algebra);
        out += '.';
        out += std::to_string(m->cons.index);
        if (m->tier) {
            out += '@';
            out += std::to_string(*m->tier);
        }
        out += ' ';
        return;
    case TermKind::Abs: {
        out += "\\";
        type_key(*m->annotation, out);
        out += '.';
        auto prev = depth_of.find(m->var);
        std::optional<std::size_t> saved;
        if (prev != depth_of.end())
            saved = prev->second;
        depth_of[m->var] = depth + 1;
        key_rec(m->body(), depth_of, depth + 1, out);
        if (saved)
            depth_of[m->var] = *saved;
        else
            depth_of.erase(m->var);
        return;
    }
    case TermKind::App:
        out += 'A';
        break;
    case TermKind::Cond:
        out += 'K';
        out += std::to_string(m->kids.size());
        break;
    case TermKind::Rec:
        out += 'R';
        out += std::to_string(m->kids.size());
        break;
    }
    out += '[';
    for (const auto& k : m->kids)
        key_rec(k, depth_of, depth, out);
    out += ']';
}

std::string alpha_key(const TermPtr& m) {
    std::unordered_map<VarId, std::size_t> depth_of;
    std::string out;
    out.reserve(m->size * 6);
    key_rec(m, depth_of, 0, out);
    return out;
}

static bool alpha_rec(const TermPtr& a, const TermPtr& b, std::map<VarId, VarId>& amap, std::map<VarId, VarId>& bmap) {
    if (a->kind != b->kind || a->kids.size() != b->kids.size() || a->size != b->size)
        return false;
    switch (a->kind) {
    case TermKind::Var: {
        auto ia = amap.find(a->var);
        auto ib = bmap.find(b->var);
        if (ia == amap.end() || ib == bmap.end())
            return ia == amap.end() && ib == bmap.end() && a->var == b->var;
        return ia->second == b->var && ib->second == a->var;
    }
    case TermKind::Cons:
        return a->cons == b->cons && a->tier == b->tier;
    case TermKind::Abs: {
        if (!type_equal(*a->annotation, *b->annotation))
            return false;
        auto sa = amap.find(a->var) != amap.end() ? std::optional<VarId>(amap[a->var]) : std::nullopt;
        auto sb = bmap.find(b->var) != bmap.end() ? std::optional<VarId>(bmap[b->var]) : std::nullopt;
        amap[a->var] = b->var;
        bmap[b->var] = a->var;
        bool ok = alpha_rec(a->body(), b->body(), amap, bmap);
        if (sa)
            amap[a->var] = *sa;
        else
            amap.erase(a->var);
        if (sb)
            bmap[b->var] = *sb;
        else
            bmap.erase(b->var);
        return ok;
    }
    default:
        for (std::size_t i = 0; i < a->kids.size(); ++i)
            if (!alpha_rec(a->kids[i], b->kids[i], amap, bmap))
                return false;
        return true;
    }
}

bool alpha_equal(const TermPtr& a, const TermPtr& b) {
    std::map<VarId, VarId> amap, bmap;
    return alpha_rec(a, b, amap, bmap);
}

const TermPtr& subterm_at(const TermPtr& m, const Path& p) {
    const TermPtr* cur = &m;
    for (int i : p)
        cur = &(*cur)->kids.at(static_cast<std::size_t>(i));
    return *cur;
}

static TermPtr replace_rec(const TermPtr& m, const Path& p, std::size_t depth, TermPtr r) {
    if (depth == p.size())
        return r;
    auto kids = m->kids;
    auto i = static_cast<std::size_t>(p[depth]);
    kids.at(i) = replace_rec(m->kids[i], p, depth + 1, std::move(r));
    return with_kids(*m, std::move(kids));
}

TermPtr replace_at(const TermPtr& m, const Path& p, TermPtr replacement) {
    return replace_rec(m, p, 0, std::move(replacement));
}

std::string path_string(const Path& p) {
    std::string s = "root";
    for (int i : p) {
        s += '.';
        s += std::to_string(i);
    }
    return s;
}

} // namespace linrec
