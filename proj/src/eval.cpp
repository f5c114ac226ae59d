#include "linrec/eval.hpp"

#include "linrec/syntax.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <ostream>
#include <set>
#include <unordered_map>

namespace linrec {

const char* redex_kind_name(RedexKind k) {
    switch (k) {
    case RedexKind::Beta:
        return "beta";
    case RedexKind::Conditional:
        return "conditional";
    case RedexKind::Recursive:
        return "recursive";
    }
    return "?";
}

namespace {

std::optional<Redex> redex_here(const TermPtr& m, const AlgebraFamily& fam) {
    switch (m->kind) {
    case TermKind::App:
        if (m->fun()->kind == TermKind::Abs && is_value(m->arg()))
            return Redex{{}, RedexKind::Beta, m->arg()};
        return std::nullopt;
    case TermKind::Cond:
    case TermKind::Rec: {
        auto t = to_algebraic(m->scrutinee(), fam);
        if (!t || m->branches().size() != fam.constructor_count(t->head.algebra))
            return std::nullopt;
        return Redex{{}, m->kind == TermKind::Cond ? RedexKind::Conditional : RedexKind::Recursive, m->scrutinee()};
    }
    default:
        return std::nullopt;
    }
}

void collect(const TermPtr& m, Path& p, const AlgebraFamily& fam, std::vector<Redex>& out, bool first_only) {
    if (first_only && !out.empty())
        return;
    if (auto r = redex_here(m, fam)) {
        r->position = p;
        out.push_back(std::move(*r));
        if (first_only)
            return;
    }
    switch (m->kind) {
    case TermKind::App:
        for (int i : {0, 1}) {
            p.push_back(i);
            collect(m->kids[static_cast<std::size_t>(i)], p, fam, out, first_only);
            p.pop_back();
        }
        break;
    case TermKind::Cond:
    case TermKind::Rec:
        p.push_back(0);
        collect(m->scrutinee(), p, fam, out, first_only);
        p.pop_back();
        break;
    default:
        break;
    }
}

TermPtr contract_at(const TermPtr& n, RedexKind kind, const AlgebraFamily& fam) {
    if (kind == RedexKind::Beta)
        return substitute(n->fun()->body(), n->fun()->var, n->arg());
    const TermPtr& s = n->scrutinee();
    // Peel the constructor spine of the scrutinee.
    std::vector<TermPtr> args;
    TermPtr h = s;
    while (h->kind == TermKind::App) {
        args.push_back(h->arg());
        h = h->fun();
    }
    std::reverse(args.begin(), args.end());
    auto br = n->branches();
    TermPtr out = br[static_cast<std::size_t>(h->cons.index)];
    for (const auto& a : args)
        out = mk_app(out, a);
    if (kind == RedexKind::Recursive) {
        std::vector<TermPtr> bs(br.begin(), br.end());
        for (const auto& a : args)
            out = mk_app(out, mk_rec(a, bs));
    }
    (void)fam;
    return out;
}

std::size_t algebraic_arg_size(const Redex& r, const AlgebraFamily& fam) {
    if (r.kind != RedexKind::Beta)
        return r.argument->size;
    return to_algebraic(r.argument, fam) ? r.argument->size : 0;
}

} // namespace

std::vector<Redex> redexes(const TermPtr& m, const AlgebraFamily& fam) {
    std::vector<Redex> out;
    Path p;
    collect(m, p, fam, out, false);
    return out;
}

TermPtr step(const TermPtr& m, const Redex& r, const AlgebraFamily& fam) {
    const TermPtr& n = subterm_at(m, r.position);
    if (!redex_here(n, fam))
        throw Error("no redex at " + path_string(r.position));
    return replace_at(m, r.position, contract_at(n, r.kind, fam));
}

Normalized normalize(const TermPtr& m, std::size_t fuel, const AlgebraFamily& fam, std::ostream* trace) {
    RunStats st;
    TermPtr cur = m;
    st.max_term_size = cur->size;
    for (;;) {
        std::vector<Redex> rs;
        Path p;
        collect(cur, p, fam, rs, true);
        if (rs.empty())
            break;
        if (st.steps >= fuel)
            throw FuelExhausted(st, cur);
        const Redex& r = rs.front();
        std::size_t as = algebraic_arg_size(r, fam);
        cur = step(cur, r, fam);
        ++st.steps;
        st.max_term_size = std::max(st.max_term_size, cur->size);
        st.max_argument_size = std::max(st.max_argument_size, as);
        switch (r.kind) {
        case RedexKind::Beta:
            ++st.beta;
            break;
        case RedexKind::Conditional:
            ++st.conditional;
            break;
        case RedexKind::Recursive:
            ++st.recursive;
            break;
        }
        if (trace)
            *trace << st.steps << " " << redex_kind_name(r.kind) << " " << path_string(r.position) << " "
                   << r.argument->size << " " << cur->size << "\n";
    }
    return {cur, st};
}

std::size_t ReductGraph::max_term_size() const {
    std::size_t best = 0;
    for (const auto& s : states)
        best = std::max(best, s->size);
    return best;
}

std::size_t ReductGraph::longest_path() const {
    std::vector<std::size_t> memo(states.size(), 0);
    std::vector<char> done(states.size(), 0);
    // States are discovered in BFS order, but successors may precede; iterate to a fixpoint via DFS.
    std::function<std::size_t(std::size_t)> go = [&](std::size_t i) -> std::size_t {
        if (done[i])
            return memo[i];
        done[i] = 1;
        std::size_t best = 0;
        for (auto j : succ[i])
            best = std::max(best, go(j) + 1);
        memo[i] = best;
        return best;
    };
    return states.empty() ? 0 : go(0);
}

ReductGraph reducts(const TermPtr& m, const ReductCaps& caps, const AlgebraFamily& fam) {
    ReductGraph g;
    std::unordered_map<std::string, std::size_t> seen;
    std::vector<std::size_t> depth;
    auto add = [&](const TermPtr& t, std::size_t d) -> std::optional<std::size_t> {
        auto key = alpha_key(t);
        auto it = seen.find(key);
        if (it != seen.end())
            return it->second;
        if (g.states.size() >= caps.max_states) {
            g.exhaustive = false;
            return std::nullopt;
        }
        seen.emplace(std::move(key), g.states.size());
        g.states.push_back(t);
        g.succ.emplace_back();
        g.redexes.emplace_back();
        depth.push_back(d);
        return g.states.size() - 1;
    };
    add(m, 0);
    for (std::size_t i = 0; i < g.states.size(); ++i) {
        auto rs = redexes(g.states[i], fam);
        if (!rs.empty() && depth[i] >= caps.max_steps) {
            g.exhaustive = false;
            g.redexes[i] = std::move(rs);
            continue;
        }
        std::vector<std::size_t> nexts;
        for (const auto& r : rs) {
            auto j = add(step(g.states[i], r, fam), depth[i] + 1);
            if (j && std::find(nexts.begin(), nexts.end(), *j) == nexts.end())
                nexts.push_back(*j);
        }
        g.succ[i] = std::move(nexts);
        g.redexes[i] = std::move(rs);
    }
    return g;
}

std::size_t algebraic_potential_size(const ReductGraph& g, const AlgebraFamily& fam) {
    std::size_t best = 0;
    for (const auto& rs : g.redexes)
        for (const auto& r : rs)
            best = std::max(best, algebraic_arg_size(r, fam));
    return best;
}

PotentialSize algebraic_potential_size(const TermPtr& m, const ReductCaps& caps, const AlgebraFamily& fam) {
    PotentialSize out;
    auto g = reducts(m, caps, fam);
    out.value = algebraic_potential_size(g, fam);
    out.exhaustive = g.exhaustive;
    out.states = g.states.size();
    try {
        out.trace_value = normalize(m, caps.max_steps, fam).stats.max_argument_size;
    } catch (const FuelExhausted& e) {
        out.trace_value = e.stats().max_argument_size;
        out.exhaustive = false;
    }
    out.value = std::max(out.value, out.trace_value);
    return out;
}

AlgebraicTerm assert_base_normal(const TermPtr& m, const TypePtr& a, std::size_t fuel, const AlgebraFamily& fam) {
    if (a->is_arrow)
        throw Error("assert_base_normal needs a base type");
    auto n = normalize(m, fuel, fam).term;
    auto t = to_algebraic(n, fam);
    if (!t || t->head.algebra != a->algebra)
        throw InvariantViolation("normal form " + print_term(n, fam) + " is not a term of " + fam.at(a->algebra).name);
    return *t;
}

std::vector<std::string> diamond_violations(const ReductGraph& g) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < g.states.size(); ++i) {
        const auto& s = g.succ[i];
        for (std::size_t a = 0; a < s.size(); ++a)
            for (std::size_t b = a + 1; b < s.size(); ++b) {
                std::set<std::size_t> sa(g.succ[s[a]].begin(), g.succ[s[a]].end());
                bool ok = false;
                for (auto j : g.succ[s[b]])
                    if (sa.count(j)) {
                        ok = true;
                        break;
                    }
                if (!ok)
                    out.push_back("state " + std::to_string(i) + ": successors " + std::to_string(s[a]) + " and " +
                                  std::to_string(s[b]) + " do not rejoin");
            }
    }
    return out;
}

} // namespace linrec
