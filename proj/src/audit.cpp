#include "linrec/audit.hpp"

#include "linrec/graph.hpp"
#include "linrec/syntax.hpp"

#include "json.hpp"

#include <algorithm>

namespace linrec {

const char* verdict_name(Verdict v) {
    switch (v) {
    case Verdict::Pass:
        return "pass";
    case Verdict::Fail:
        return "fail";
    case Verdict::Inconclusive:
        return "inconclusive";
    }
    return "?";
}

Verdict compare_bound(const BigNat& measured, bool measured_exact, const BoundValue& bound, bool bound_exact) {
    // A saturated bound is a lower bound on the true one, as is one evaluated at underestimated arguments.
    bool b_exact = bound_exact && !bound.saturated;
    if (measured <= bound.value)
        return measured_exact ? Verdict::Pass : Verdict::Inconclusive;
    return b_exact ? Verdict::Fail : Verdict::Inconclusive;
}

Verdict AuditReport::overall() const {
    Verdict v = Verdict::Pass;
    for (const auto& l : lemmas)
        if (!l.ok())
            return Verdict::Fail;
    for (const auto& c : checks) {
        if (c.informational)
            continue;
        if (c.verdict == Verdict::Fail)
            return Verdict::Fail;
        if (c.verdict == Verdict::Inconclusive)
            v = Verdict::Inconclusive;
    }
    return v;
}

namespace {

BoundCheck make_check(std::string name, std::string arg, const BigNat& measured, bool measured_exact,
                      const BoundValue& bound, bool bound_exact, bool informational = false) {
    BoundCheck c;
    c.name = std::move(name);
    c.argument = std::move(arg);
    c.bound = bound.str();
    c.measured = measured.str();
    c.verdict = compare_bound(measured, measured_exact, bound, bound_exact);
    c.informational = informational;
    return c;
}

std::string args2(std::size_t x, std::size_t y) { return "(" + std::to_string(x) + ", " + std::to_string(y) + ")"; }

} // namespace

AuditReport audit(const TermPtr& m, const Subsystem& sys, const AuditCaps& caps, const AlgebraFamily& fam) {
    AuditReport r;
    r.term = print_term(m, fam);
    r.subsystem = sys.name();
    auto d = synthesize({}, m, sys, fam);
    r.type = to_string(*d->type, fam);
    r.term_size = term_size(m);
    r.recursion_depth = recursion_depth(*d);
    r.highest_tier = highest_tier(*d);
    r.max_arity = fam.max_arity();
    const unsigned K = r.max_arity;
    const unsigned R = r.recursion_depth;

    try {
        auto n = normalize(m, caps.fuel, fam);
        r.normalized = true;
        r.steps = n.stats.steps;
        r.normal_form = print_term(n.term, fam);
        r.max_reduct_size = n.stats.max_term_size;
        r.potential = n.stats.max_argument_size;
    } catch (const FuelExhausted& e) {
        r.steps = e.stats().steps;
        r.max_reduct_size = e.stats().max_term_size;
        r.potential = e.stats().max_argument_size;
    }
    auto rg = reducts(m, caps.reducts, fam);
    r.reduct_states = rg.states.size();
    r.reducts_exhaustive = rg.exhaustive && r.normalized;
    if (r.reducts_exhaustive)
        r.longest_path = rg.longest_path();
    r.max_reduct_size = std::max(r.max_reduct_size, rg.max_term_size());
    // the deterministic run still counts when the search is capped
    r.potential = std::max(r.potential, algebraic_potential_size(rg, fam));
    r.potential_exhaustive = r.reducts_exhaustive;

    auto g = build_graph(*d, fam);
    r.graph_size = g.size();
    auto trees = enumerate_trees(g, caps.trees, fam);
    r.trees = trees.size();
    r.trees_exhaustive = trees.exhaustive();
    for (std::size_t i = 0; i < trees.size(); ++i) {
        r.max_label_size = std::max(r.max_label_size, trees.label(static_cast<int>(i)).t.size());
        r.max_stack_count = std::max(r.max_stack_count, legal_stack_count(trees, static_cast<int>(i)));
    }
    r.lemmas = check_lemmas(g, trees, *d, sys, fam);

    // Normalization time and size, in (|M|, A(M)).
    auto j = justification_bounds(R, r.term_size, r.potential, K);
    std::string jarg = "p_" + std::to_string(R) + args2(r.term_size, r.potential);
    bool a_exact = r.potential_exhaustive;
    r.checks.push_back(make_check("justification.steps", jarg, r.steps, r.normalized, {j.p, false}, a_exact));
    if (r.reducts_exhaustive)
        r.checks.push_back(
            make_check("justification.longest_path", jarg, r.longest_path, true, {j.p, false}, a_exact));
    r.checks.push_back(make_check("justification.size", "q_" + std::to_string(R) + args2(r.term_size, r.potential),
                                  r.max_reduct_size, r.reducts_exhaustive, {j.q, false}, a_exact));

    // Every algebraic redex argument is the term of some tree.
    std::vector<AlgebraicTerm> args;
    for (const auto& rs : rg.redexes)
        for (const auto& x : rs)
            if (auto t = to_algebraic(x.argument, fam))
                args.push_back(*t);
    auto terms = trees.terms();
    std::size_t missing = 0;
    for (const auto& a : args)
        missing += !std::binary_search(terms.begin(), terms.end(), a);
    {
        BoundCheck c;
        c.name = "completeness.missing";
        c.argument = std::to_string(args.size()) + " redex arguments";
        c.bound = "0";
        c.measured = std::to_string(missing);
        c.verdict = missing == 0 ? (r.trees_exhaustive ? Verdict::Pass : Verdict::Inconclusive)
                                 : (r.trees_exhaustive ? Verdict::Fail : Verdict::Inconclusive);
        r.checks.push_back(c);
    }

    // Bound on |L(T)| for the subsystem's family; decided at |G|, reported at |M|.
    bool tree_exact = r.trees_exhaustive;
    BigNat measured = r.max_label_size;
    const unsigned I = r.highest_tier;
    auto family = [&](std::size_t x, bool info) {
        std::string at = std::to_string(x);
        if (!sys.ramified) {
            auto b = primrec_bound_lower(R, x, 1, K, caps.bit_ceiling);
            r.checks.push_back(make_check(std::string("labels.primrec") + (info ? ".|M|" : ".|G|"),
                                          "p_" + std::to_string(R) + args2(x, 1), measured, tree_exact, b, true, info));
        } else if (sys.contraction == ContractionClass::All || sys.contraction == ContractionClass::Custom) {
            auto b = elementary_bound_lower(I, R, x, K, caps.bit_ceiling);
            r.checks.push_back(make_check(std::string("labels.elementary") + (info ? ".|M|" : ".|G|"),
                                          "p^" + std::to_string(I) + "_" + std::to_string(R) + "(" + at + ")",
                                          measured, tree_exact, b, true, info));
        } else {
            BoundValue b{polynomial_bound(I, R, x, PolyExponent::M), false};
            r.checks.push_back(make_check(std::string("labels.polynomial") + (info ? ".|M|" : ".|G|"),
                                          "p^" + std::to_string(I) + "_" + std::to_string(R) + "(" + at + ")",
                                          measured, tree_exact, b, true, info));
            BoundValue printed{polynomial_bound(I, R, x, PolyExponent::Printed), false};
            r.checks.push_back(make_check(std::string("labels.polynomial_printed") + (info ? ".|M|" : ".|G|"),
                                          "p^" + std::to_string(I) + "_" + std::to_string(R) + "(" + at + ")",
                                          measured, tree_exact, printed, true, true));
        }
    };
    family(r.graph_size, false);
    family(r.term_size, true);
    return r;
}

std::string to_json(const AuditReport& r) {
    using nlohmann::ordered_json;
    ordered_json j;
    j["term"] = r.term;
    j["subsystem"] = r.subsystem;
    j["type"] = r.type;
    j["sizes"] = {{"term", r.term_size},
                  {"graph", r.graph_size},
                  {"recursion_depth", r.recursion_depth},
                  {"highest_tier", r.highest_tier},
                  {"max_arity", r.max_arity}};
    j["evaluation"] = {{"normalized", r.normalized},
                       {"normal_form", r.normal_form},
                       {"steps", r.steps},
                       {"reduct_states", r.reduct_states},
                       {"reducts_exhaustive", r.reducts_exhaustive},
                       {"longest_path", r.longest_path},
                       {"max_reduct_size", r.max_reduct_size},
                       {"potential_size", r.potential},
                       {"potential_exhaustive", r.potential_exhaustive}};
    j["semantics"] = {{"trees", r.trees},
                      {"exhaustive", r.trees_exhaustive},
                      {"max_label_size", r.max_label_size},
                      {"max_stack_count", r.max_stack_count}};
    ordered_json lemmas = ordered_json::array();
    for (const auto& l : r.lemmas) {
        ordered_json v = ordered_json::array();
        for (const auto& s : l.violations)
            v.push_back(s);
        lemmas.push_back({{"name", l.name}, {"checked", l.checked}, {"ok", l.ok()}, {"violations", v}});
    }
    j["lemmas"] = lemmas;
    ordered_json checks = ordered_json::array();
    for (const auto& c : r.checks)
        checks.push_back({{"name", c.name},
                          {"argument", c.argument},
                          {"bound", c.bound},
                          {"measured", c.measured},
                          {"verdict", verdict_name(c.verdict)},
                          {"informational", c.informational}});
    j["checks"] = checks;
    j["verdict"] = verdict_name(r.overall());
    return j.dump(2) + "\n";
}

} // namespace linrec
