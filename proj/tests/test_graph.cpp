#include "doctest.h"

#include "linrec/error.hpp"
#include "linrec/graph.hpp"
#include "linrec/stdlib.hpp"
#include "linrec/syntax.hpp"
#include "linrec/typecheck.hpp"

#include <memory>

using namespace linrec;

namespace {

TermPtr P(const std::string& s) { return parse_term(s, AlgebraFamily::builtin(), stdlib_options()); }

struct Count {
    std::size_t vertices = 0, ports = 0;
};

// Counted straight off the derivation: every non-axiom rule is one vertex, each branch hypothesis of a
// recursion is one promotion vertex, and the root adds one vertex per hypothesis plus the conclusion.
void count(const TypeDerivation& d, Count& c) {
    switch (d.rule) {
    case Rule::Axiom:
        break;
    case Rule::Weakening:
        c.vertices += 1, c.ports += 1;
        break;
    case Rule::Contraction:
    case Rule::LolliIntro:
    case Rule::LolliElim:
        c.vertices += 1, c.ports += 3;
        break;
    case Rule::Constant:
        c.vertices += 1, c.ports += 1;
        break;
    case Rule::Conditional:
    case Rule::Recursion:
        c.vertices += 1, c.ports += d.premises.size() + 1;
        if (d.rule == Rule::Recursion)
            for (std::size_t i = 1; i < d.premises.size(); ++i) {
                c.vertices += d.premises[i]->context.size();
                c.ports += 2 * d.premises[i]->context.size();
            }
        break;
    }
    for (const auto& p : d.premises)
        count(*p, c);
}

Count oracle(const TypeDerivation& d) {
    Count c;
    count(d, c);
    c.vertices += d.context.size() + 1;
    c.ports += d.context.size() + 1;
    return c;
}

DerivPtr D(const std::string& s, const char* sys = "H(A)") { return synthesize({}, P(s), Subsystem::parse(sys)); }

void check_wiring(const InteractionGraph& g) {
    for (std::size_t i = 0; i < g.edges.size(); ++i) {
        const auto& e = g.edges[i];
        REQUIRE(e.src >= 0);
        REQUIRE(e.tgt >= 0);
        CHECK(g.vertices[static_cast<std::size_t>(e.src)].ports[static_cast<std::size_t>(e.src_port)] == int(i));
        CHECK(g.vertices[static_cast<std::size_t>(e.tgt)].ports[static_cast<std::size_t>(e.tgt_port)] == int(i));
        for (auto [w, port] : {std::pair{e.src, e.src_port}, std::pair{e.tgt, e.tgt_port}}) {
            const auto& v = g.vertices[static_cast<std::size_t>(w)];
            if (e.box == v.box)
                continue;
            // crossing a box boundary: only at a recursion's branch or a promotion's inside
            REQUIRE(e.box >= 0);
            const auto& owner = g.vertices[static_cast<std::size_t>(e.box)];
            CHECK(owner.kind == VertexKind::CondR);
            CHECK(owner.box == v.box);
            bool branch = w == e.box && port >= 1 && port <= int(v.ports.size()) - 2;
            bool inside = v.kind == VertexKind::PromR && port == 1;
            CHECK((branch || inside));
        }
    }
    // local typing of the connectives
    auto ty = [&](int v, int p) { return g.edges[static_cast<std::size_t>(g.vertices[static_cast<std::size_t>(v)].ports[static_cast<std::size_t>(p)])].type; };
    for (int v = 0; v < int(g.vertices.size()); ++v) {
        const auto& x = g.vertices[static_cast<std::size_t>(v)];
        switch (x.kind) {
        case VertexKind::LolliIntro:
            CHECK(type_equal(*ty(v, 2), *arrow_type(ty(v, 0), ty(v, 1))));
            break;
        case VertexKind::LolliElim:
            CHECK(type_equal(*ty(v, 0), *arrow_type(ty(v, 1), ty(v, 2))));
            break;
        case VertexKind::X:
            CHECK(type_equal(*ty(v, 0), *ty(v, 1)));
            CHECK(type_equal(*ty(v, 0), *ty(v, 2)));
            break;
        case VertexKind::PromR:
            CHECK(type_equal(*ty(v, 0), *ty(v, 1)));
            break;
        case VertexKind::CondN:
        case VertexKind::CondR:
            CHECK_FALSE(ty(v, 0)->is_arrow);
            CHECK(ty(v, 0)->algebra == x.algebra);
            break;
        default:
            break;
        }
    }
}

} // namespace

TEST_CASE("vertex and edge counts follow the derivation") {
    const char* corpus[] = {"\\x:U^0. x", "c2_U", "c1_U c2_U", "@UnAdd 1 1", "@Coerc 2", "@Square 1", "@Add 2 3",
                            "@Exp 2", "@Leaves (@Blowup 2)", "@Predecessor 2", "\\x:C^0. c1_C x x",
                            "\\x:U^0. \\y:U^0. x"};
    for (const char* s : corpus) {
        CAPTURE(s);
        auto d = D(s);
        auto g = build_graph(*d);
        auto c = oracle(*d);
        CHECK(g.size() == c.vertices);
        CHECK(2 * g.edges.size() == c.ports);
        CHECK(g.box_count() == count_rule(*d, Rule::Recursion));
        CHECK(g.vertices[static_cast<std::size_t>(g.conclusion)].kind == VertexKind::C);
        check_wiring(g);
    }
}

TEST_CASE("small graphs") {
    auto id = build_graph(*D("\\x:U^0. x"));
    // a self-loop on the abstraction plus its output
    CHECK(id.size() == 2);
    REQUIRE(id.edges.size() == 2);
    bool loop = false;
    for (const auto& e : id.edges)
        loop |= e.src == e.tgt;
    CHECK(loop);

    auto g = build_graph(*D("@UnAdd 1 1"));
    CHECK(g.size() == 18);
    CHECK(g.edges.size() == 20);
    std::size_t boxed = 0;
    for (std::size_t i = 0; i < g.edges.size(); ++i)
        boxed += g.depth(int(i)) > 0;
    CHECK(boxed == 7);
    int cr = -1;
    for (int v = 0; v < int(g.size()); ++v)
        if (g.vertices[static_cast<std::size_t>(v)].kind == VertexKind::CondR)
            cr = v;
    REQUIRE(cr >= 0);
    CHECK(recursive_premise(g, cr) == g.vertices[static_cast<std::size_t>(cr)].ports[0]);
    CHECK_THROWS_AS(recursive_premise(g, g.conclusion), WrongLabel);
    CHECK(vertex_label(g, cr) == "C^R_U");
    for (std::size_t i = 0; i < g.edges.size(); ++i) {
        auto b = box_premise_of_edge(g, int(i));
        CHECK(b.has_value() == (g.edges[i].box >= 0));
        if (b)
            CHECK(*b == recursive_premise(g, g.edges[i].box));
    }
}

TEST_CASE("nested boxes") {
    auto g = build_graph(*D("@Square 1", "RH(0)"));
    std::size_t deepest = 0;
    for (std::size_t i = 0; i < g.edges.size(); ++i)
        deepest = std::max(deepest, g.depth(int(i)));
    CHECK(deepest == 2);
    check_wiring(g);
}

TEST_CASE("open derivations get hypothesis vertices") {
    std::map<std::string, VarId> fv;
    auto m = parse_term("c1_U y", AlgebraFamily::builtin(), stdlib_options(&fv));
    auto d = synthesize({{fv["y"], "y", base_type(kU, 0)}}, m, Subsystem::parse("H(0)"));
    auto g = build_graph(*d);
    std::size_t ps = 0;
    for (const auto& v : g.vertices)
        if (v.kind == VertexKind::P) {
            ++ps;
            CHECK(v.var == fv["y"]);
        }
    CHECK(ps == 1);
}

TEST_CASE("non-standard derivations are rejected") {
    auto inner = D("c2_U");
    auto w = std::make_shared<TypeDerivation>();
    w->rule = Rule::Weakening;
    auto x = fresh_var_id();
    w->context = {{x, "x", base_type(kU, 0)}};
    w->subject = inner->subject;
    w->type = inner->type;
    w->var = x;
    w->premises = {inner};
    CHECK_FALSE(is_standard_form(*w));
    CHECK_THROWS_AS(build_graph(*w), NonStandardDerivation);
}

TEST_CASE("renderings") {
    auto g = build_graph(*D("@UnAdd 1 1"));
    auto dot = to_dot(g);
    CHECK(dot.find("digraph") != std::string::npos);
    CHECK(dot.find("subgraph cluster_") != std::string::npos);
    auto dump = dump_graph(g);
    std::size_t lines = 0;
    for (char c : dump)
        lines += c == '\n';
    CHECK(lines == g.size() + g.edges.size());
    CHECK(dump_graph(g) == dump);
}
