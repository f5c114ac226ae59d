#include "linrec/graph.hpp"

#include <functional>
#include <map>
#include <sstream>

namespace linrec {

const char* vertex_kind_name(VertexKind k) {
    switch (k) {
    case VertexKind::W:
        return "W";
    case VertexKind::X:
        return "X";
    case VertexKind::LolliIntro:
        return "I-o";
    case VertexKind::LolliElim:
        return "E-o";
    case VertexKind::P:
        return "P";
    case VertexKind::C:
        return "C";
    case VertexKind::CondN:
        return "C^N";
    case VertexKind::PromR:
        return "P^R";
    case VertexKind::CondR:
        return "C^R";
    case VertexKind::Cons:
        return "I^c";
    }
    return "?";
}

std::size_t InteractionGraph::box_count() const {
    std::size_t n = 0;
    for (const auto& v : vertices)
        n += v.kind == VertexKind::CondR;
    return n;
}

std::size_t InteractionGraph::depth(int edge) const {
    std::size_t n = 0;
    for (int b = edges[static_cast<std::size_t>(edge)].box; b >= 0; b = vertices[static_cast<std::size_t>(b)].box)
        ++n;
    return n;
}

namespace {

// A graph under construction: one dangling output edge and one dangling edge per hypothesis.
struct Frag {
    int out = -1;
    std::map<VarId, int> hyps;
    std::vector<int> top_vertices, top_edges; // not yet inside any box
};

class Builder {
public:
    explicit Builder(InteractionGraph& g) : g_(g) {}

    Frag build(const TypeDerivation& d) {
        switch (d.rule) {
        case Rule::Axiom: {
            Frag f;
            f.out = edge(d.type, f);
            f.hyps[d.var] = f.out;
            return f;
        }
        case Rule::Weakening: {
            Frag f = build(*d.premises[0]);
            int w = vertex(VertexKind::W, f);
            const auto* entry = find_ctx(d, d.var);
            int e = edge(entry->type, f);
            attach_tgt(e, w, 0);
            f.hyps[d.var] = e;
            return f;
        }
        case Rule::Contraction: {
            Frag f = build(*d.premises[0]);
            int x = vertex(VertexKind::X, f, 3);
            int h = edge(find_ctx(d, d.var)->type, f);
            attach_tgt(h, x, 0);
            attach_src(take(f, d.left), x, 1);
            attach_src(take(f, d.right), x, 2);
            f.hyps[d.var] = h;
            return f;
        }
        case Rule::LolliIntro: {
            Frag f = build(*d.premises[0]);
            int v = vertex(VertexKind::LolliIntro, f, 3);
            attach_src(take(f, d.subject->var), v, 0);
            attach_tgt(f.out, v, 1);
            f.out = edge(d.type, f);
            attach_src(f.out, v, 2);
            return f;
        }
        case Rule::LolliElim: {
            Frag a = build(*d.premises[0]);
            Frag b = build(*d.premises[1]);
            int v = vertex(VertexKind::LolliElim, a, 3);
            attach_tgt(a.out, v, 0);
            attach_tgt(b.out, v, 1);
            merge_into(a, b);
            a.out = edge(d.type, a);
            attach_src(a.out, v, 2);
            return a;
        }
        case Rule::Constant: {
            Frag f;
            int v = vertex(VertexKind::Cons, f, 1);
            g_.vertices[static_cast<std::size_t>(v)].cons = d.cons;
            g_.vertices[static_cast<std::size_t>(v)].algebra = d.cons.algebra;
            f.out = edge(d.type, f);
            attach_src(f.out, v, 0);
            return f;
        }
        case Rule::Conditional:
        case Rule::Recursion:
            return elim(d);
        }
        throw InvariantViolation("unknown rule");
    }

private:
    InteractionGraph& g_;

    static const ContextEntry* find_ctx(const TypeDerivation& d, VarId x) {
        for (const auto& e : d.context)
            if (e.id == x)
                return &e;
        throw InvariantViolation("variable missing from context");
    }

    int vertex(VertexKind k, Frag& f, int ports = 1) {
        Vertex v;
        v.kind = k;
        v.ports.assign(static_cast<std::size_t>(ports), -1);
        g_.vertices.push_back(std::move(v));
        int id = static_cast<int>(g_.vertices.size() - 1);
        f.top_vertices.push_back(id);
        return id;
    }

    int edge(TypePtr t, Frag& f) {
        Edge e;
        e.type = std::move(t);
        g_.edges.push_back(std::move(e));
        int id = static_cast<int>(g_.edges.size() - 1);
        f.top_edges.push_back(id);
        return id;
    }

    void attach_src(int e, int v, int port) {
        auto& E = g_.edges[static_cast<std::size_t>(e)];
        if (E.src >= 0)
            throw InvariantViolation("edge source attached twice");
        E.src = v;
        E.src_port = port;
        g_.vertices[static_cast<std::size_t>(v)].ports[static_cast<std::size_t>(port)] = e;
    }

    void attach_tgt(int e, int v, int port) {
        auto& E = g_.edges[static_cast<std::size_t>(e)];
        if (E.tgt >= 0)
            throw InvariantViolation("edge target attached twice");
        E.tgt = v;
        E.tgt_port = port;
        g_.vertices[static_cast<std::size_t>(v)].ports[static_cast<std::size_t>(port)] = e;
    }

    static int take(Frag& f, VarId x) {
        auto it = f.hyps.find(x);
        if (it == f.hyps.end())
            throw InvariantViolation("hypothesis missing in graph fragment");
        int e = it->second;
        f.hyps.erase(it);
        return e;
    }

    static void merge_into(Frag& a, Frag& b) {
        for (auto& [x, e] : b.hyps)
            if (!a.hyps.emplace(x, e).second)
                throw InvariantViolation("hypothesis shared between premises");
        a.top_vertices.insert(a.top_vertices.end(), b.top_vertices.begin(), b.top_vertices.end());
        a.top_edges.insert(a.top_edges.end(), b.top_edges.begin(), b.top_edges.end());
    }

    Frag elim(const TypeDerivation& d) {
        bool rec = d.rule == Rule::Recursion;
        std::size_t k = d.premises.size() - 1;
        Frag s = build(*d.premises[0]);
        int v = vertex(rec ? VertexKind::CondR : VertexKind::CondN, s, static_cast<int>(k + 2));
        g_.vertices[static_cast<std::size_t>(v)].algebra = d.algebra;
        attach_tgt(s.out, v, 0);
        for (std::size_t i = 0; i < k; ++i) {
            Frag b = build(*d.premises[i + 1]);
            attach_tgt(b.out, v, static_cast<int>(i + 1));
            if (rec) {
                // Free variables of a branch cross the box boundary through P^R vertices.
                std::map<VarId, int> outer;
                for (auto& [x, inner] : b.hyps) {
                    Frag tmp;
                    int p = vertex(VertexKind::PromR, tmp, 2);
                    const auto& ty = g_.edges[static_cast<std::size_t>(inner)].type;
                    g_.vertices[static_cast<std::size_t>(p)].algebra = ty->is_arrow ? -1 : ty->algebra;
                    attach_src(inner, p, 1);
                    int e = edge(ty, tmp);
                    attach_tgt(e, p, 0);
                    outer[x] = e;
                    s.top_vertices.push_back(p);
                    s.top_edges.push_back(e);
                }
                for (int x : b.top_vertices)
                    g_.vertices[static_cast<std::size_t>(x)].box = v;
                for (int e : b.top_edges)
                    g_.edges[static_cast<std::size_t>(e)].box = v;
                for (auto& [x, e] : outer)
                    if (!s.hyps.emplace(x, e).second)
                        throw InvariantViolation("hypothesis shared between premises");
            } else {
                merge_into(s, b);
            }
        }
        s.out = edge(d.type, s);
        attach_src(s.out, v, static_cast<int>(k + 1));
        return s;
    }
};

} // namespace

InteractionGraph build_graph(const TypeDerivation& d, const AlgebraFamily& fam) {
    (void)fam;
    if (!is_standard_form(d))
        throw NonStandardDerivation("interaction graphs are built from standard-form derivations only");
    InteractionGraph g;
    Builder b(g);
    Frag f = b.build(d);
    for (auto& [x, e] : f.hyps) {
        Vertex p;
        p.kind = VertexKind::P;
        p.var = x;
        p.ports = {e};
        g.vertices.push_back(p);
        auto& E = g.edges[static_cast<std::size_t>(e)];
        E.src = static_cast<int>(g.vertices.size() - 1);
        E.src_port = 0;
    }
    Vertex c;
    c.kind = VertexKind::C;
    c.ports = {f.out};
    g.vertices.push_back(c);
    g.conclusion = static_cast<int>(g.vertices.size() - 1);
    auto& E = g.edges[static_cast<std::size_t>(f.out)];
    E.tgt = g.conclusion;
    E.tgt_port = 0;
    for (const auto& e : g.edges)
        if (e.src < 0 || e.tgt < 0)
            throw InvariantViolation("dangling edge in interaction graph");
    return g;
}

std::optional<int> box_premise_of_edge(const InteractionGraph& g, int edge) {
    int b = g.edges.at(static_cast<std::size_t>(edge)).box;
    return b < 0 ? std::nullopt : std::optional<int>(b);
}

std::optional<int> box_premise_of_vertex(const InteractionGraph& g, int vertex) {
    int b = g.vertices.at(static_cast<std::size_t>(vertex)).box;
    return b < 0 ? std::nullopt : std::optional<int>(b);
}

int recursive_premise(const InteractionGraph& g, int v) {
    const auto& V = g.vertices.at(static_cast<std::size_t>(v));
    if (V.kind != VertexKind::CondR)
        throw WrongLabel(std::string("vertex ") + std::to_string(v) + " is labelled " + vertex_kind_name(V.kind) +
                         ", not C^R");
    return V.ports[0];
}

std::string vertex_label(const InteractionGraph& g, int v, const AlgebraFamily& fam) {
    const auto& V = g.vertices[static_cast<std::size_t>(v)];
    std::string s = vertex_kind_name(V.kind);
    switch (V.kind) {
    case VertexKind::Cons:
        return "I^" + fam.constructor_name(V.cons);
    case VertexKind::CondN:
    case VertexKind::CondR:
    case VertexKind::PromR:
        return V.algebra >= 0 ? s + "_" + fam.at(V.algebra).name : s;
    default:
        return s;
    }
}

std::string to_dot(const InteractionGraph& g, const AlgebraFamily& fam) {
    std::ostringstream os;
    os << "digraph G {\n";
    std::map<int, std::vector<int>> members; // box -> vertices directly inside
    std::map<int, std::vector<int>> children;
    for (std::size_t v = 0; v < g.vertices.size(); ++v) {
        int b = g.vertices[v].box;
        members[b].push_back(static_cast<int>(v));
        if (g.vertices[v].kind == VertexKind::CondR)
            children[b].push_back(static_cast<int>(v));
    }
    std::function<void(int, int)> emit = [&](int box, int indent) {
        std::string pad(static_cast<std::size_t>(indent), ' ');
        for (int v : members[box])
            os << pad << "v" << v << " [label=\"" << vertex_label(g, v, fam) << "\"];\n";
        for (int c : children[box]) {
            // Box of c: everything whose innermost box is c.
            os << pad << "subgraph cluster_" << c << " {\n" << pad << "  label=\"box v" << c << "\";\n";
            emit(c, indent + 2);
            os << pad << "}\n";
        }
    };
    emit(-1, 2);
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
        const auto& E = g.edges[e];
        os << "  v" << E.src << " -> v" << E.tgt << " [label=\"e" << e << ": " << to_string(*E.type, fam) << "\"];\n";
    }
    os << "}\n";
    return os.str();
}

std::string dump_graph(const InteractionGraph& g, const AlgebraFamily& fam) {
    std::ostringstream os;
    for (std::size_t v = 0; v < g.vertices.size(); ++v) {
        const auto& V = g.vertices[v];
        os << "v" << v << " " << vertex_label(g, static_cast<int>(v), fam) << " box=";
        if (V.box < 0)
            os << "-";
        else
            os << "v" << V.box;
        os << " ports=";
        for (std::size_t p = 0; p < V.ports.size(); ++p)
            os << (p ? "," : "") << "e" << V.ports[p];
        os << "\n";
    }
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
        const auto& E = g.edges[e];
        os << "e" << e << " v" << E.src << " -> v" << E.tgt << " : " << to_string(*E.type, fam) << " box=";
        if (E.box < 0)
            os << "-";
        else
            os << "v" << E.box;
        os << "\n";
    }
    return os.str();
}

} // namespace linrec
