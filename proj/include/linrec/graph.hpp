#pragma once

#include "linrec/algebra.hpp"
#include "linrec/error.hpp"
#include "linrec/typecheck.hpp"
#include "linrec/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace linrec {

enum class VertexKind { W, X, LolliIntro, LolliElim, P, C, CondN, PromR, CondR, Cons };
const char* vertex_kind_name(VertexKind k);

// Role of an edge at one of its endpoints. Ports list per kind:
//   LolliIntro {bound (out), body (in), out}; LolliElim {function (in), argument (in), out};
//   X {in, copy1 (out), copy2 (out)}; Cons {out}; CondN/CondR {scrutinee (in), branch_1..k (in), out};
//   PromR {outside (in), inside (out)}; P {out}; C {in}; W {in}.
struct Vertex {
    VertexKind kind;
    int algebra = -1; // CondN, CondR, PromR, Cons
    ConsRef cons;     // Cons
    std::vector<int> ports;
    int box = -1;     // theta: innermost enclosing CondR vertex, -1 when undefined
    VarId var = 0;    // P: the open hypothesis
};

struct Edge {
    int src = -1, src_port = -1;
    int tgt = -1, tgt_port = -1;
    TypePtr type;
    int box = -1;
};

struct InteractionGraph {
    std::vector<Vertex> vertices;
    std::vector<Edge> edges;
    int conclusion = -1; // the C vertex

    std::size_t size() const { return vertices.size(); }
    std::size_t box_count() const;
    // Nesting depth of an edge: number of boxes containing it.
    std::size_t depth(int edge) const;
};

// Requires a standard-form derivation; throws NonStandardDerivation otherwise.
InteractionGraph build_graph(const TypeDerivation& d, const AlgebraFamily& fam = AlgebraFamily::builtin());

inline std::size_t graph_size(const InteractionGraph& g) { return g.size(); }
std::optional<int> box_premise_of_edge(const InteractionGraph& g, int edge);
std::optional<int> box_premise_of_vertex(const InteractionGraph& g, int vertex);
// Throws WrongLabel unless v is a CondR vertex.
int recursive_premise(const InteractionGraph& g, int v);

std::string vertex_label(const InteractionGraph& g, int v, const AlgebraFamily& fam = AlgebraFamily::builtin());
std::string to_dot(const InteractionGraph& g, const AlgebraFamily& fam = AlgebraFamily::builtin());
// One vertex or edge per line.
std::string dump_graph(const InteractionGraph& g, const AlgebraFamily& fam = AlgebraFamily::builtin());

} // namespace linrec
