#include "linrec/semantics.hpp"

#include "linrec/eval.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <map>
#include <queue>
#include <sstream>
#include <tuple>
#include <unordered_map>

namespace linrec {

// ---- contexts --------------------------------------------------------------

std::size_t TermContext::size() const {
    std::size_t n = 0;
    for (const auto& l : layers) {
        ++n;
        for (const auto& o : l.others)
            n += o.size();
    }
    return n;
}

AlgebraicTerm plug(const TermContext& u, const AlgebraicTerm& t) {
    AlgebraicTerm cur = t;
    for (auto it = u.layers.rbegin(); it != u.layers.rend(); ++it) {
        std::vector<AlgebraicTerm> args = it->others;
        args.insert(args.begin() + it->hole, std::move(cur));
        cur = AlgebraicTerm(it->head, std::move(args));
    }
    return cur;
}

std::vector<std::pair<TermContext, AlgebraicTerm>> decompositions(const AlgebraicTerm& t) {
    std::vector<std::pair<TermContext, AlgebraicTerm>> out;
    out.emplace_back(TermContext{}, t);
    for (std::size_t k = 0; k < t.args.size(); ++k) {
        ContextLayer l;
        l.head = t.head;
        l.hole = static_cast<unsigned>(k);
        for (std::size_t j = 0; j < t.args.size(); ++j)
            if (j != k)
                l.others.push_back(t.args[j]);
        for (auto& [u, s] : decompositions(t.args[k])) {
            TermContext c;
            c.layers.push_back(l);
            c.layers.insert(c.layers.end(), u.layers.begin(), u.layers.end());
            out.emplace_back(std::move(c), std::move(s));
        }
    }
    return out;
}

std::string to_string(const TermContext& u, const AlgebraFamily& fam) {
    std::function<std::string(std::size_t)> go = [&](std::size_t i) -> std::string {
        if (i == u.layers.size())
            return "[.]";
        const auto& l = u.layers[i];
        std::string s = fam.constructor_name(l.head);
        std::size_t o = 0;
        for (unsigned k = 0; k < l.others.size() + 1; ++k) {
            std::string a;
            bool atomic;
            if (k == l.hole) {
                a = go(i + 1);
                atomic = i + 1 == u.layers.size();
            } else {
                a = to_string(l.others[o], fam);
                atomic = l.others[o].args.empty();
                ++o;
            }
            s += atomic ? " " + a : " (" + a + ")";
        }
        return s;
    };
    return go(0);
}

bool TypeContext::positive() const { return std::count(path.begin(), path.end(), 'd') % 2 == 0; }

TypePtr focus_type(const TypePtr& a, const TypeContext& l) {
    TypePtr cur = a;
    for (char c : l.path) {
        if (!cur->is_arrow)
            return nullptr;
        cur = c == 'd' ? cur->dom : cur->cod;
    }
    return cur->is_arrow ? nullptr : cur;
}

std::string to_string(const TypePtr& a, const TypeContext& l, const AlgebraFamily& fam) {
    std::function<std::string(const TypePtr&, std::size_t)> go = [&](const TypePtr& t, std::size_t i) -> std::string {
        if (i == l.path.size())
            return "[.]";
        if (!t->is_arrow)
            return "?";
        bool dom_arrow = t->dom->is_arrow;
        if (l.path[i] == 'd') {
            std::string d = go(t->dom, i + 1);
            if (dom_arrow && i + 1 < l.path.size())
                d = "(" + d + ")";
            return d + " -o " + to_string(*t->cod, fam);
        }
        std::string d = to_string(*t->dom, fam);
        if (dom_arrow)
            d = "(" + d + ")";
        return d + " -o " + go(t->cod, i + 1);
    };
    return go(a, 0);
}

const char* closure_rule_name(ClosureRule r) {
    switch (r) {
    case ClosureRule::IntroBound:
        return "I-o/bound";
    case ClosureRule::IntroOut:
        return "I-o/out";
    case ClosureRule::IntroBodyOut:
        return "I-o/body-out";
    case ClosureRule::IntroBody:
        return "I-o/body";
    case ClosureRule::ElimFun:
        return "E-o/fun";
    case ClosureRule::ElimArg:
        return "E-o/arg";
    case ClosureRule::ElimFunOut:
        return "E-o/fun-out";
    case ClosureRule::ElimOut:
        return "E-o/out";
    case ClosureRule::Contraction:
        return "X";
    case ClosureRule::ConsLeaf:
        return "I^c/leaf";
    case ClosureRule::ConsLeafBoxed:
        return "I^c/boxed-leaf";
    case ClosureRule::ConsNode:
        return "I^c/node";
    case ClosureRule::CondExit:
        return "C^N/exit";
    case ClosureRule::CondEnter:
        return "C^N/enter";
    case ClosureRule::CondArg:
        return "C^N/arg";
    case ClosureRule::RecCopyOut:
        return "C^R/copy-out";
    case ClosureRule::RecCopyIn:
        return "C^R/copy-in";
    case ClosureRule::RecExit:
        return "C^R/exit";
    case ClosureRule::RecEnter:
        return "C^R/enter";
    case ClosureRule::RecArg:
        return "C^R/arg";
    case ClosureRule::Promotion:
        return "P^R";
    }
    return "?";
}

// ---- interning -------------------------------------------------------------

namespace {

// Hash-consed terms; node 0 is the hole, so contexts share the table.
class TermTable {
public:
    struct Node {
        ConsRef head;
        std::vector<int> kids;
        std::size_t size = 0;
        int hole_kid = -1; // index of the kid containing the hole
    };

    TermTable() { nodes_.push_back(Node{}); }

    const Node& at(int id) const { return nodes_[static_cast<std::size_t>(id)]; }
    bool has_hole(int id) const { return id == 0 || at(id).hole_kid >= 0; }

    int make(ConsRef h, std::vector<int> kids) {
        auto key = std::make_pair(h, kids);
        auto it = index_.find(key);
        if (it != index_.end())
            return it->second;
        Node n;
        n.head = h;
        n.size = 1;
        for (std::size_t k = 0; k < kids.size(); ++k) {
            n.size += at(kids[k]).size;
            if (has_hole(kids[k]))
                n.hole_kid = static_cast<int>(k);
        }
        n.kids = std::move(kids);
        nodes_.push_back(std::move(n));
        int id = static_cast<int>(nodes_.size() - 1);
        index_.emplace(std::move(key), id);
        return id;
    }

    int intern(const AlgebraicTerm& t) {
        std::vector<int> kids;
        kids.reserve(t.args.size());
        for (const auto& a : t.args)
            kids.push_back(intern(a));
        return make(t.head, std::move(kids));
    }

    int intern(const TermContext& u) {
        int cur = 0;
        for (auto it = u.layers.rbegin(); it != u.layers.rend(); ++it) {
            std::vector<int> kids;
            for (const auto& o : it->others)
                kids.push_back(intern(o));
            kids.insert(kids.begin() + it->hole, cur);
            cur = make(it->head, std::move(kids));
        }
        return cur;
    }

    AlgebraicTerm term(int id) const {
        const auto& n = at(id);
        std::vector<AlgebraicTerm> args;
        args.reserve(n.kids.size());
        for (int k : n.kids)
            args.push_back(term(k));
        return AlgebraicTerm(n.head, std::move(args));
    }

    TermContext context(int id) const {
        TermContext u;
        while (id != 0) {
            const auto& n = at(id);
            ContextLayer l;
            l.head = n.head;
            l.hole = static_cast<unsigned>(n.hole_kid);
            for (std::size_t k = 0; k < n.kids.size(); ++k)
                if (static_cast<int>(k) != n.hole_kid)
                    l.others.push_back(term(n.kids[k]));
            u.layers.push_back(std::move(l));
            id = n.kids[static_cast<std::size_t>(n.hole_kid)];
        }
        return u;
    }

    int plug(int ctx, int s) {
        if (ctx == 0)
            return s;
        auto key = std::make_pair(ctx, s);
        auto it = plug_memo_.find(key);
        if (it != plug_memo_.end())
            return it->second;
        Node n = at(ctx);
        n.kids[static_cast<std::size_t>(n.hole_kid)] = plug(n.kids[static_cast<std::size_t>(n.hole_kid)], s);
        int r = make(n.head, n.kids);
        plug_memo_.emplace(key, r);
        return r;
    }

    // (u, s) pairs with u[s] = t.
    const std::vector<std::pair<int, int>>& decomps(int t) {
        auto it = decomp_memo_.find(t);
        if (it != decomp_memo_.end())
            return it->second;
        std::vector<std::pair<int, int>> out{{0, t}};
        Node n = at(t);
        for (std::size_t k = 0; k < n.kids.size(); ++k) {
            auto sub = decomps(n.kids[k]);
            for (auto [u, s] : sub) {
                auto kids = n.kids;
                kids[k] = u;
                out.emplace_back(make(n.head, std::move(kids)), s);
            }
        }
        return decomp_memo_.emplace(t, std::move(out)).first->second;
    }

    // The context u with the k-th argument of t (0-based) cut out.
    int cut(int t, std::size_t k) {
        auto kids = at(t).kids;
        kids[k] = 0;
        return make(at(t).head, std::move(kids));
    }

    // Splits a non-hole context into its outer part and its innermost layer.
    std::pair<int, int> split_innermost(int u) {
        const Node n = at(u);
        int k = n.hole_kid;
        int child = n.kids[static_cast<std::size_t>(k)];
        if (child == 0)
            return {0, u};
        auto [outer, layer] = split_innermost(child);
        auto kids = n.kids;
        kids[static_cast<std::size_t>(k)] = outer;
        return {make(n.head, std::move(kids)), layer};
    }

private:
    std::vector<Node> nodes_;
    std::map<std::pair<ConsRef, std::vector<int>>, int> index_;
    std::map<std::pair<int, int>, int> plug_memo_;
    std::map<int, std::vector<std::pair<int, int>>> decomp_memo_;
};

class StackTable {
public:
    struct Entry {
        int u = 0, s = 0, v = -1, tail = -1;
        std::size_t depth = 0;
    };

    StackTable() { entries_.push_back(Entry{}); }

    const Entry& at(int id) const { return entries_[static_cast<std::size_t>(id)]; }

    int push(int u, int s, int v, int tail) {
        auto key = std::make_tuple(u, s, v, tail);
        auto it = index_.find(key);
        if (it != index_.end())
            return it->second;
        entries_.push_back(Entry{u, s, v, tail, at(tail).depth + 1});
        int id = static_cast<int>(entries_.size() - 1);
        index_.emplace(key, id);
        return id;
    }

private:
    std::vector<Entry> entries_;
    std::map<std::tuple<int, int, int, int>, int> index_;
};

class FocusTable {
public:
    FocusTable() { intern(""); }
    int intern(const std::string& p) {
        auto it = index_.find(p);
        if (it != index_.end())
            return it->second;
        paths_.push_back(p);
        int id = static_cast<int>(paths_.size() - 1);
        index_.emplace(p, id);
        return id;
    }
    const std::string& at(int id) const { return paths_[static_cast<std::size_t>(id)]; }

private:
    std::vector<std::string> paths_;
    std::map<std::string, int> index_;
};

struct KeyHash {
    std::size_t operator()(const std::tuple<int, int, int>& k) const {
        std::size_t h = static_cast<std::size_t>(std::get<0>(k));
        h = h * 1000003u ^ static_cast<std::size_t>(std::get<1>(k));
        h = h * 1000003u ^ static_cast<std::size_t>(std::get<2>(k));
        return h;
    }
};

std::string cs(std::size_t n) { return std::string(n, 'c'); }

} // namespace

struct TreeSet::Impl {
    struct Node {
        int t, e, st, f;
        ClosureRule rule;
        std::vector<int> kids;
    };

    TermTable terms;
    StackTable stacks;
    FocusTable foci;
    std::vector<Node> nodes;
    std::vector<TokenLabel> labels;
    std::unordered_map<std::tuple<int, int, int>, int, KeyHash> index;
    bool exhaustive = true;
    std::string cap;
    std::vector<std::string> conflicts;
    std::vector<TypePtr> edge_types;

    std::optional<int> lookup(int e, int st, int f) const {
        auto it = index.find({e, st, f});
        if (it == index.end())
            return std::nullopt;
        return it->second;
    }

    Stack stack(int st) const {
        Stack out;
        for (; st > 0; st = stacks.at(st).tail) {
            const auto& e = stacks.at(st);
            out.push_back(StackEntry{terms.context(e.u), terms.term(e.s), e.v});
        }
        return out;
    }

    int intern_stack(const Stack& u) {
        int st = 0;
        for (auto it = u.rbegin(); it != u.rend(); ++it)
            st = stacks.push(terms.intern(it->u), terms.intern(it->t), it->box, st);
        return st;
    }

    int locate(int node, int ctx, int s) {
        if (terms.plug(ctx, s) != nodes[static_cast<std::size_t>(node)].t)
            throw DecompositionMismatch("u[s] differs from the term of the tree");
        int cur = node;
        while (ctx != 0) {
            const auto& n = nodes[static_cast<std::size_t>(cur)];
            if (n.rule == ClosureRule::ConsNode) {
                const auto& c = terms.at(ctx);
                auto k = static_cast<std::size_t>(c.hole_kid);
                cur = n.kids[k];
                ctx = c.kids[k];
            } else if (n.kids.size() == 1) {
                cur = n.kids[0];
            } else {
                throw DecompositionMismatch("walk guided by the context ended at a leaf");
            }
        }
        return cur;
    }
};

TreeSet::TreeSet() : impl_(std::make_unique<Impl>()) {}
TreeSet::~TreeSet() = default;
TreeSet::TreeSet(TreeSet&&) noexcept = default;
TreeSet& TreeSet::operator=(TreeSet&&) noexcept = default;

std::size_t TreeSet::size() const { return impl_->nodes.size(); }
bool TreeSet::exhaustive() const { return impl_->exhaustive; }
const std::string& TreeSet::cap_note() const { return impl_->cap; }
const TokenLabel& TreeSet::label(int node) const { return impl_->labels.at(static_cast<std::size_t>(node)); }
const std::vector<int>& TreeSet::children(int node) const {
    return impl_->nodes.at(static_cast<std::size_t>(node)).kids;
}
ClosureRule TreeSet::rule(int node) const { return impl_->nodes.at(static_cast<std::size_t>(node)).rule; }
const std::vector<std::string>& TreeSet::uniqueness_conflicts() const { return impl_->conflicts; }

std::optional<int> TreeSet::find(int edge, const Stack& u, const TypeContext& l) const {
    int st = impl_->intern_stack(u);
    int f = impl_->foci.intern(l.path);
    return impl_->lookup(edge, st, f);
}

SemTree TreeSet::materialize(int node) const {
    SemTree t;
    t.label = label(node);
    for (int k : children(node))
        t.children.push_back(materialize(k));
    return t;
}

namespace {

std::string stack_string(const Stack& u, const AlgebraFamily& fam) {
    std::string s = "[";
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (i)
            s += ", ";
        s += "(" + to_string(u[i].u, fam) + ", " + to_string(u[i].t, fam) + ", v" + std::to_string(u[i].box) + ")";
    }
    return s + "]";
}

} // namespace

std::string TreeSet::label_string(int node, const AlgebraFamily& fam) const {
    const auto& l = label(node);
    std::string ctx = to_string(impl_->edge_types.at(static_cast<std::size_t>(l.edge)), l.focus, fam);
    return "(" + to_string(l.t, fam) + ", e" + std::to_string(l.edge) + ", " + stack_string(l.stack, fam) + ", " +
           ctx + ")";
}

std::string TreeSet::dump(int node, const AlgebraFamily& fam) const {
    std::ostringstream os;
    std::function<void(int, int)> go = [&](int n, int depth) {
        os << std::string(static_cast<std::size_t>(2 * depth), ' ') << label_string(n, fam) << "  "
           << closure_rule_name(rule(n)) << "\n";
        for (int k : children(n))
            go(k, depth + 1);
    };
    go(node, 0);
    return os.str();
}

std::string TreeSet::dump_all(const AlgebraFamily& fam) const {
    std::ostringstream os;
    os << "trees " << size() << (exhaustive() ? " exhaustive" : " capped: " + cap_note()) << "\n";
    for (std::size_t n = 0; n < size(); ++n) {
        os << "T" << n << " " << label_string(static_cast<int>(n), fam) << "  " << closure_rule_name(rule(static_cast<int>(n)));
        for (int k : children(static_cast<int>(n)))
            os << " T" << k;
        os << "\n";
    }
    return os.str();
}

std::vector<AlgebraicTerm> TreeSet::terms() const {
    std::vector<AlgebraicTerm> out;
    for (const auto& l : impl_->labels)
        out.push_back(l.t);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// ---- saturation ------------------------------------------------------------

namespace {

class Saturator {
public:
    Saturator(const InteractionGraph& g, const SemCaps& caps, const AlgebraFamily& fam, TreeSet::Impl& s)
        : g_(g), caps_(caps), fam_(fam), s_(s) {
        boxed_leaves_.resize(g.vertices.size());
        for (std::size_t v = 0; v < g.vertices.size(); ++v) {
            const auto& V = g.vertices[v];
            if (V.kind != VertexKind::Cons || fam.arity(V.cons) != 0)
                continue;
            int e = V.ports[0];
            int box = g.edges[static_cast<std::size_t>(e)].box;
            if (box >= 0)
                boxed_leaves_[static_cast<std::size_t>(box)].push_back(static_cast<int>(v));
        }
    }

    void run() {
        for (std::size_t v = 0; v < g_.vertices.size(); ++v) {
            const auto& V = g_.vertices[v];
            if (V.kind != VertexKind::Cons || fam_.arity(V.cons) != 0)
                continue;
            int e = V.ports[0];
            if (g_.edges[static_cast<std::size_t>(e)].box < 0)
                emit(s_.terms.make(V.cons, {}), e, 0, 0, ClosureRule::ConsLeaf, {});
        }
        while (!queue_.empty()) {
            Cand c = queue_.top();
            queue_.pop();
            auto key = std::make_tuple(c.e, c.st, c.f);
            auto it = s_.index.find(key);
            if (it != s_.index.end()) {
                const auto& old = s_.nodes[static_cast<std::size_t>(it->second)];
                if (old.t != c.t || old.kids != c.kids || old.rule != c.rule)
                    s_.conflicts.push_back("label at e" + std::to_string(c.e) + " derived twice: " +
                                           closure_rule_name(old.rule) + " and " + closure_rule_name(c.rule));
                continue;
            }
            if (s_.nodes.size() >= caps_.max_trees) {
                cap("max_trees");
                break;
            }
            int id = static_cast<int>(s_.nodes.size());
            s_.nodes.push_back({c.t, c.e, c.st, c.f, c.rule, c.kids});
            s_.labels.push_back(TokenLabel{s_.terms.term(c.t), c.e, s_.stack(c.st), TypeContext{s_.foci.at(c.f)}});
            s_.index.emplace(key, id);
            consume(id);
        }
    }

private:
    struct Cand {
        std::size_t size;
        std::uint64_t seq;
        int t, e, st, f;
        ClosureRule rule;
        std::vector<int> kids;
        bool operator<(const Cand& o) const {
            // priority_queue pops the largest
            return std::tie(size, seq) > std::tie(o.size, o.seq);
        }
    };

    const InteractionGraph& g_;
    const SemCaps& caps_;
    const AlgebraFamily& fam_;
    TreeSet::Impl& s_;
    std::priority_queue<Cand> queue_;
    std::uint64_t seq_ = 0;
    std::vector<std::vector<int>> boxed_leaves_;
    std::map<std::pair<int, int>, std::vector<std::tuple<int, int, int>>> waiting_;

    void cap(const std::string& what) {
        if (s_.exhaustive)
            s_.cap = what;
        s_.exhaustive = false;
    }

    void emit(int t, int e, int st, const std::string& focus, ClosureRule r, std::vector<int> kids) {
        emit(t, e, st, s_.foci.intern(focus), r, std::move(kids));
    }

    void emit(int t, int e, int st, int f, ClosureRule r, std::vector<int> kids) {
        std::size_t sz = s_.terms.at(t).size;
        if (sz > caps_.max_label_size) {
            cap("max_label_size");
            return;
        }
        if (s_.stacks.at(st).depth > caps_.max_stack_depth) {
            cap("max_stack_depth");
            return;
        }
        queue_.push(Cand{sz, seq_++, t, e, st, f, r, std::move(kids)});
    }

    const Vertex& vx(int v) const { return g_.vertices[static_cast<std::size_t>(v)]; }
    const TreeSet::Impl::Node& node(int n) const { return s_.nodes[static_cast<std::size_t>(n)]; }
    const std::string& path(int n) const { return s_.foci.at(node(n).f); }
    unsigned arity(int algebra, std::size_t i) const { return fam_.arity(ConsRef{algebra, static_cast<int>(i)}); }

    std::optional<int> side(int v, int st) const { return s_.lookup(vx(v).ports[0], st, 0); }

    void wait(int v, int st, int w, int port, int n) { waiting_[{v, st}].emplace_back(w, port, n); }

    void consume(int n) {
        const auto& N = node(n);
        const auto& E = g_.edges[static_cast<std::size_t>(N.e)];
        bool pos = std::count(path(n).begin(), path(n).end(), 'd') % 2 == 0;
        if (pos)
            dispatch(E.tgt, E.tgt_port, n);
        else
            dispatch(E.src, E.src_port, n);
    }

    void dispatch(int w, int port, int n) {
        const Vertex& V = vx(w);
        const auto N = node(n);
        const std::string L = path(n);
        auto edge = [&](int p) { return V.ports[static_cast<std::size_t>(p)]; };
        switch (V.kind) {
        case VertexKind::LolliIntro:
            if (port == 2) {
                if (L.empty())
                    return;
                if (L[0] == 'd')
                    emit(N.t, edge(0), N.st, L.substr(1), ClosureRule::IntroBound, {n});
                else
                    emit(N.t, edge(1), N.st, L.substr(1), ClosureRule::IntroBody, {n});
            } else if (port == 0) {
                emit(N.t, edge(2), N.st, "d" + L, ClosureRule::IntroOut, {n});
            } else {
                emit(N.t, edge(2), N.st, "c" + L, ClosureRule::IntroBodyOut, {n});
            }
            return;
        case VertexKind::LolliElim:
            if (port == 1) {
                emit(N.t, edge(0), N.st, "d" + L, ClosureRule::ElimFun, {n});
            } else if (port == 0) {
                if (L.empty())
                    return;
                if (L[0] == 'd')
                    emit(N.t, edge(1), N.st, L.substr(1), ClosureRule::ElimArg, {n});
                else
                    emit(N.t, edge(2), N.st, L.substr(1), ClosureRule::ElimOut, {n});
            } else {
                emit(N.t, edge(0), N.st, "c" + L, ClosureRule::ElimFunOut, {n});
            }
            return;
        case VertexKind::X:
            if (port == 0 && L.empty()) {
                emit(N.t, edge(1), N.st, 0, ClosureRule::Contraction, {n});
                emit(N.t, edge(2), N.st, 0, ClosureRule::Contraction, {n});
            }
            return;
        case VertexKind::Cons: {
            unsigned a = fam_.arity(V.cons);
            if (a == 0 || L.empty() || L.back() != 'd' || L.size() > a)
                return;
            std::vector<int> kids;
            for (unsigned k = 0; k < a; ++k) {
                auto c = s_.lookup(N.e, N.st, s_.foci.intern(cs(k) + "d"));
                if (!c)
                    return;
                kids.push_back(*c);
            }
            std::vector<int> args;
            for (int c : kids)
                args.push_back(node(c).t);
            emit(s_.terms.make(V.cons, std::move(args)), N.e, N.st, cs(a), ClosureRule::ConsNode, std::move(kids));
            return;
        }
        case VertexKind::CondN:
            cond(w, port, n);
            return;
        case VertexKind::CondR:
            rec(w, port, n);
            return;
        case VertexKind::PromR: {
            if (port != 0 || !L.empty())
                return;
            int inner = edge(1);
            int v = g_.edges[static_cast<std::size_t>(inner)].box;
            auto T = side(v, N.st);
            if (!T) {
                wait(v, N.st, w, port, n);
                return;
            }
            auto ds = s_.terms.decomps(node(*T).t);
            for (auto [u, s] : ds)
                emit(N.t, inner, s_.stacks.push(u, s, v, N.st), 0, ClosureRule::Promotion, {n});
            return;
        }
        case VertexKind::W:
        case VertexKind::P:
        case VertexKind::C:
            return;
        }
    }

    void release(int v, int st) {
        auto it = waiting_.find({v, st});
        if (it == waiting_.end())
            return;
        auto list = std::move(it->second);
        waiting_.erase(it);
        for (auto [w, p, n] : list)
            dispatch(w, p, n);
    }

    void cond(int v, int port, int n) {
        const Vertex& V = vx(v);
        const auto N = node(n);
        const std::string L = path(n);
        int k = static_cast<int>(V.ports.size()) - 2;
        if (port == 0) {
            if (!L.empty())
                return;
            const auto& t = s_.terms.at(N.t);
            int i = t.head.index;
            for (std::size_t j = 0; j < t.kids.size(); ++j) {
                int sj = s_.locate(n, s_.terms.cut(N.t, j), t.kids[j]);
                emit(t.kids[j], V.ports[static_cast<std::size_t>(i + 1)], N.st, cs(j) + "d", ClosureRule::CondArg,
                     {sj});
            }
            release(v, N.st);
            return;
        }
        auto T = side(v, N.st);
        if (!T) {
            wait(v, N.st, v, port, n);
            return;
        }
        int i = s_.terms.at(node(*T).t).head.index;
        unsigned ni = arity(V.algebra, static_cast<std::size_t>(i));
        if (port == k + 1) {
            emit(N.t, V.ports[static_cast<std::size_t>(i + 1)], N.st, cs(ni) + L, ClosureRule::CondEnter, {n});
        } else if (port == i + 1) {
            if (L.compare(0, ni, cs(ni)) == 0 && L.size() >= ni)
                emit(N.t, V.ports[static_cast<std::size_t>(k + 1)], N.st, L.substr(ni), ClosureRule::CondExit, {n});
        }
    }

    void rec(int v, int port, int n) {
        const Vertex& V = vx(v);
        const auto N = node(n);
        const std::string L = path(n);
        int k = static_cast<int>(V.ports.size()) - 2;
        auto branch = [&](int i) { return V.ports[static_cast<std::size_t>(i + 1)]; };
        if (port == 0) {
            if (!L.empty())
                return;
            auto ds = s_.terms.decomps(N.t);
            for (auto [u, s] : ds) {
                const auto& sn = s_.terms.at(s);
                int i = sn.head.index;
                int st = s_.stacks.push(u, s, v, N.st);
                for (std::size_t j = 0; j < sn.kids.size(); ++j) {
                    int sj = s_.locate(n, s_.terms.plug(u, s_.terms.cut(s, j)), sn.kids[j]);
                    emit(sn.kids[j], branch(i), st, cs(j) + "d", ClosureRule::RecArg, {sj});
                }
                for (int leaf : boxed_leaves_[static_cast<std::size_t>(v)])
                    emit(s_.terms.make(vx(leaf).cons, {}), vx(leaf).ports[0], st, 0, ClosureRule::ConsLeafBoxed, {});
            }
            release(v, N.st);
            return;
        }
        if (port == k + 1) {
            // entry from below the box
            auto T = side(v, N.st);
            if (!T) {
                wait(v, N.st, v, port, n);
                return;
            }
            int t = node(*T).t;
            int i = s_.terms.at(t).head.index;
            unsigned ni = arity(V.algebra, static_cast<std::size_t>(i));
            emit(N.t, branch(i), s_.stacks.push(0, t, v, N.st), cs(2 * ni) + L, ClosureRule::RecEnter, {n});
            return;
        }
        int i = port - 1;
        unsigned ni = arity(V.algebra, static_cast<std::size_t>(i));
        if (N.st == 0)
            return;
        const auto top = s_.stacks.at(N.st);
        if (top.v != v || s_.terms.at(top.s).head.index != i)
            return;
        auto T = side(v, top.tail);
        if (!T) {
            wait(v, top.tail, v, port, n);
            return;
        }
        if (node(*T).t != s_.terms.plug(top.u, top.s))
            return;
        if (L.size() < ni || L.compare(0, ni, cs(ni)) != 0)
            return;
        std::string rest = L.substr(ni);
        std::size_t lead = 0;
        while (lead < rest.size() && lead < ni && rest[lead] == 'c')
            ++lead;
        if (lead == ni) {
            std::string p = rest.substr(ni);
            if (top.u == 0) {
                emit(N.t, V.ports[static_cast<std::size_t>(k + 1)], top.tail, p, ClosureRule::RecExit, {n});
            } else {
                // copy s sits at argument position kk of its parent copy
                auto [outer, layer] = s_.terms.split_innermost(top.u);
                const auto& ln = s_.terms.at(layer);
                int parent = s_.terms.plug(layer, top.s);
                int a = ln.head.index;
                unsigned na = arity(V.algebra, static_cast<std::size_t>(a));
                emit(N.t, branch(a), s_.stacks.push(outer, parent, v, top.tail),
                     cs(na) + cs(static_cast<std::size_t>(ln.hole_kid)) + "d" + p, ClosureRule::RecCopyOut, {n});
            }
        } else if (rest[lead] == 'd') {
            std::string p = rest.substr(lead + 1);
            const auto& sn = s_.terms.at(top.s);
            int child = sn.kids[lead];
            int j = s_.terms.at(child).head.index;
            unsigned nj = arity(V.algebra, static_cast<std::size_t>(j));
            int u2 = s_.terms.plug(top.u, s_.terms.cut(top.s, lead));
            emit(N.t, branch(j), s_.stacks.push(u2, child, v, top.tail), cs(2 * nj) + p, ClosureRule::RecCopyIn, {n});
        }
    }
};

} // namespace

TreeSet enumerate_trees(const InteractionGraph& g, const SemCaps& caps, const AlgebraFamily& fam) {
    TreeSet out;
    for (const auto& e : g.edges)
        out.impl_->edge_types.push_back(e.type);
    Saturator(g, caps, fam, *out.impl_).run();
    return out;
}

// ---- views -----------------------------------------------------------------

std::vector<Stack> legal_stacks(const SemTree& t) {
    std::vector<Stack> out;
    std::function<void(const SemTree&)> go = [&](const SemTree& n) {
        if (std::find(out.begin(), out.end(), n.label.stack) == out.end())
            out.push_back(n.label.stack);
        for (const auto& c : n.children)
            go(c);
    };
    go(t);
    return out;
}

namespace {

// Stack-id sets per node; children always precede their parents.
std::vector<std::set<std::size_t>> stack_sets(const TreeSet& s) {
    std::vector<Stack> seen;
    std::vector<std::set<std::size_t>> out(s.size());
    for (std::size_t n = 0; n < s.size(); ++n) {
        const auto& st = s.label(static_cast<int>(n)).stack;
        auto it = std::find(seen.begin(), seen.end(), st);
        std::size_t id = static_cast<std::size_t>(it - seen.begin());
        if (it == seen.end())
            seen.push_back(st);
        out[n].insert(id);
        for (int k : s.children(static_cast<int>(n)))
            out[n].insert(out[static_cast<std::size_t>(k)].begin(), out[static_cast<std::size_t>(k)].end());
    }
    return out;
}

} // namespace

std::vector<Stack> legal_stacks(const TreeSet& s, int node) {
    std::vector<Stack> out;
    std::vector<int> todo{node};
    std::set<int> done;
    while (!todo.empty()) {
        int n = todo.back();
        todo.pop_back();
        if (!done.insert(n).second)
            continue;
        const auto& st = s.label(n).stack;
        if (std::find(out.begin(), out.end(), st) == out.end())
            out.push_back(st);
        for (int k : s.children(n))
            todo.push_back(k);
    }
    return out;
}

std::size_t legal_stack_count(const TreeSet& s, int node) { return legal_stacks(s, node).size(); }

const SemTree& subtree_locator(const SemTree& t, const TermContext& u, const AlgebraicTerm& s) {
    if (!(plug(u, s) == t.label.t))
        throw DecompositionMismatch("u[s] differs from L(T)");
    const SemTree* cur = &t;
    std::size_t layer = 0;
    while (layer < u.layers.size()) {
        const auto& l = u.layers[layer];
        if (cur->children.size() == 1) {
            cur = &cur->children[0];
            continue;
        }
        if (cur->children.size() != l.others.size() + 1 || !(cur->label.t.head == l.head))
            throw DecompositionMismatch("walk guided by the context ended at a leaf");
        cur = &cur->children[l.hole];
        ++layer;
    }
    return *cur;
}

int subtree_locator(const TreeSet& set, int node, const TermContext& u, const AlgebraicTerm& s) {
    if (!(plug(u, s) == set.label(node).t))
        throw DecompositionMismatch("u[s] differs from L(T)");
    int cur = node;
    std::size_t layer = 0;
    while (layer < u.layers.size()) {
        const auto& kids = set.children(cur);
        if (set.rule(cur) == ClosureRule::ConsNode) {
            cur = kids[u.layers[layer].hole];
            ++layer;
        } else if (kids.size() == 1) {
            cur = kids[0];
        } else {
            throw DecompositionMismatch("walk guided by the context ended at a leaf");
        }
    }
    return cur;
}

// ---- lemma checks ----------------------------------------------------------

LemmaReport check_uniqueness(const TreeSet& s) {
    LemmaReport r{"uniqueness", s.size(), s.uniqueness_conflicts()};
    return r;
}

std::vector<std::string> legal_stack_violations(const InteractionGraph& g, const TreeSet& s, const TokenLabel& l) {
    std::vector<std::string> out;
    const auto& u = l.stack;
    int theta = g.edges.at(static_cast<std::size_t>(l.edge)).box;
    if (u.empty()) {
        if (theta >= 0)
            out.push_back("empty stack on e" + std::to_string(l.edge) + " inside box v" + std::to_string(theta));
        return out;
    }
    if (theta != u[0].box)
        out.push_back("innermost entry v" + std::to_string(u[0].box) + " differs from the box of e" +
                      std::to_string(l.edge));
    for (std::size_t i = 0; i < u.size(); ++i) {
        int v = u[i].box;
        if (v < 0 || static_cast<std::size_t>(v) >= g.vertices.size() ||
            g.vertices[static_cast<std::size_t>(v)].kind != VertexKind::CondR) {
            out.push_back("stack entry " + std::to_string(i) + " names a vertex that is not C^R");
            continue;
        }
        Stack tail(u.begin() + static_cast<std::ptrdiff_t>(i) + 1, u.end());
        auto t = s.find(recursive_premise(g, v), tail, TypeContext{});
        if (!t || !(s.label(*t).t == plug(u[i].u, u[i].t)))
            out.push_back("no tree on the recursive premise of v" + std::to_string(v) + " for entry " +
                          std::to_string(i));
        int parent = g.vertices[static_cast<std::size_t>(v)].box;
        int expect = i + 1 < u.size() ? u[i + 1].box : -1;
        if (parent != expect)
            out.push_back("box of v" + std::to_string(v) + " does not match entry " + std::to_string(i + 1));
    }
    return out;
}

LemmaReport check_legal_stack_structure(const InteractionGraph& g, const TreeSet& s) {
    LemmaReport r{"legal stack structure", s.size(), {}};
    for (std::size_t n = 0; n < s.size(); ++n)
        for (auto& v : legal_stack_violations(g, s, s.label(static_cast<int>(n))))
            r.violations.push_back("T" + std::to_string(n) + ": " + v);
    return r;
}

namespace {

TypePtr hole_type(const InteractionGraph& g, const TokenLabel& l) {
    return focus_type(g.edges.at(static_cast<std::size_t>(l.edge)).type, l.focus);
}

} // namespace

TypePtr guiding_type(const InteractionGraph& g, const TreeSet& s, int node) {
    TypePtr t = hole_type(g, s.label(node));
    if (!t)
        throw InvariantViolation("type context of T" + std::to_string(node) + " is not a focus");
    for (int k : s.children(node)) {
        auto c = guiding_type(g, s, k);
        if (!type_equal(*c, *t))
            throw InvariantViolation("T" + std::to_string(node) + " mixes guiding types");
    }
    return t;
}

LemmaReport check_guiding_types(const InteractionGraph& g, const TreeSet& s) {
    LemmaReport r{"guiding type", s.size(), {}};
    // Children precede parents, so one pass over parent/child pairs covers every tree.
    for (std::size_t n = 0; n < s.size(); ++n) {
        auto t = hole_type(g, s.label(static_cast<int>(n)));
        if (!t) {
            r.violations.push_back("T" + std::to_string(n) + ": type context is not a focus");
            continue;
        }
        for (int k : s.children(static_cast<int>(n))) {
            auto c = hole_type(g, s.label(k));
            if (!c || !type_equal(*c, *t))
                r.violations.push_back("T" + std::to_string(n) + ": child T" + std::to_string(k) +
                                       " has another guiding type");
        }
    }
    return r;
}

LemmaReport check_stack_length(const TreeSet& s, unsigned recursion_depth) {
    LemmaReport r{"stack length", s.size(), {}};
    for (std::size_t n = 0; n < s.size(); ++n) {
        auto k = s.label(static_cast<int>(n)).stack.size();
        if (k > recursion_depth)
            r.violations.push_back("T" + std::to_string(n) + ": stack of length " + std::to_string(k) + " > R = " +
                                   std::to_string(recursion_depth));
    }
    return r;
}

LemmaReport check_size_bounds(const InteractionGraph& g, const TreeSet& s, const Subsystem& sys,
                              const AlgebraFamily& fam) {
    using boost::multiprecision::cpp_int;
    LemmaReport r{"label size bounds", s.size(), {}};
    bool ramified_w = sys.ramified && (sys.contraction == ContractionClass::WordBases ||
                                       sys.contraction == ContractionClass::Empty);
    auto sets = stack_sets(s);
    std::size_t gs = g.size();
    unsigned K = fam.max_arity();
    for (std::size_t n = 0; n < s.size(); ++n) {
        std::size_t lt = s.label(static_cast<int>(n)).t.size();
        std::size_t ut = sets[n].size();
        std::size_t e = gs * ut;
        // K^e with e large is astronomically above any label we can hold
        bool first = K >= 2 && e >= 64 ? true : cpp_int(lt) <= boost::multiprecision::pow(cpp_int(K), static_cast<unsigned>(e));
        if (!first)
            r.violations.push_back("T" + std::to_string(n) + ": |L(T)| = " + std::to_string(lt) + " > K^(|G||U(T)|)");
        if (ramified_w && lt > e)
            r.violations.push_back("T" + std::to_string(n) + ": |L(T)| = " + std::to_string(lt) + " > |G||U(T)| = " +
                                   std::to_string(e));
    }
    return r;
}

namespace {

bool has_suffix(const Stack& w, const Stack& u) {
    if (u.size() > w.size())
        return false;
    return std::equal(u.begin(), u.end(), w.end() - static_cast<std::ptrdiff_t>(u.size()));
}

} // namespace

LemmaReport check_ramified_monotone(const InteractionGraph& g, const TreeSet& s) {
    LemmaReport r{"ramified monotone stacks", s.size(), {}};
    // need[n]: the longest stack every ancestor of n must extend.
    std::vector<Stack> need(s.size());
    for (std::size_t n = 0; n < s.size(); ++n) {
        const auto& l = s.label(static_cast<int>(n));
        auto guide = hole_type(g, l);
        if (!guide)
            continue;
        Stack best;
        if (!l.stack.empty()) {
            int v = l.stack[0].box;
            auto rho = g.edges[static_cast<std::size_t>(recursive_premise(g, v))].type;
            if (!rho->is_arrow && rho->tier <= guide->tier)
                best = l.stack;
        }
        for (int k : s.children(static_cast<int>(n))) {
            const auto& req = need[static_cast<std::size_t>(k)];
            if (!has_suffix(l.stack, req))
                r.violations.push_back("T" + std::to_string(n) + ": stack does not extend that of descendant T" +
                                       std::to_string(k));
            if (req.size() > best.size())
                best = req;
        }
        need[n] = std::move(best);
    }
    return r;
}

LemmaReport check_subtree_closure(const TreeSet& s) {
    LemmaReport r{"subtree closure", s.size(), {}};
    for (std::size_t n = 0; n < s.size(); ++n)
        for (int k : s.children(static_cast<int>(n))) {
            const auto& l = s.label(k);
            auto f = s.find(l.edge, l.stack, l.focus);
            if (!f || *f != k)
                r.violations.push_back("T" + std::to_string(n) + ": child T" + std::to_string(k) + " is not a member");
        }
    return r;
}

std::vector<LemmaReport> check_lemmas(const InteractionGraph& g, const TreeSet& s, const TypeDerivation& d,
                                      const Subsystem& sys, const AlgebraFamily& fam) {
    std::vector<LemmaReport> out;
    out.push_back(check_uniqueness(s));
    out.push_back(check_legal_stack_structure(g, s));
    out.push_back(check_guiding_types(g, s));
    out.push_back(check_stack_length(s, recursion_depth(d)));
    out.push_back(check_size_bounds(g, s, sys, fam));
    if (sys.ramified)
        out.push_back(check_ramified_monotone(g, s));
    out.push_back(check_subtree_closure(s));
    return out;
}

// ---- theorems --------------------------------------------------------------

namespace {

void fill_missing(CoverageReport& r) {
    std::sort(r.arguments.begin(), r.arguments.end());
    r.arguments.erase(std::unique(r.arguments.begin(), r.arguments.end()), r.arguments.end());
    for (const auto& a : r.arguments)
        if (!std::binary_search(r.tree_terms.begin(), r.tree_terms.end(), a))
            r.missing.push_back(a);
}

} // namespace

CoverageReport completeness_check(const TermPtr& m, const TypeDerivation& d, const SemCaps& caps,
                                  const AlgebraFamily& fam) {
    CoverageReport r;
    auto g = build_graph(d, fam);
    auto set = enumerate_trees(g, caps, fam);
    r.tree_terms = set.terms();
    auto rg = reducts(m, {}, fam);
    for (const auto& rs : rg.redexes)
        for (const auto& x : rs)
            if (auto t = to_algebraic(x.argument, fam))
                r.arguments.push_back(*t);
    fill_missing(r);
    if (!set.exhaustive()) {
        r.conclusive = false;
        r.note = "saturation capped at " + set.cap_note();
    } else if (!rg.exhaustive) {
        r.conclusive = false;
        r.note = "reduct exploration capped";
    }
    return r;
}

CoverageReport preservation_check(const TermPtr& m, const TermPtr& n, const Subsystem& sys, const SemCaps& caps,
                                  const AlgebraFamily& fam) {
    CoverageReport r;
    auto dm = synthesize({}, m, sys, fam);
    auto dn = check({}, n, dm->type, sys, fam);
    auto gm = build_graph(*dm, fam);
    auto gn = build_graph(*dn, fam);
    auto sm = enumerate_trees(gm, caps, fam);
    auto sn = enumerate_trees(gn, caps, fam);
    r.tree_terms = sm.terms();
    r.arguments = sn.terms();
    fill_missing(r);
    if (!sm.exhaustive() || !sn.exhaustive()) {
        r.conclusive = false;
        r.note = "saturation capped";
    }
    return r;
}

} // namespace linrec
