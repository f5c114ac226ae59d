#include "linrec/syntax.hpp"

#include "linrec/error.hpp"

#include <cctype>
#include <set>
#include <vector>

namespace linrec {

namespace {

enum class Tok {
    Ident,
    Int,
    Bits,
    Lambda,
    Colon,
    Dot,
    LParen,
    RParen,
    LCond,
    RCond,
    LRec,
    RRec,
    Comma,
    Lolli,
    Caret,
    At,
    LBrace,
    RBrace,
    Slash,
    End
};

struct Token {
    Tok kind;
    std::string text;
    int line;
    int col;
};

class Lexer {
public:
    explicit Lexer(std::string_view s) : src_(s) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (true) {
            skip();
            if (pos_ >= src_.size()) {
                out.push_back({Tok::End, "", line_, col_});
                return out;
            }
            out.push_back(next());
        }
    }

private:
    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;

    char peek(std::size_t k = 0) const { return pos_ + k < src_.size() ? src_[pos_ + k] : '\0'; }

    void advance(std::size_t n = 1) {
        for (std::size_t i = 0; i < n && pos_ < src_.size(); ++i) {
            if (src_[pos_] == '\n') {
                ++line_;
                col_ = 1;
            } else if ((static_cast<unsigned char>(src_[pos_]) & 0xC0) != 0x80) {
                ++col_;
            }
            ++pos_;
        }
    }

    bool starts(std::string_view s) const { return src_.substr(pos_, s.size()) == s; }

    void skip() {
        while (pos_ < src_.size()) {
            if (std::isspace(static_cast<unsigned char>(peek()))) {
                advance();
            } else if (starts("--")) {
                while (pos_ < src_.size() && peek() != '\n')
                    advance();
            } else {
                return;
            }
        }
    }

    static bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
    static bool ident_char(char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
    }

    Token next() {
        int l = line_, c = col_;
        auto simple = [&](Tok k, std::size_t n) {
            Token t{k, std::string(src_.substr(pos_, n)), l, c};
            advance(n);
            return t;
        };
        if (starts("\xCE\xBB")) // λ
            return simple(Tok::Lambda, 2);
        if (starts("\xE2\x8A\xB8")) // ⊸
            return simple(Tok::Lolli, 3);
        if (starts("{{"))
            return simple(Tok::LCond, 2);
        if (starts("}}"))
            return simple(Tok::RCond, 2);
        if (starts("<<"))
            return simple(Tok::LRec, 2);
        if (starts(">>"))
            return simple(Tok::RRec, 2);
        if (starts("-o"))
            return simple(Tok::Lolli, 2);
        if (starts("b\"")) {
            advance(2);
            std::string bits;
            while (pos_ < src_.size() && peek() != '"') {
                if (peek() != '0' && peek() != '1')
                    throw ParseError("bit string literal may only contain 0 and 1", line_, col_);
                bits += peek();
                advance();
            }
            if (pos_ >= src_.size())
                throw ParseError("unterminated bit string literal", l, c);
            advance();
            return {Tok::Bits, bits, l, c};
        }
        char ch = peek();
        switch (ch) {
        case '\\':
            return simple(Tok::Lambda, 1);
        case ':':
            return simple(Tok::Colon, 1);
        case '.':
            return simple(Tok::Dot, 1);
        case '(':
            return simple(Tok::LParen, 1);
        case ')':
            return simple(Tok::RParen, 1);
        case ',':
            return simple(Tok::Comma, 1);
        case '^':
            return simple(Tok::Caret, 1);
        case '@':
            return simple(Tok::At, 1);
        case '{':
            return simple(Tok::LBrace, 1);
        case '}':
            return simple(Tok::RBrace, 1);
        case '/':
            return simple(Tok::Slash, 1);
        default:
            break;
        }
        if (std::isdigit(static_cast<unsigned char>(ch))) {
            std::size_t n = 0;
            while (std::isdigit(static_cast<unsigned char>(peek(n))))
                ++n;
            return simple(Tok::Int, n);
        }
        if (ident_start(ch)) {
            std::size_t n = 0;
            while (ident_char(peek(n)))
                ++n;
            return simple(Tok::Ident, n);
        }
        throw ParseError(std::string("unexpected character '") + ch + "'", l, c);
    }
};

bool looks_like_constructor(const std::string& s) {
    if (s.size() < 4 || s[0] != 'c' || !std::isdigit(static_cast<unsigned char>(s[1])))
        return false;
    std::size_t i = 1;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])))
        ++i;
    return i + 1 < s.size() && s[i] == '_';
}

class Parser {
public:
    Parser(std::vector<Token> toks, AlgebraFamily& fam, const ParseOptions& opts)
        : toks_(std::move(toks)), fam_(fam), opts_(opts) {
        if (opts_.free_vars)
            free_ = opts_.free_vars;
        else
            free_ = &own_free_;
    }

    void prelude() {
        while (cur().kind == Tok::Ident && cur().text == "algebra") {
            take();
            Token name = expect(Tok::Ident, "algebra name");
            expect(Tok::LBrace, "'{'");
            FreeAlgebra a{name.text, {}};
            while (true) {
                Token cn = expect(Tok::Ident, "constructor name");
                expect(Tok::Slash, "'/'");
                Token ar = expect(Tok::Int, "arity");
                a.constructors.push_back({cn.text, static_cast<unsigned>(std::stoul(ar.text))});
                if (cur().kind == Tok::Comma) {
                    take();
                    continue;
                }
                break;
            }
            expect(Tok::RBrace, "'}'");
            try {
                fam_.add(std::move(a));
            } catch (const Error& e) {
                throw ParseError(e.what(), name.line, name.col);
            }
        }
    }

    TermPtr whole_term() {
        auto t = term();
        if (cur().kind != Tok::End)
            fail("unexpected '" + cur().text + "'");
        return t;
    }

    TypePtr whole_type() {
        auto t = type();
        if (cur().kind != Tok::End)
            fail("unexpected '" + cur().text + "' after type");
        return t;
    }

private:
    struct Binding {
        std::string name;
        VarId id;
        TypePtr type;
    };

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    AlgebraFamily& fam_;
    const ParseOptions& opts_;
    std::vector<Binding> scope_;
    std::map<std::string, VarId> own_free_;
    std::map<std::string, VarId>* free_;

    const Token& cur() const { return toks_[pos_]; }
    Token take() { return toks_[pos_++]; }

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, cur().line, cur().col); }

    Token expect(Tok k, const char* what) {
        if (cur().kind != k)
            fail(std::string("expected ") + what + (cur().kind == Tok::End ? " at end of input" : ", got '" + cur().text + "'"));
        return take();
    }

    TypePtr type() {
        auto lhs = base_or_paren_type();
        if (cur().kind == Tok::Lolli) {
            take();
            return arrow_type(lhs, type());
        }
        return lhs;
    }

    TypePtr base_or_paren_type() {
        if (cur().kind == Tok::LParen) {
            take();
            auto t = type();
            expect(Tok::RParen, "')'");
            return t;
        }
        Token name = expect(Tok::Ident, "type");
        auto alg = fam_.find(name.text);
        if (!alg)
            throw ParseError("unknown algebra '" + name.text + "'", name.line, name.col);
        unsigned tier = 0;
        if (cur().kind == Tok::Caret) {
            take();
            tier = static_cast<unsigned>(std::stoul(expect(Tok::Int, "tier").text));
        }
        return base_type(*alg, tier);
    }

    TermPtr term() {
        if (cur().kind == Tok::Lambda)
            return lambda();
        return application();
    }

    TermPtr lambda() {
        take();
        Token x = expect(Tok::Ident, "binder");
        if (looks_like_constructor(x.text))
            throw ParseError("constructor name used as binder", x.line, x.col);
        expect(Tok::Colon, "':' after binder");
        auto ty = type();
        expect(Tok::Dot, "'.'");
        VarId id = fresh_var_id();
        scope_.push_back({x.text, id, ty});
        auto body = term();
        scope_.pop_back();
        return mk_abs(id, x.text, ty, body);
    }

    bool atom_start() const {
        switch (cur().kind) {
        case Tok::Ident:
        case Tok::LParen:
        case Tok::At:
            return true;
        case Tok::Int:
        case Tok::Bits:
            return opts_.literals;
        default:
            return false;
        }
    }

    TermPtr application() {
        if (!atom_start())
            fail(cur().kind == Tok::End ? "expected a term at end of input" : "expected a term, got '" + cur().text + "'");
        TermPtr acc = atom();
        while (true) {
            if (atom_start()) {
                acc = mk_app(acc, atom());
            } else if (cur().kind == Tok::Lambda) {
                acc = mk_app(acc, lambda());
                return acc;
            } else if (cur().kind == Tok::LCond || cur().kind == Tok::LRec) {
                Token open = take();
                bool rec = open.kind == Tok::LRec;
                std::vector<TermPtr> bs;
                bs.push_back(term());
                while (cur().kind == Tok::Comma) {
                    take();
                    bs.push_back(term());
                }
                expect(rec ? Tok::RRec : Tok::RCond, rec ? "'>>'" : "'}}'");
                check_branch_count(acc, bs.size(), open);
                acc = rec ? mk_rec(acc, std::move(bs)) : mk_cond(acc, std::move(bs));
            } else {
                return acc;
            }
        }
    }

    // Scrutinee algebra when it is syntactically evident.
    std::optional<int> evident_algebra(const TermPtr& s) const {
        const Term* cur = s.get();
        while (cur->kind == TermKind::App)
            cur = cur->kids[0].get();
        if (cur->kind == TermKind::Cons)
            return cur->cons.algebra;
        if (cur == s.get() && cur->kind == TermKind::Var) {
            for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
                if (it->id == cur->var)
                    return it->type->is_arrow ? std::nullopt : std::optional<int>(it->type->algebra);
        }
        return std::nullopt;
    }

    void check_branch_count(const TermPtr& s, std::size_t n, const Token& at) const {
        auto alg = evident_algebra(s);
        if (alg && fam_.constructor_count(*alg) != n)
            throw ParseError("branch count " + std::to_string(n) + " does not match algebra " + fam_.at(*alg).name +
                                 " with " + std::to_string(fam_.constructor_count(*alg)) + " constructors",
                             at.line, at.col);
    }

    TermPtr atom() {
        Token t = cur();
        switch (t.kind) {
        case Tok::LParen: {
            take();
            auto inner = term();
            expect(Tok::RParen, "')'");
            return inner;
        }
        case Tok::Int:
            take();
            return from_algebraic(encode_nat(std::stoull(t.text)));
        case Tok::Bits:
            take();
            return from_algebraic(encode_binstring(t.text));
        case Tok::At: {
            take();
            Token name = expect(Tok::Ident, "prelude name after '@'");
            std::optional<unsigned> tier;
            if (cur().kind == Tok::At) {
                take();
                tier = static_cast<unsigned>(std::stoul(expect(Tok::Int, "tier").text));
            }
            if (!opts_.macro)
                throw ParseError("prelude references are not enabled", t.line, t.col);
            try {
                return opts_.macro(name.text, tier);
            } catch (const ParseError&) {
                throw;
            } catch (const Error& e) {
                throw ParseError(e.what(), name.line, name.col);
            }
        }
        case Tok::Ident: {
            take();
            if (looks_like_constructor(t.text)) {
                auto c = fam_.find_constructor(t.text);
                if (!c)
                    throw ParseError("unknown constructor '" + t.text + "'", t.line, t.col);
                std::optional<unsigned> tier;
                if (cur().kind == Tok::At && toks_[pos_ + 1].kind == Tok::Int) {
                    take();
                    tier = static_cast<unsigned>(std::stoul(take().text));
                }
                return mk_cons(*c, tier);
            }
            for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
                if (it->name == t.text)
                    return mk_var(it->id, t.text);
            auto [it, fresh] = free_->try_emplace(t.text, 0);
            if (fresh)
                it->second = fresh_var_id();
            return mk_var(it->second, t.text);
        }
        default:
            fail("expected an atom");
        }
    }
};

// Printing ------------------------------------------------------------------

class Printer {
public:
    Printer(const TermPtr& m, const AlgebraFamily& fam) : fam_(fam) {
        for (const auto& [id, name] : free_vars(m)) {
            std::string nm = name;
            while (used_.count(nm))
                nm += "'";
            used_.insert(nm);
            names_[id] = nm;
        }
    }

    void term(const TermPtr& m) {
        if (m->kind == TermKind::Abs) {
            std::string nm = m->name;
            while (used_.count(nm))
                nm += "'";
            out += "\\" + nm + ":" + to_string(*m->annotation, fam_) + ". ";
            auto saved = names_.find(m->var) != names_.end() ? std::optional<std::string>(names_[m->var]) : std::nullopt;
            names_[m->var] = nm;
            used_.insert(nm);
            term(m->body());
            used_.erase(nm);
            if (saved)
                names_[m->var] = *saved;
            else
                names_.erase(m->var);
            return;
        }
        app(m);
    }

    std::string out;

private:
    const AlgebraFamily& fam_;
    std::map<VarId, std::string> names_;
    std::multiset<std::string> used_;

    void app(const TermPtr& m) {
        switch (m->kind) {
        case TermKind::App:
            head(m->fun());
            out += ' ';
            atom(m->arg());
            return;
        case TermKind::Cond:
        case TermKind::Rec: {
            bool rec = m->kind == TermKind::Rec;
            head(m->scrutinee());
            out += rec ? " << " : " {{ ";
            bool first = true;
            for (const auto& b : m->branches()) {
                if (!first)
                    out += ", ";
                first = false;
                term(b);
            }
            out += rec ? " >>" : " }}";
            return;
        }
        default:
            atom(m);
        }
    }

    void head(const TermPtr& m) {
        if (m->kind == TermKind::Abs) {
            out += '(';
            term(m);
            out += ')';
        } else {
            app(m);
        }
    }

    void atom(const TermPtr& m) {
        switch (m->kind) {
        case TermKind::Var: {
            auto it = names_.find(m->var);
            out += it != names_.end() ? it->second : m->name;
            return;
        }
        case TermKind::Cons:
            out += fam_.constructor_name(m->cons);
            if (m->tier)
                out += "@" + std::to_string(*m->tier);
            return;
        default:
            out += '(';
            term(m);
            out += ')';
        }
    }
};

} // namespace

Program parse_program(std::string_view source, const ParseOptions& opts) {
    Program p;
    Parser ps(Lexer(source).run(), p.family, opts);
    ps.prelude();
    p.term = ps.whole_term();
    return p;
}

TermPtr parse_term(std::string_view source, const AlgebraFamily& fam, const ParseOptions& opts) {
    AlgebraFamily copy = fam;
    Parser ps(Lexer(source).run(), copy, opts);
    return ps.whole_term();
}

TypePtr parse_type(std::string_view source, const AlgebraFamily& fam) {
    AlgebraFamily copy = fam;
    ParseOptions opts;
    Parser ps(Lexer(source).run(), copy, opts);
    return ps.whole_type();
}

std::string print_term(const TermPtr& m, const AlgebraFamily& fam) {
    Printer p(m, fam);
    p.term(m);
    return p.out;
}

} // namespace linrec
