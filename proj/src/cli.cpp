#include "linrec/cli.hpp"

#include "linrec/graph.hpp"
#include "linrec/stdlib.hpp"
#include "linrec/syntax.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace linrec {

void apply_caps(AuditCaps& caps, const std::string& spec) {
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty())
            continue;
        auto eq = item.find('=');
        if (eq == std::string::npos)
            throw Error("cap '" + item + "' is not key=value");
        std::string key = item.substr(0, eq);
        std::size_t v = 0;
        try {
            std::size_t used = 0;
            v = std::stoull(item.substr(eq + 1), &used);
            if (used != item.size() - eq - 1)
                throw Error("");
        } catch (...) {
            throw Error("cap '" + key + "' needs a positive integer");
        }
        if (v == 0)
            throw Error("cap '" + key + "' must be positive");
        if (key == "max_trees")
            caps.trees.max_trees = v;
        else if (key == "max_label_size")
            caps.trees.max_label_size = v;
        else if (key == "max_stack_depth")
            caps.trees.max_stack_depth = v;
        else if (key == "max_states")
            caps.reducts.max_states = v;
        else if (key == "fuel")
            caps.fuel = caps.reducts.max_steps = v;
        else if (key == "bit_ceiling")
            caps.bit_ceiling = v;
        else
            throw Error("unknown cap '" + key + "'");
    }
}

namespace {

struct Input {
    AlgebraFamily fam;
    TermPtr term;
};

Input read_input(const std::string& term, const std::string& file) {
    std::string src = term;
    if (!file.empty()) {
        std::ifstream in(file);
        if (!in)
            throw Error("cannot read " + file);
        std::stringstream ss;
        ss << in.rdbuf();
        src = ss.str();
    }
    if (src.empty())
        throw Error("no input term (give TERM or --file)");
    auto p = parse_program(src, stdlib_options());
    return {std::move(p.family), std::move(p.term)};
}

// Decoded data when the normal form is a natural or a bit string.
std::string show_value(const TermPtr& n, const AlgebraFamily& fam) {
    if (auto t = to_algebraic(n, fam)) {
        if (t->algebra() == kU && t->size() <= 1'000'000)
            return std::to_string(decode_nat(*t));
        if (t->algebra() == kB)
            return "b\"" + decode_binstring(*t) + "\"";
    }
    return print_term(n, fam);
}

TermPtr literal_arg(const std::string& a) {
    if (a.size() >= 3 && a[0] == 'b' && a[1] == '"' && a.back() == '"')
        return from_algebraic(encode_binstring(a.substr(2, a.size() - 3)));
    std::size_t used = 0;
    unsigned long long n = 0;
    try {
        n = std::stoull(a, &used);
    } catch (...) {
        used = 0;
    }
    if (used == a.size() && !a.empty())
        return from_algebraic(encode_nat(n));
    return parse_term(a, AlgebraFamily::builtin(), stdlib_options());
}

std::vector<std::uint64_t> nat_args(const std::vector<std::string>& args) {
    std::vector<std::uint64_t> out;
    for (const auto& a : args) {
        std::size_t used = 0;
        try {
            out.push_back(std::stoull(a, &used));
        } catch (...) {
            used = 0;
        }
        if (used != a.size() || a.empty())
            throw Error("argument '" + a + "' is not a natural number");
    }
    return out;
}

void print_lemmas(const std::vector<LemmaReport>& ls, std::ostream& out) {
    for (const auto& l : ls) {
        out << "lemma " << l.name << ": " << (l.ok() ? "ok" : "FAIL") << " (" << l.checked << " trees)\n";
        for (const auto& v : l.violations)
            out << "  " << v << "\n";
    }
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"linrec: typing, evaluation and context semantics of linear recursive terms"};
    app.require_subcommand(1);

    std::string term, file, system = "H(A)", caps_flag;
    bool trace = false, dot = false, raw = false, print_only = false, check_meta = false;
    std::size_t fuel = kDefaultFuel;
    unsigned tier = 0;
    std::string name, expr;
    std::vector<std::string> rest;

    auto add_input = [&](CLI::App* c) {
        c->add_option("term", term, "Inline term");
        c->add_option("-f,--file", file, "Read the program from a file");
    };
    auto add_system = [&](CLI::App* c) {
        c->add_option("-s,--system", system, "H(A) H(W) H(0) RH(A) RH(W) RH(0)")->capture_default_str();
    };

    auto* parse = app.add_subcommand("parse", "Echo the canonical form");
    add_input(parse);
    auto* typecheck = app.add_subcommand("typecheck", "Type a closed term and summarize the derivation");
    add_input(typecheck);
    add_system(typecheck);
    auto* eval = app.add_subcommand("eval", "Normalize leftmost-outermost");
    add_input(eval);
    eval->add_flag("--trace", trace, "One line per step on stderr");
    eval->add_flag("--raw", raw, "Print the normal form as a term");
    eval->add_option("--fuel", fuel, "Step limit");
    auto* graph = app.add_subcommand("graph", "Interaction graph of the standard derivation");
    add_input(graph);
    add_system(graph);
    graph->add_flag("--dot", dot, "DOT output");
    auto* trees = app.add_subcommand("trees", "Saturate the context semantics and dump the trees");
    add_input(trees);
    add_system(trees);
    trees->add_option("--caps", caps_flag, "key=value,...");
    auto* auditc = app.add_subcommand("audit", "Measure and compare against the bounds; JSON report");
    add_input(auditc);
    add_system(auditc);
    auditc->add_option("--caps", caps_flag, "key=value,...");
    auto* stdlibc = app.add_subcommand("stdlib", "Build a library term and run it on arguments");
    stdlibc->add_option("name", name, "Builder name")->required();
    stdlibc->add_option("args", rest, "Arguments: naturals, b\"bits\" or terms");
    stdlibc->add_option("-i,--tier", tier, "Tier parameter");
    stdlibc->add_flag("--print", print_only, "Print the term instead of running it");
    stdlibc->add_flag("--raw", raw, "Print the normal form as a term");
    auto* primrec = app.add_subcommand("primrec", "Compile a primitive recursive function and run it");
    primrec->add_option("expr", expr, "zero | succ | proj(n,i) | comp(f,g..) | rec(f,g) | add | mul")->required();
    primrec->add_option("args", rest, "Natural-number arguments");
    primrec->add_flag("--print", print_only, "Print the compiled term");
    primrec->add_flag("--check", check_meta, "Compare with direct evaluation");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitDiagnostics;
    }

    try {
        AuditCaps caps;
        if (const char* env = std::getenv("LINREC_CAPS"))
            apply_caps(caps, env);
        if (!caps_flag.empty())
            apply_caps(caps, caps_flag);

        if (*parse) {
            auto in = read_input(term, file);
            out << print_term(in.term, in.fam) << "\n";
            return kExitOk;
        }
        if (*eval) {
            auto in = read_input(term, file);
            std::ostringstream tr;
            auto n = normalize(in.term, fuel, in.fam, trace ? &tr : nullptr);
            err << tr.str();
            out << (raw ? print_term(n.term, in.fam) : show_value(n.term, in.fam)) << "\n";
            return kExitOk;
        }
        if (*typecheck || *graph || *trees || *auditc) {
            auto in = read_input(term, file);
            auto sys = Subsystem::parse(system);
            if (*auditc) {
                auto r = audit(in.term, sys, caps, in.fam);
                out << to_json(r);
                switch (r.overall()) {
                case Verdict::Pass:
                    return kExitOk;
                case Verdict::Inconclusive:
                    return kExitInconclusive;
                case Verdict::Fail:
                    err << "error: a bound or lemma check failed\n";
                    return kExitInternal;
                }
            }
            auto d = synthesize({}, in.term, sys, in.fam);
            if (*typecheck) {
                out << derivation_summary(*d, in.fam);
                out << "system: " << sys.name() << "\n";
                return kExitOk;
            }
            auto g = build_graph(*d, in.fam);
            if (*graph) {
                out << (dot ? to_dot(g, in.fam) : dump_graph(g, in.fam));
                return kExitOk;
            }
            auto set = enumerate_trees(g, caps.trees, in.fam);
            out << set.dump_all(in.fam);
            print_lemmas(check_lemmas(g, set, *d, sys, in.fam), out);
            return set.exhaustive() ? kExitOk : kExitInconclusive;
        }
        if (*stdlibc) {
            auto m = build(name, tier);
            if (print_only) {
                out << print_term(m) << "\n";
                return kExitOk;
            }
            std::vector<TermPtr> as;
            for (const auto& a : rest)
                as.push_back(literal_arg(a));
            auto n = normalize(mk_apps(m, as), caps.fuel);
            out << (raw ? print_term(n.term) : show_value(n.term, AlgebraFamily::builtin())) << "\n";
            return kExitOk;
        }
        if (*primrec) {
            auto f = parse_primrec(expr);
            auto m = compile_primrec(*f);
            if (print_only) {
                out << print_term(m) << "\n";
                return kExitOk;
            }
            auto ns = nat_args(rest);
            if (ns.size() != f->arity())
                throw Error(to_string(*f) + " takes " + std::to_string(f->arity()) + " arguments");
            std::vector<TermPtr> as;
            for (auto n : ns)
                as.push_back(from_algebraic(encode_nat(n)));
            auto n = normalize(mk_apps(m, as), caps.fuel);
            std::string v = show_value(n.term, AlgebraFamily::builtin());
            out << v << "\n";
            if (check_meta) {
                auto want = eval_primrec(*f, ns);
                if (v != std::to_string(want)) {
                    err << "error: direct evaluation gives " << want << "\n";
                    return kExitInternal;
                }
            }
            return kExitOk;
        }
    } catch (const ParseError& e) {
        err << "error: parse: " << e.what() << "\n";
        return kExitDiagnostics;
    } catch (const TypeError& e) {
        const auto& d = e.diagnostic();
        err << "error: " << d.code << " at " << d.location << ": " << d.explanation << "\n";
        return kExitDiagnostics;
    } catch (const ResourceLimit& e) {
        err << "inconclusive: " << e.what() << "\n";
        return kExitInconclusive;
    } catch (const InvariantViolation& e) {
        err << "internal: " << e.what() << "\n";
        return kExitInternal;
    } catch (const DecompositionMismatch& e) {
        err << "internal: " << e.what() << "\n";
        return kExitInternal;
    } catch (const NonStandardDerivation& e) {
        err << "internal: " << e.what() << "\n";
        return kExitInternal;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitDiagnostics;
    }
    return kExitOk;
}

} // namespace linrec
