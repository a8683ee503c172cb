#include "g3eq/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <unistd.h>

#include "g3eq/document.hpp"
#include "g3eq/elimination.hpp"
#include "g3eq/search.hpp"
#include "g3eq/transforms.hpp"

namespace g3eq {

namespace {

constexpr int exit_ok = 0;
constexpr int exit_failure = 1;
constexpr int exit_input = 2;

// Parse and I/O problems, mapped to exit status 2.
class InputError : public Error {
public:
    using Error::Error;
};

std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_atomically(const std::string &path, const std::string &text) {
    const std::filesystem::path target(path);
    std::filesystem::path tmp = target;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw InputError("cannot write " + tmp.string());
        out << text;
        out.flush();
        if (!out) throw InputError("cannot write " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, target, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw InputError("cannot write " + path + ": " + ec.message());
    }
}

ProofDocument load(const std::string &path) { return parse_document(read_file(path)); }

Logic logic_option(const std::string &text) {
    auto l = parse_logic(text);
    if (!l) throw InputError("unknown logic '" + text + "' (expected m, i or c)");
    return *l;
}

EqualityMode mode_option(const std::string &text) {
    auto m = parse_equality_mode(text);
    if (!m) throw InputError("unknown equality mode '" + text + "' (expected full, minus, one, full1 or any)");
    return *m;
}

bool covers(EqualityMode wide, EqualityMode narrow) {
    for (RuleTag t : {RuleTag::Repl, RuleTag::Repl1, RuleTag::ReplMinus, RuleTag::Repl1Minus}) {
        if (rule_enabled(t, {Logic::Classical, narrow}) && !rule_enabled(t, {Logic::Classical, wide})) return false;
    }
    return true;
}

// Narrowest single mode under which every derivation of the document checks.
EqualityMode document_mode(const std::vector<NamedDerivation> &ds, EqualityMode preferred) {
    std::optional<EqualityMode> mode;
    for (const auto &nd : ds) {
        const EqualityMode m = required_mode(nd.derivation, preferred);
        if (!mode || covers(m, *mode)) {
            mode = m;
        } else if (!covers(*mode, m)) {
            mode = EqualityMode::Any;
        }
    }
    return mode.value_or(preferred);
}

std::size_t replacement_count(const Derivation &d, bool full) {
    return full ? count_tag(d, RuleTag::Repl) + count_tag(d, RuleTag::Repl1)
                : count_tag(d, RuleTag::ReplMinus) + count_tag(d, RuleTag::Repl1Minus);
}

std::string stats_line(const std::string &name, const Derivation &before, const Derivation &after) {
    std::ostringstream s;
    s << "name=" << name << " nodes_before=" << count_nodes(before) << " nodes_after=" << count_nodes(after)
      << " height_before=" << height(before) << " height_after=" << height(after)
      << " repl_before=" << replacement_count(before, true) << " repl_after=" << replacement_count(after, true)
      << " repl_minus_before=" << replacement_count(before, false)
      << " repl_minus_after=" << replacement_count(after, false);
    return s.str();
}

// Re-checks a document before it leaves the tool; returns the first problem.
std::optional<std::string> self_check(const ProofDocument &doc) {
    for (const auto &nd : doc.derivations) {
        if (auto v = check_derivation(nd.derivation, doc.config)) return nd.name + ": " + v->str();
    }
    return std::nullopt;
}

int emit(const ProofDocument &doc, const std::string &out_path, std::ostream &out, std::ostream &err) {
    if (auto problem = self_check(doc)) {
        err << "error: output does not check: " << *problem << "\n";
        return exit_failure;
    }
    const std::string text = print_document(doc);
    if (out_path.empty() || out_path == "-") {
        out << text;
    } else {
        write_atomically(out_path, text);
    }
    return exit_ok;
}

std::optional<std::size_t> first_equality(const Sequent &s) {
    for (std::size_t i = 0; i < s.antecedent.size(); ++i) {
        if (s.antecedent[i].is_equality()) return i;
    }
    return std::nullopt;
}

std::optional<Formula> first_duplicate_equality(const Sequent &s) {
    const auto &ant = s.antecedent;
    for (std::size_t i = 0; i < ant.size(); ++i) {
        if (!ant[i].is_equality()) continue;
        for (std::size_t j = i + 1; j < ant.size(); ++j) {
            if (alpha_equal(ant[i], ant[j])) return ant[i];
        }
    }
    return std::nullopt;
}

struct CheckArgs {
    std::string file;
    std::string logic;
    std::string eq;
};

int cmd_check(const CheckArgs &a, std::ostream &out) {
    ProofDocument doc = load(a.file);
    if (!a.logic.empty()) doc.config.logic = logic_option(a.logic);
    if (!a.eq.empty()) doc.config.equality = mode_option(a.eq);
    std::size_t bad = 0;
    for (const auto &nd : doc.derivations) {
        if (auto v = check_derivation(nd.derivation, doc.config)) {
            ++bad;
            out << nd.name << ": violation " << v->str() << "\n";
        } else {
            out << nd.name << ": ok\n";
        }
    }
    out << doc.derivations.size() << " derivations, " << bad << " failed\n";
    return bad == 0 ? exit_ok : exit_failure;
}

struct TransformArgs {
    std::string file;
    std::string pass;
    std::string out;
    bool bundle = false;
};

int cmd_transform(const TransformArgs &a, std::ostream &out, std::ostream &err) {
    ProofDocument doc = load(a.file);
    if (auto problem = self_check(doc)) {
        err << "error: input does not check: " << *problem << "\n";
        return exit_failure;
    }
    const Logic logic = doc.config.logic;
    NameSet reserved = doc.signature.names();
    EqualityMode preferred = doc.config.equality;
    if (a.pass == "repl-elim") {
        preferred = EqualityMode::Minus;
    } else if (a.pass == "to-full") {
        preferred = EqualityMode::Full;
    }
    ProofDocument result = doc;
    std::vector<std::string> stats;
    for (auto &nd : result.derivations) {
        const Derivation &in = nd.derivation;
        Derivation d;
        try {
            if (a.pass == "repl-elim") {
                d = eliminate_all_repl(in, logic, reserved);
            } else if (a.pass == "to-full") {
                d = translate_minus_to_full(in, reserved);
            } else if (a.pass == "symm") {
                auto i = first_equality(in.conclusion);
                if (!i) throw TransformError("endsequent has no antecedent equality");
                d = derive_symm(in, *i, reserved);
            } else if (a.pass == "contr-eq") {
                auto eq = first_duplicate_equality(in.conclusion);
                if (!eq) throw TransformError("endsequent has no duplicated antecedent equality");
                d = derive_contr_eq(in, *eq);
            } else {
                d = expand_replacements(in, reserved);
            }
            if (a.bundle) d = bundle_replacements(d, logic);
        } catch (const TransformError &e) {
            err << "error: " << nd.name << ": " << e.what() << "\n";
            return exit_failure;
        }
        stats.push_back(stats_line(nd.name, in, d));
        nd.derivation = std::move(d);
    }
    result.config.equality = document_mode(result.derivations, preferred);
    // Stats go to stdout unless stdout carries the document.
    std::ostream &report = a.out.empty() || a.out == "-" ? err : out;
    const int status = emit(result, a.out, out, err);
    if (status == exit_ok) {
        for (const auto &line : stats) report << line << "\n";
    }
    return status;
}

struct ProveArgs {
    std::string file;
    std::string goal;
    std::string logic = "c";
    std::string mode = "minus";
    std::size_t depth = 6;
    std::size_t max_repl = 3;
    std::size_t max_nodes = 5'000'000;
    std::string out;
};

int cmd_prove(const ProveArgs &a, std::ostream &out, std::ostream &err) {
    ProofDocument doc;
    if (!a.file.empty()) {
        doc = load(a.file);
    } else {
        doc.signature = default_signature();
    }
    doc.config = {logic_option(a.logic), mode_option(a.mode)};
    std::vector<Goal> goals = doc.goals;
    if (!a.goal.empty()) goals.push_back({"goal", parse_sequent(a.goal, doc.signature)});
    if (goals.empty()) throw InputError("no goals given");
    SearchBudget budget;
    budget.max_depth = a.depth;
    budget.max_repl_per_branch = a.max_repl;
    budget.max_nodes = a.max_nodes;
    ProofDocument result{doc.signature, doc.config, {}, {}};
    std::size_t missing = 0;
    std::ostream &report = a.out.empty() || a.out == "-" ? err : out;
    for (const auto &g : goals) {
        SearchResult r = bounded_prove(g.sequent, doc.config, budget);
        report << g.name << ": " << outcome_name(r.outcome) << " depth=" << r.depth << " nodes=" << r.nodes;
        if (r.found()) {
            report << " proof_nodes=" << count_nodes(*r.derivation) << " inferences=" << count_inferences(*r.derivation)
                   << "\n";
            result.derivations.push_back({g.name, std::move(*r.derivation)});
        } else {
            ++missing;
            report << (r.outcome == SearchOutcome::NodeLimit ? " (node budget exhausted)"
                                                              : " (no proof within the depth bound)")
                   << "\n";
            result.goals.push_back(g);
        }
    }
    const int status = emit(result, a.out, out, err);
    if (status != exit_ok) return status;
    return missing == 0 ? exit_ok : exit_failure;
}

struct GenArgs {
    std::uint64_t seed = 0;
    std::size_t height = 3;
    double density = 0.3;
    std::size_t count = 1;
    std::string logic = "c";
    std::string eq = "full";
    std::string out;
};

int cmd_gen(GenArgs a, std::ostream &out, std::ostream &err) {
    if (const char *env = std::getenv("G3EQ_SEED"); env && *env) {
        try {
            a.seed = std::stoull(env);
        } catch (const std::exception &) {
            throw InputError(std::string("G3EQ_SEED is not a number: ") + env);
        }
    }
    ProofDocument doc{default_signature(), {logic_option(a.logic), mode_option(a.eq)}, {}, {}};
    for (std::size_t i = 0; i < a.count; ++i) {
        GenSpec spec;
        spec.seed = a.seed + i;
        spec.signature = doc.signature;
        spec.target_height = a.height;
        spec.repl_density = a.density;
        spec.config = doc.config;
        try {
            doc.derivations.push_back({"gen_" + std::to_string(spec.seed), generate_derivation(spec)});
        } catch (const GenerationError &e) {
            err << "error: " << e.what() << "\n";
            return exit_failure;
        }
    }
    return emit(doc, a.out, out, err);
}

}  // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    CLI::App app{"Checker, transformer and bounded prover for G3 sequent calculi with equality", "g3eq"};
    app.require_subcommand(1);

    CheckArgs check;
    auto *c = app.add_subcommand("check", "check every derivation of a proof document");
    c->add_option("file", check.file, "proof document")->required();
    c->add_option("--logic", check.logic, "override logic: m, i or c");
    c->add_option("--eq", check.eq, "override equality mode: full, minus, one, full1 or any");

    TransformArgs transform;
    auto *t = app.add_subcommand("transform", "apply a proof transformation to every derivation");
    t->add_option("file", transform.file, "proof document")->required();
    t->add_option("--pass", transform.pass, "transformation")
        ->required()
        ->check(CLI::IsMember({"repl-elim", "to-full", "symm", "contr-eq", "expand"}));
    t->add_option("--out", transform.out, "output file (default stdout)");
    t->add_flag("--bundle", transform.bundle, "merge stacked single-position Repl- nodes afterwards");

    ProveArgs prove;
    auto *p = app.add_subcommand("prove", "bounded proof search for goals");
    p->add_option("file", prove.file, "document whose goals are searched");
    p->add_option("--goal", prove.goal, "goal sequent literal, e.g. \"(seq ((= c d) (P c)) ((P d)))\"");
    p->add_option("--depth", prove.depth, "maximum proof height")->check(CLI::PositiveNumber);
    p->add_option("--mode", prove.mode, "equality mode");
    p->add_option("--logic", prove.logic, "logic: m, i or c");
    p->add_option("--max-repl", prove.max_repl, "Ref and replacement steps per branch");
    p->add_option("--max-nodes", prove.max_nodes, "visited sequent limit, 0 for none");
    p->add_option("--out", prove.out, "output file (default stdout)");

    GenArgs gen;
    auto *g = app.add_subcommand("gen", "generate random derivations");
    g->add_option("--seed", gen.seed, "first seed; G3EQ_SEED overrides");
    g->add_option("--height", gen.height, "derivation height");
    g->add_option("--density", gen.density, "probability of a replacement inference")->check(CLI::Range(0.0, 1.0));
    g->add_option("--count", gen.count, "number of derivations");
    g->add_option("--logic", gen.logic, "logic: m, i or c");
    g->add_option("--eq", gen.eq, "equality mode");
    g->add_option("--out", gen.out, "output file (default stdout)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_input;
    }

    try {
        if (c->parsed()) return cmd_check(check, out);
        if (t->parsed()) return cmd_transform(transform, out, err);
        if (p->parsed()) return cmd_prove(prove, out, err);
        return cmd_gen(gen, out, err);
    } catch (const ParseError &e) {
        err << "error: parse: " << e.what() << "\n";
        return exit_input;
    } catch (const InputError &e) {
        err << "error: " << e.what() << "\n";
        return exit_input;
    } catch (const Error &e) {
        err << "error: " << e.what() << "\n";
        return exit_failure;
    }
}

}  // namespace g3eq
