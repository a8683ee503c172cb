#pragma once

#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "g3eq/calculus.hpp"
#include "g3eq/document.hpp"
#include "g3eq/syntax.hpp"

namespace g3eq::testing {

inline std::string data_path(const std::string &rel) { return std::string(G3EQ_TEST_DATA) + "/" + rel; }

inline std::string read_text(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline Term var(const std::string &n) { return Term::variable(n); }
inline Term cst(const std::string &n) { return Term::constant(n); }
inline Term fn(const Term &t) { return Term::apply("f", {t}); }
inline Formula P(const Term &t) { return Formula::atom("P", {t}); }
inline Formula Q(const Term &a, const Term &b) { return Formula::atom("Q", {a, b}); }
inline Formula eq(const Term &a, const Term &b) { return Formula::equal(a, b); }

inline Signature small_signature() {
    Signature sig;
    sig.constants = {"c", "d"};
    sig.functions = {{"f", 1}};
    sig.predicates = {{"P", 1}, {"Q", 2}};
    return sig;
}

// Straightforward substitution of a closed term for the free occurrences of
// a variable; capture cannot arise because the term has no variables.
inline Term naive_substitute(const Term &t, const std::string &v, const Term &closed) {
    if (t.is_variable()) return t.name() == v ? closed : t;
    if (t.is_constant()) return t;
    std::vector<Term> args;
    for (const auto &a : t.args()) args.push_back(naive_substitute(a, v, closed));
    return Term::apply(t.name(), args);
}

inline Formula naive_substitute(const Formula &f, const std::string &v, const Term &closed) {
    using K = Formula::Kind;
    switch (f.kind()) {
    case K::Bottom:
        return f;
    case K::Equal:
        return Formula::equal(naive_substitute(f.lhs(), v, closed), naive_substitute(f.rhs(), v, closed));
    case K::Atom: {
        std::vector<Term> args;
        for (const auto &a : f.terms()) args.push_back(naive_substitute(a, v, closed));
        return Formula::atom(f.predicate(), args);
    }
    case K::And:
        return Formula::conj(naive_substitute(f.left(), v, closed), naive_substitute(f.right(), v, closed));
    case K::Or:
        return Formula::disj(naive_substitute(f.left(), v, closed), naive_substitute(f.right(), v, closed));
    case K::Implies:
        return Formula::implies(naive_substitute(f.left(), v, closed), naive_substitute(f.right(), v, closed));
    case K::ForAll:
    case K::Exists: {
        if (f.bound_variable() == v) return f;
        Formula body = naive_substitute(f.body(), v, closed);
        return f.kind() == K::ForAll ? Formula::forall(f.bound_variable(), body)
                                     : Formula::exists(f.bound_variable(), body);
    }
    }
    return f;
}

inline std::size_t naive_free_count(const Term &t, const std::string &v) {
    if (t.is_variable()) return t.name() == v ? 1 : 0;
    std::size_t n = 0;
    for (const auto &a : t.args()) n += naive_free_count(a, v);
    return n;
}

inline std::size_t naive_free_count(const Formula &f, const std::string &v) {
    if (f.is_atomic()) {
        std::size_t n = 0;
        for (const auto &t : f.terms()) n += naive_free_count(t, v);
        return n;
    }
    if (f.is_binary()) return naive_free_count(f.left(), v) + naive_free_count(f.right(), v);
    return f.bound_variable() == v ? 0 : naive_free_count(f.body(), v);
}

// Terms c, v, x and their images under f.
inline std::vector<Term> small_terms() {
    std::vector<Term> base{cst("c"), var("v"), var("x")};
    std::vector<Term> out = base;
    for (const auto &t : base) out.push_back(fn(t));
    return out;
}

// Every atomic formula over small_terms().
inline std::vector<Formula> all_atoms() {
    const auto ts = small_terms();
    std::vector<Formula> out{Formula::bottom()};
    for (const auto &a : ts) out.push_back(P(a));
    for (const auto &a : ts) {
        for (const auto &b : ts) {
            out.push_back(Q(a, b));
            out.push_back(eq(a, b));
        }
    }
    return out;
}

// One connective or quantifier layer over `sub`, quantifying over v or x.
inline std::vector<Formula> one_layer(const std::vector<Formula> &sub) {
    std::vector<Formula> out;
    for (const auto &a : sub) {
        for (const auto &b : sub) {
            out.push_back(Formula::conj(a, b));
            out.push_back(Formula::disj(a, b));
            out.push_back(Formula::implies(a, b));
        }
    }
    for (const auto &a : sub) {
        for (const char *x : {"v", "x"}) {
            out.push_back(Formula::forall(x, a));
            out.push_back(Formula::exists(x, a));
        }
    }
    return out;
}

// All formulas of connective depth <= 1 over every atom, plus all formulas of
// depth exactly 2 whose leaves come from a fixed set of six atoms covering
// nested, repeated, bound-capable and v-free occurrences.
inline std::vector<Formula> enumerate_formulas_depth2() {
    const auto atoms = all_atoms();
    std::vector<Formula> out = atoms;
    const auto depth1 = one_layer(atoms);
    out.insert(out.end(), depth1.begin(), depth1.end());
    const Term v = var("v");
    const Term x = var("x");
    std::vector<Formula> leaves{P(v), P(fn(v)), eq(v, x), Q(v, fn(v)), P(cst("c")), Formula::bottom()};
    std::vector<Formula> mid = leaves;
    const auto layer = one_layer(leaves);
    mid.insert(mid.end(), layer.begin(), layer.end());
    const auto depth2 = one_layer(mid);
    out.insert(out.end(), depth2.begin(), depth2.end());
    return out;
}

// Checks, for every free occurrence of v in `a` split off as a fresh v',
//   (A'[v/t])[v'/t] == A[v/t]                 for each t
//   (A'[v/r])[v'/s] == (A'[v'/s])[v/r]        for each pair r, s
// up to alpha-equivalence. Returns the number of failures.
inline std::size_t commutation_failures(const Formula &a, const std::vector<Term> &terms,
                                        std::string *first_failure = nullptr) {
    std::size_t fails = 0;
    const auto occ = occurrences(a, "v");
    NameSet names;
    collect_names(a, names);
    for (const auto &t : terms) collect_names(t, names);
    names.insert("v");
    const std::string v2 = fresh_variable(names, "w");
    auto fail = [&](const std::string &what) {
        if (fails++ == 0 && first_failure) *first_failure = what + " in " + a.str();
    };
    for (std::size_t k = 0; k < occ.size(); ++k) {
        const Formula split = abstract(a, std::span(occ).subspan(k, 1), v2);
        for (const auto &t : terms) {
            const Formula lhs = substitute(substitute(split, {{"v", t}}), {{v2, t}});
            if (!alpha_equal(lhs, substitute(a, {{"v", t}}))) fail("recombination with " + t.str());
        }
        for (const auto &r : terms) {
            for (const auto &s : terms) {
                const Formula one = substitute(substitute(split, {{"v", r}}), {{v2, s}});
                const Formula two = substitute(substitute(split, {{v2, s}}), {{"v", r}});
                if (!alpha_equal(one, two)) fail("commutation r=" + r.str() + " s=" + s.str());
            }
        }
    }
    return fails;
}

// Witness terms for the identity; none contains v.
inline std::vector<Term> commutation_terms() { return {cst("c"), var("x"), fn(var("x")), fn(cst("d"))}; }

// All term positions of an atomic formula, including nested ones.
inline void term_positions(const Term &t, Position at, std::vector<Position> &out) {
    out.push_back(at);
    for (std::size_t i = 0; i < t.args().size(); ++i) {
        Position next = at;
        next.path.push_back(i);
        term_positions(t.args()[i], next, out);
    }
}

inline std::vector<Position> atomic_positions(const Formula &f) {
    std::vector<Position> out;
    if (!f.is_atomic()) return out;
    for (std::size_t i = 0; i < f.terms().size(); ++i) term_positions(f.terms()[i], Position{i}, out);
    return out;
}

struct Mutation {
    std::string description;
    Derivation derivation;
};

// Every derivation obtained by changing exactly one rule parameter of one
// node: indices to every other value including one past the end, positions to
// every other position of the target plus one past its arity, term and
// eigenvariable parameters to other candidates.
inline std::vector<Mutation> single_parameter_mutations(const Derivation &root) {
    std::vector<Mutation> out;
    const std::vector<Term> terms{cst("c"), cst("d"), fn(cst("c")), fn(cst("d")), var("x")};
    const std::vector<std::string> eigens{"x", "y", "w"};
    std::function<void(const Derivation &, std::vector<std::size_t>)> visit = [&](const Derivation &d,
                                                                                   std::vector<std::size_t> path) {
        auto rebuild = [&](RuleInstance changed) {
            std::function<Derivation(const Derivation &, std::size_t)> go = [&](const Derivation &n, std::size_t k) {
                if (k == path.size()) return Derivation{n.conclusion, changed, n.premises};
                Derivation copy = n;
                copy.premises[path[k]] = go(n.premises[path[k]], k + 1);
                return copy;
            };
            return go(root, 0);
        };
        std::string where = "node";
        for (auto i : path) where += "." + std::to_string(i);
        where += " " + std::string(tag_name(d.rule.tag));
        const RuleInstance &r = d.rule;
        const std::size_t n_ant = d.conclusion.antecedent.size();
        const std::size_t n_suc = d.conclusion.succedent.size();
        if (r.tag != RuleTag::Axiom && r.tag != RuleTag::Ref && !is_replacement(r.tag)) {
            const std::size_t n = principal_in_antecedent(r.tag) ? n_ant : n_suc;
            for (std::size_t k = 0; k <= n; ++k) {
                if (k == r.principal) continue;
                RuleInstance m = r;
                m.principal = k;
                out.push_back({where + " principal=" + std::to_string(k), rebuild(m)});
            }
        }
        if (r.term) {
            for (const auto &t : terms) {
                if (t == *r.term) continue;
                RuleInstance m = r;
                m.term = t;
                out.push_back({where + " term=" + t.str(), rebuild(m)});
            }
        }
        if (uses_eigenvariable(r.tag)) {
            for (const auto &e : eigens) {
                if (e == r.eigenvariable) continue;
                RuleInstance m = r;
                m.eigenvariable = e;
                out.push_back({where + " eigen=" + e, rebuild(m)});
            }
        }
        if (is_replacement(r.tag)) {
            for (std::size_t k = 0; k <= n_ant; ++k) {
                if (k != r.eq_index) {
                    RuleInstance m = r;
                    m.eq_index = k;
                    out.push_back({where + " eq=" + std::to_string(k), rebuild(m)});
                }
                if (k != r.target_index) {
                    RuleInstance m = r;
                    m.target_index = k;
                    out.push_back({where + " target=" + std::to_string(k), rebuild(m)});
                }
            }
            const Formula &target = d.conclusion.antecedent[r.target_index];
            std::vector<Position> alternatives = atomic_positions(target);
            alternatives.push_back(Position{target.terms().size()});
            for (std::size_t i = 0; i < r.positions.size(); ++i) {
                for (const auto &p : alternatives) {
                    if (p == r.positions[i]) continue;
                    RuleInstance m = r;
                    m.positions[i] = p;
                    out.push_back({where + " pos[" + std::to_string(i) + "]=" + p.str(), rebuild(m)});
                }
            }
        }
        for (std::size_t i = 0; i < d.premises.size(); ++i) {
            auto next = path;
            next.push_back(i);
            visit(d.premises[i], next);
        }
    };
    visit(root, {});
    return out;
}

}  // namespace g3eq::testing
