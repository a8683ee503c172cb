#include "g3eq/syntax.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <sstream>
#include <utility>

namespace g3eq {

// ---------- Term ----------

struct Term::Node {
    Kind kind;
    std::string name;
    std::vector<Term> args;
};

Term Term::variable(std::string name) {
    return Term(std::make_shared<const Node>(Node{Kind::Variable, std::move(name), {}}));
}

Term Term::constant(std::string name) {
    return Term(std::make_shared<const Node>(Node{Kind::Constant, std::move(name), {}}));
}

Term Term::apply(std::string function, std::vector<Term> args) {
    if (args.empty()) {
        throw Error("function application '" + function + "' needs at least one argument");
    }
    return Term(std::make_shared<const Node>(Node{Kind::Apply, std::move(function), std::move(args)}));
}

Term::Kind Term::kind() const { return node_->kind; }
const std::string &Term::name() const { return node_->name; }
const std::vector<Term> &Term::args() const { return node_->args; }

std::size_t Term::size() const {
    std::size_t n = 1;
    for (const auto &a : args()) n += a.size();
    return n;
}

std::string Term::str() const {
    if (!is_apply()) return name();
    std::string out = "(" + name();
    for (const auto &a : args()) {
        out += ' ';
        out += a.str();
    }
    out += ')';
    return out;
}

bool operator==(const Term &a, const Term &b) {
    if (a.node_ == b.node_) return true;
    if (a.kind() != b.kind() || a.name() != b.name()) return false;
    const auto &xs = a.args();
    const auto &ys = b.args();
    return xs.size() == ys.size() && std::equal(xs.begin(), xs.end(), ys.begin());
}

// ---------- Formula ----------

struct Formula::Node {
    Kind kind;
    std::string name;  // predicate or bound variable
    std::vector<Term> terms;
    std::vector<Formula> children;
};

namespace {

const std::vector<Term> kNoTerms;

}  // namespace

Formula Formula::atom(std::string predicate, std::vector<Term> args) {
    return Formula(std::make_shared<const Node>(Node{Kind::Atom, std::move(predicate), std::move(args), {}}));
}

Formula Formula::equal(Term left, Term right) {
    return Formula(std::make_shared<const Node>(
        Node{Kind::Equal, "=", {std::move(left), std::move(right)}, {}}));
}

Formula Formula::bottom() {
    static const Formula bot(std::make_shared<const Node>(Node{Kind::Bottom, "bot", {}, {}}));
    return bot;
}

Formula Formula::conj(Formula a, Formula b) {
    return Formula(std::make_shared<const Node>(Node{Kind::And, {}, {}, {std::move(a), std::move(b)}}));
}

Formula Formula::disj(Formula a, Formula b) {
    return Formula(std::make_shared<const Node>(Node{Kind::Or, {}, {}, {std::move(a), std::move(b)}}));
}

Formula Formula::implies(Formula a, Formula b) {
    return Formula(std::make_shared<const Node>(Node{Kind::Implies, {}, {}, {std::move(a), std::move(b)}}));
}

Formula Formula::forall(std::string var, Formula body) {
    return Formula(std::make_shared<const Node>(Node{Kind::ForAll, std::move(var), {}, {std::move(body)}}));
}

Formula Formula::exists(std::string var, Formula body) {
    return Formula(std::make_shared<const Node>(Node{Kind::Exists, std::move(var), {}, {std::move(body)}}));
}

Formula::Kind Formula::kind() const { return node_->kind; }

bool Formula::is_atomic() const {
    return kind() == Kind::Atom || kind() == Kind::Equal || kind() == Kind::Bottom;
}

bool Formula::is_quantifier() const { return kind() == Kind::ForAll || kind() == Kind::Exists; }

bool Formula::is_binary() const {
    return kind() == Kind::And || kind() == Kind::Or || kind() == Kind::Implies;
}

const std::string &Formula::predicate() const { return node_->name; }
const std::vector<Term> &Formula::terms() const { return node_->terms; }
const Term &Formula::lhs() const { return node_->terms.at(0); }
const Term &Formula::rhs() const { return node_->terms.at(1); }
const Formula &Formula::left() const { return node_->children.at(0); }
const Formula &Formula::right() const { return node_->children.at(1); }
const std::string &Formula::bound_variable() const { return node_->name; }
const Formula &Formula::body() const { return node_->children.at(0); }

std::string Formula::str() const {
    switch (kind()) {
    case Kind::Bottom:
        return "bot";
    case Kind::Atom:
    case Kind::Equal: {
        std::string out = "(" + predicate();
        for (const auto &t : terms()) {
            out += ' ';
            out += t.str();
        }
        return out + ")";
    }
    case Kind::And:
        return "(and " + left().str() + " " + right().str() + ")";
    case Kind::Or:
        return "(or " + left().str() + " " + right().str() + ")";
    case Kind::Implies:
        return "(imp " + left().str() + " " + right().str() + ")";
    case Kind::ForAll:
        return "(all " + bound_variable() + " " + body().str() + ")";
    case Kind::Exists:
        return "(ex " + bound_variable() + " " + body().str() + ")";
    }
    return "?";
}

bool operator==(const Formula &a, const Formula &b) {
    if (a.node_ == b.node_) return true;
    if (a.kind() != b.kind() || a.node_->name != b.node_->name) return false;
    const auto &ts = a.terms();
    const auto &us = b.terms();
    if (ts.size() != us.size() || !std::equal(ts.begin(), ts.end(), us.begin())) return false;
    const auto &cs = a.node_->children;
    const auto &ds = b.node_->children;
    return cs.size() == ds.size() && std::equal(cs.begin(), cs.end(), ds.begin());
}

// ---------- Position ----------

bool Position::is_prefix_of(const Position &other) const {
    return path.size() <= other.path.size() && std::equal(path.begin(), path.end(), other.path.begin());
}

bool Position::is_strict_prefix_of(const Position &other) const {
    return path.size() < other.path.size() && is_prefix_of(other);
}

Position Position::concat(const Position &tail) const {
    Position out = *this;
    out.path.insert(out.path.end(), tail.path.begin(), tail.path.end());
    return out;
}

Position Position::strip(const Position &prefix) const {
    if (!prefix.is_prefix_of(*this)) throw PositionError("position " + prefix.str() + " is not a prefix of " + str());
    return Position(std::vector<std::size_t>(path.begin() + static_cast<std::ptrdiff_t>(prefix.path.size()), path.end()));
}

std::string Position::str() const {
    std::string out = "(";
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (i) out += ' ';
        out += std::to_string(path[i]);
    }
    return out + ")";
}

bool overlapping(const Position &a, const Position &b) { return a.is_prefix_of(b) || b.is_prefix_of(a); }

// ---------- free variables / names ----------

namespace {

void free_vars_into(const Term &t, NameSet &out) {
    if (t.is_variable()) {
        out.insert(t.name());
        return;
    }
    for (const auto &a : t.args()) free_vars_into(a, out);
}

void free_vars_into(const Formula &f, NameSet &out) {
    if (f.is_atomic()) {
        for (const auto &t : f.terms()) free_vars_into(t, out);
    } else if (f.is_binary()) {
        free_vars_into(f.left(), out);
        free_vars_into(f.right(), out);
    } else {
        NameSet inner;
        free_vars_into(f.body(), inner);
        inner.erase(f.bound_variable());
        out.insert(inner.begin(), inner.end());
    }
}

}  // namespace

NameSet free_variables(const Term &t) {
    NameSet out;
    free_vars_into(t, out);
    return out;
}

NameSet free_variables(const Formula &f) {
    NameSet out;
    free_vars_into(f, out);
    return out;
}

bool occurs_in(const Term &t, std::string_view var) {
    if (t.is_variable()) return t.name() == var;
    return std::any_of(t.args().begin(), t.args().end(), [&](const Term &a) { return occurs_in(a, var); });
}

bool occurs_free(const Formula &f, std::string_view var) {
    if (f.is_atomic()) {
        return std::any_of(f.terms().begin(), f.terms().end(), [&](const Term &t) { return occurs_in(t, var); });
    }
    if (f.is_binary()) return occurs_free(f.left(), var) || occurs_free(f.right(), var);
    return f.bound_variable() != var && occurs_free(f.body(), var);
}

void collect_names(const Term &t, NameSet &out) {
    out.insert(t.name());
    for (const auto &a : t.args()) collect_names(a, out);
}

void collect_names(const Formula &f, NameSet &out) {
    if (f.is_atomic()) {
        if (f.kind() == Formula::Kind::Atom) out.insert(f.predicate());
        for (const auto &t : f.terms()) collect_names(t, out);
    } else if (f.is_binary()) {
        collect_names(f.left(), out);
        collect_names(f.right(), out);
    } else {
        out.insert(f.bound_variable());
        collect_names(f.body(), out);
    }
}

// ---------- substitution ----------

Term substitute(const Term &t, const Substitution &sub) {
    if (sub.empty()) return t;
    switch (t.kind()) {
    case Term::Kind::Variable: {
        auto it = sub.find(t.name());
        return it == sub.end() ? t : it->second;
    }
    case Term::Kind::Constant:
        return t;
    case Term::Kind::Apply: {
        std::vector<Term> args;
        args.reserve(t.args().size());
        for (const auto &a : t.args()) args.push_back(substitute(a, sub));
        return Term::apply(t.name(), std::move(args));
    }
    }
    return t;
}

Formula substitute(const Formula &f, const Substitution &sub) {
    if (sub.empty()) return f;
    switch (f.kind()) {
    case Formula::Kind::Bottom:
        return f;
    case Formula::Kind::Atom: {
        std::vector<Term> args;
        for (const auto &t : f.terms()) args.push_back(substitute(t, sub));
        return Formula::atom(f.predicate(), std::move(args));
    }
    case Formula::Kind::Equal:
        return Formula::equal(substitute(f.lhs(), sub), substitute(f.rhs(), sub));
    case Formula::Kind::And:
        return Formula::conj(substitute(f.left(), sub), substitute(f.right(), sub));
    case Formula::Kind::Or:
        return Formula::disj(substitute(f.left(), sub), substitute(f.right(), sub));
    case Formula::Kind::Implies:
        return Formula::implies(substitute(f.left(), sub), substitute(f.right(), sub));
    case Formula::Kind::ForAll:
    case Formula::Kind::Exists: {
        const std::string &x = f.bound_variable();
        const NameSet body_free = free_variables(f.body());
        Substitution inner;
        for (const auto &[var, term] : sub) {
            if (var != x && body_free.count(var)) inner.emplace(var, term);
        }
        if (inner.empty()) return f;
        bool captures = false;
        for (const auto &[var, term] : inner) captures = captures || occurs_in(term, x);
        std::string bound = x;
        if (captures) {
            NameSet avoid = body_free;
            for (const auto &[var, term] : inner) {
                avoid.insert(var);
                free_vars_into(term, avoid);
            }
            bound = fresh_variable(avoid, x);
            inner.insert_or_assign(x, Term::variable(bound));
        }
        Formula body = substitute(f.body(), inner);
        return f.kind() == Formula::Kind::ForAll ? Formula::forall(bound, std::move(body))
                                                 : Formula::exists(bound, std::move(body));
    }
    }
    return f;
}

// ---------- positions ----------

namespace {

void term_occurrences(const Term &t, std::string_view var, Position &cur, std::vector<Position> &out) {
    if (t.is_variable()) {
        if (t.name() == var) out.push_back(cur);
        return;
    }
    for (std::size_t i = 0; i < t.args().size(); ++i) {
        cur.path.push_back(i);
        term_occurrences(t.args()[i], var, cur, out);
        cur.path.pop_back();
    }
}

void formula_occurrences(const Formula &f, std::string_view var, Position &cur, std::vector<Position> &out) {
    if (f.is_atomic()) {
        for (std::size_t i = 0; i < f.terms().size(); ++i) {
            cur.path.push_back(i);
            term_occurrences(f.terms()[i], var, cur, out);
            cur.path.pop_back();
        }
    } else if (f.is_binary()) {
        cur.path.push_back(0);
        formula_occurrences(f.left(), var, cur, out);
        cur.path.back() = 1;
        formula_occurrences(f.right(), var, cur, out);
        cur.path.pop_back();
    } else if (f.bound_variable() != var) {
        cur.path.push_back(0);
        formula_occurrences(f.body(), var, cur, out);
        cur.path.pop_back();
    }
}

void term_positions(const Term &host, const Term &t, Position &cur, std::vector<Position> &out) {
    if (host == t) {
        out.push_back(cur);
        return;
    }
    for (std::size_t i = 0; i < host.args().size(); ++i) {
        cur.path.push_back(i);
        term_positions(host.args()[i], t, cur, out);
        cur.path.pop_back();
    }
}

void formula_positions(const Formula &f, const Term &t, const NameSet &vars, Position &cur,
                       std::vector<Position> &out) {
    if (f.is_atomic()) {
        for (std::size_t i = 0; i < f.terms().size(); ++i) {
            cur.path.push_back(i);
            term_positions(f.terms()[i], t, cur, out);
            cur.path.pop_back();
        }
    } else if (f.is_binary()) {
        cur.path.push_back(0);
        formula_positions(f.left(), t, vars, cur, out);
        cur.path.back() = 1;
        formula_positions(f.right(), t, vars, cur, out);
        cur.path.pop_back();
    } else if (!vars.count(f.bound_variable())) {
        cur.path.push_back(0);
        formula_positions(f.body(), t, vars, cur, out);
        cur.path.pop_back();
    }
}

const Term &term_at(const Term &t, const std::vector<std::size_t> &path, std::size_t depth, const Position &whole) {
    if (depth == path.size()) return t;
    if (path[depth] >= t.args().size()) throw PositionError("position " + whole.str() + " does not resolve");
    return term_at(t.args()[path[depth]], path, depth + 1, whole);
}

const Term &formula_term_at(const Formula &f, const Position &pos, std::size_t depth) {
    const auto &path = pos.path;
    if (depth == path.size()) throw PositionError("position " + pos.str() + " ends at a formula, not a term");
    const std::size_t i = path[depth];
    if (f.is_atomic()) {
        if (i >= f.terms().size()) throw PositionError("position " + pos.str() + " does not resolve");
        return term_at(f.terms()[i], path, depth + 1, pos);
    }
    if (f.is_binary()) {
        if (i > 1) throw PositionError("position " + pos.str() + " does not resolve");
        return formula_term_at(i == 0 ? f.left() : f.right(), pos, depth + 1);
    }
    if (i != 0) throw PositionError("position " + pos.str() + " does not resolve");
    return formula_term_at(f.body(), pos, depth + 1);
}

Term replace_in_term(const Term &host, const std::vector<std::size_t> &path, std::size_t depth, const Term &t) {
    if (depth == path.size()) return t;
    std::vector<Term> args = host.args();
    args.at(path[depth]) = replace_in_term(host.args()[path[depth]], path, depth + 1, t);
    return Term::apply(host.name(), std::move(args));
}

Formula replace_in_formula(const Formula &f, const Position &pos, std::size_t depth, const Term &t) {
    const std::size_t i = pos.path[depth];
    switch (f.kind()) {
    case Formula::Kind::Atom: {
        std::vector<Term> args = f.terms();
        args[i] = replace_in_term(args[i], pos.path, depth + 1, t);
        return Formula::atom(f.predicate(), std::move(args));
    }
    case Formula::Kind::Equal: {
        Term l = i == 0 ? replace_in_term(f.lhs(), pos.path, depth + 1, t) : f.lhs();
        Term r = i == 1 ? replace_in_term(f.rhs(), pos.path, depth + 1, t) : f.rhs();
        return Formula::equal(std::move(l), std::move(r));
    }
    case Formula::Kind::And:
    case Formula::Kind::Or:
    case Formula::Kind::Implies: {
        Formula l = i == 0 ? replace_in_formula(f.left(), pos, depth + 1, t) : f.left();
        Formula r = i == 1 ? replace_in_formula(f.right(), pos, depth + 1, t) : f.right();
        if (f.kind() == Formula::Kind::And) return Formula::conj(std::move(l), std::move(r));
        if (f.kind() == Formula::Kind::Or) return Formula::disj(std::move(l), std::move(r));
        return Formula::implies(std::move(l), std::move(r));
    }
    case Formula::Kind::ForAll:
        return Formula::forall(f.bound_variable(), replace_in_formula(f.body(), pos, depth + 1, t));
    case Formula::Kind::Exists:
        return Formula::exists(f.bound_variable(), replace_in_formula(f.body(), pos, depth + 1, t));
    case Formula::Kind::Bottom:
        break;
    }
    throw PositionError("position " + pos.str() + " does not resolve");
}

}  // namespace

std::vector<Position> occurrences(const Formula &f, std::string_view var) {
    std::vector<Position> out;
    Position cur;
    formula_occurrences(f, var, cur, out);
    return out;
}

std::vector<Position> positions_of(const Formula &f, const Term &t) {
    std::vector<Position> out;
    Position cur;
    formula_positions(f, t, free_variables(t), cur, out);
    return out;
}

const Term &subterm_at(const Formula &f, const Position &pos) { return formula_term_at(f, pos, 0); }

const Term &subterm_at(const Term &t, const Position &pos) { return term_at(t, pos.path, 0, pos); }

Term replace_at(const Term &host, const Position &pos, const Term &t) {
    subterm_at(host, pos);
    return replace_in_term(host, pos.path, 0, t);
}

Formula replace_at(const Formula &f, std::span<const Position> positions, const Term &t) {
    for (std::size_t i = 0; i < positions.size(); ++i) {
        subterm_at(f, positions[i]);
        for (std::size_t j = i + 1; j < positions.size(); ++j) {
            if (overlapping(positions[i], positions[j])) {
                throw PositionError("positions " + positions[i].str() + " and " + positions[j].str() + " overlap");
            }
        }
    }
    Formula out = f;
    for (const auto &p : positions) out = replace_in_formula(out, p, 0, t);
    return out;
}

Formula abstract(const Formula &f, std::span<const Position> positions, const std::string &fresh) {
    NameSet names;
    collect_names(f, names);
    if (names.count(fresh)) throw PositionError("variable '" + fresh + "' already occurs in " + f.str());
    return replace_at(f, positions, Term::variable(fresh));
}

std::string fresh_variable(const NameSet &avoid, std::string_view base) {
    std::string stem(base);
    while (!stem.empty() && std::isdigit(static_cast<unsigned char>(stem.back()))) stem.pop_back();
    if (stem.empty()) stem = "v";
    for (std::size_t k = 1;; ++k) {
        std::string candidate = stem + std::to_string(k);
        if (!avoid.count(candidate)) return candidate;
    }
}

// ---------- alpha equivalence ----------

namespace {

using Scope = std::vector<std::pair<std::string, std::string>>;

bool alpha_terms(const Term &a, const Term &b, const Scope &scope) {
    if (a.kind() != b.kind()) return false;
    if (a.is_variable()) {
        for (auto it = scope.rbegin(); it != scope.rend(); ++it) {
            const bool left = it->first == a.name();
            const bool right = it->second == b.name();
            if (left || right) return left && right;
        }
        return a.name() == b.name();
    }
    if (a.name() != b.name() || a.args().size() != b.args().size()) return false;
    for (std::size_t i = 0; i < a.args().size(); ++i) {
        if (!alpha_terms(a.args()[i], b.args()[i], scope)) return false;
    }
    return true;
}

bool alpha_formulas(const Formula &a, const Formula &b, Scope &scope) {
    if (a.kind() != b.kind()) return false;
    if (a.is_atomic()) {
        if (a.predicate() != b.predicate() || a.terms().size() != b.terms().size()) return false;
        for (std::size_t i = 0; i < a.terms().size(); ++i) {
            if (!alpha_terms(a.terms()[i], b.terms()[i], scope)) return false;
        }
        return true;
    }
    if (a.is_binary()) return alpha_formulas(a.left(), b.left(), scope) && alpha_formulas(a.right(), b.right(), scope);
    scope.emplace_back(a.bound_variable(), b.bound_variable());
    const bool ok = alpha_formulas(a.body(), b.body(), scope);
    scope.pop_back();
    return ok;
}

}  // namespace

bool alpha_equal(const Formula &a, const Formula &b) {
    if (a == b) return true;
    Scope scope;
    return alpha_formulas(a, b, scope);
}

// ---------- signature ----------

bool Signature::declares(const std::string &name) const {
    return functions.count(name) || predicates.count(name) || constants.count(name);
}

NameSet Signature::names() const {
    NameSet out(constants.begin(), constants.end());
    for (const auto &[name, arity] : functions) out.insert(name);
    for (const auto &[name, arity] : predicates) out.insert(name);
    return out;
}

void Signature::validate(const Term &t) const {
    switch (t.kind()) {
    case Term::Kind::Variable:
        if (declares(t.name())) throw Error("'" + t.name() + "' is a declared symbol, not a variable");
        return;
    case Term::Kind::Constant:
        if (!constants.count(t.name())) throw Error("undeclared constant '" + t.name() + "'");
        return;
    case Term::Kind::Apply: {
        auto it = functions.find(t.name());
        if (it == functions.end()) throw Error("undeclared function symbol '" + t.name() + "'");
        if (it->second != t.args().size()) {
            throw Error("function '" + t.name() + "' expects " + std::to_string(it->second) + " arguments, got " +
                        std::to_string(t.args().size()));
        }
        for (const auto &a : t.args()) validate(a);
        return;
    }
    }
}

void Signature::validate(const Formula &f) const {
    switch (f.kind()) {
    case Formula::Kind::Bottom:
        return;
    case Formula::Kind::Atom: {
        auto it = predicates.find(f.predicate());
        if (it == predicates.end()) throw Error("undeclared predicate '" + f.predicate() + "'");
        if (it->second != f.terms().size()) {
            throw Error("predicate '" + f.predicate() + "' expects " + std::to_string(it->second) +
                        " arguments, got " + std::to_string(f.terms().size()));
        }
        for (const auto &t : f.terms()) validate(t);
        return;
    }
    case Formula::Kind::Equal:
        validate(f.lhs());
        validate(f.rhs());
        return;
    case Formula::Kind::And:
    case Formula::Kind::Or:
    case Formula::Kind::Implies:
        validate(f.left());
        validate(f.right());
        return;
    case Formula::Kind::ForAll:
    case Formula::Kind::Exists:
        if (declares(f.bound_variable())) {
            throw Error("'" + f.bound_variable() + "' is a declared symbol and cannot be bound");
        }
        validate(f.body());
        return;
    }
}

}  // namespace g3eq
