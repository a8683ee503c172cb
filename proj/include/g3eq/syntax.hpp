#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace g3eq {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Raised by position-based operations (unresolvable or overlapping positions,
// fresh-name clashes).
class PositionError : public Error {
public:
    using Error::Error;
};

using NameSet = std::set<std::string>;

// First-order term. Immutable; copies share structure.
class Term {
public:
    enum class Kind { Variable, Constant, Apply };

    static Term variable(std::string name);
    static Term constant(std::string name);
    static Term apply(std::string function, std::vector<Term> args);

    Kind kind() const;
    bool is_variable() const { return kind() == Kind::Variable; }
    bool is_constant() const { return kind() == Kind::Constant; }
    bool is_apply() const { return kind() == Kind::Apply; }

    // Variable name, constant name or function symbol.
    const std::string &name() const;
    const std::vector<Term> &args() const;

    std::size_t size() const;
    std::string str() const;

    friend bool operator==(const Term &a, const Term &b);

private:
    struct Node;
    explicit Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    std::shared_ptr<const Node> node_;
};

class Formula {
public:
    enum class Kind { Atom, Equal, Bottom, And, Or, Implies, ForAll, Exists };

    static Formula atom(std::string predicate, std::vector<Term> args);
    static Formula equal(Term left, Term right);
    static Formula bottom();
    static Formula conj(Formula a, Formula b);
    static Formula disj(Formula a, Formula b);
    static Formula implies(Formula a, Formula b);
    static Formula forall(std::string var, Formula body);
    static Formula exists(std::string var, Formula body);

    Kind kind() const;
    bool is_atomic() const;    // Atom, Equal or Bottom
    bool is_equality() const { return kind() == Kind::Equal; }
    bool is_quantifier() const;
    bool is_binary() const;

    const std::string &predicate() const;
    // Atom arguments, or {lhs, rhs} for an equality; empty otherwise.
    const std::vector<Term> &terms() const;
    const Term &lhs() const;
    const Term &rhs() const;
    const Formula &left() const;
    const Formula &right() const;
    const std::string &bound_variable() const;
    const Formula &body() const;

    std::string str() const;

    friend bool operator==(const Formula &a, const Formula &b);

private:
    struct Node;
    explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    std::shared_ptr<const Node> node_;
};

// Path to a term occurrence. Indices descend through connective children
// (0/1 for binary connectives, 0 for a quantifier body), then into the
// argument list of an atomic formula, then through Apply arguments.
struct Position {
    std::vector<std::size_t> path;

    Position() = default;
    Position(std::initializer_list<std::size_t> p) : path(p) {}
    explicit Position(std::vector<std::size_t> p) : path(std::move(p)) {}

    bool is_prefix_of(const Position &other) const;
    bool is_strict_prefix_of(const Position &other) const;
    Position concat(const Position &tail) const;
    // Suffix of `this` after `prefix`; prefix must be a prefix.
    Position strip(const Position &prefix) const;
    std::string str() const;

    friend auto operator<=>(const Position &, const Position &) = default;
    friend bool operator==(const Position &, const Position &) = default;
};

bool overlapping(const Position &a, const Position &b);

// Simultaneous binding of variables to terms.
using Substitution = std::map<std::string, Term>;

Term substitute(const Term &t, const Substitution &sub);
// Capture-avoiding: quantified variables shadow bindings and are renamed on
// demand when a binding would be captured.
Formula substitute(const Formula &f, const Substitution &sub);

std::vector<Position> occurrences(const Formula &f, std::string_view var);
// Occurrences of an arbitrary term, left to right, skipping those where a
// quantifier binds one of its variables.
std::vector<Position> positions_of(const Formula &f, const Term &t);
const Term &subterm_at(const Formula &f, const Position &pos);
const Term &subterm_at(const Term &t, const Position &pos);
Formula replace_at(const Formula &f, std::span<const Position> positions, const Term &t);
Term replace_at(const Term &host, const Position &pos, const Term &t);
Formula abstract(const Formula &f, std::span<const Position> positions, const std::string &fresh);

// Base name with its trailing digits removed, followed by the smallest
// positive suffix not in `avoid`.
std::string fresh_variable(const NameSet &avoid, std::string_view base = "v");

NameSet free_variables(const Term &t);
NameSet free_variables(const Formula &f);
bool occurs_free(const Formula &f, std::string_view var);
bool occurs_in(const Term &t, std::string_view var);
// Every identifier in the formula: variables (free and bound), constants,
// function and predicate symbols.
void collect_names(const Formula &f, NameSet &out);
void collect_names(const Term &t, NameSet &out);

// Equality up to renaming of bound variables.
bool alpha_equal(const Formula &a, const Formula &b);

// Declared symbols. Everything else that appears in term position is a
// variable.
struct Signature {
    std::map<std::string, std::size_t> functions;
    std::map<std::string, std::size_t> predicates;
    std::set<std::string> constants;

    bool declares(const std::string &name) const;
    NameSet names() const;
    // Throws Error naming the first undeclared symbol or arity mismatch.
    void validate(const Term &t) const;
    void validate(const Formula &f) const;
};

}  // namespace g3eq
