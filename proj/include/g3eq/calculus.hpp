#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "g3eq/syntax.hpp"

namespace g3eq {

enum class Logic { Minimal, Intuitionistic, Classical };

// Which replacement rules the checker accepts next to Ref.
//   Full    Repl (and its one-occurrence instance Repl1)
//   Minus   Repl- (and Repl1-)
//   One     Repl1- only
//   FullOne Repl1 only
//   Any     every replacement variant
enum class EqualityMode { Full, Minus, One, FullOne, Any };

struct CalculusConfig {
    Logic logic = Logic::Classical;
    EqualityMode equality = EqualityMode::Minus;

    friend bool operator==(const CalculusConfig &, const CalculusConfig &) = default;
};

std::string_view logic_name(Logic logic);          // m, i, c
std::string_view equality_mode_name(EqualityMode mode);  // full, minus, one, full1, any
std::optional<Logic> parse_logic(std::string_view text);
std::optional<EqualityMode> parse_equality_mode(std::string_view text);

// Antecedent and succedent are read as multisets; the lists fix an order so
// rule instances can address formulas by index.
struct Sequent {
    std::vector<Formula> antecedent;
    std::vector<Formula> succedent;

    std::string str() const;
};

bool multiset_equal(std::span<const Formula> a, std::span<const Formula> b);
bool sequent_equal(const Sequent &a, const Sequent &b);

// Maps each index of `expected` to a distinct index of `actual` holding an
// alpha-equal formula; nullopt when the lists are not multiset-equal.
std::optional<std::vector<std::size_t>> match_indices(std::span<const Formula> expected,
                                                      std::span<const Formula> actual);

enum class RuleTag {
    Axiom,
    LBottom,
    LAnd,
    RAnd,
    LOr,
    ROr,
    LImp,
    RImp,
    LForAll,
    RForAll,
    LExists,
    RExists,
    Ref,
    Repl,
    ReplMinus,
    Repl1,
    Repl1Minus,
};

std::string_view tag_name(RuleTag tag);
std::optional<RuleTag> parse_tag(std::string_view name);
bool is_replacement(RuleTag tag);
bool is_full_replacement(RuleTag tag);  // Repl, Repl1
bool principal_in_antecedent(RuleTag tag);
bool principal_in_succedent(RuleTag tag);
bool uses_witness(RuleTag tag);
bool uses_eigenvariable(RuleTag tag);
bool rule_enabled(RuleTag tag, const CalculusConfig &config);

// Flat parameter record; which fields are meaningful depends on the tag.
//   logical rules, LBottom   principal (side given by the tag)
//   LForAll, RExists         term = witness
//   RForAll, LExists         eigenvariable
//   Ref                      term = the t of t=t
//   replacement rules        eq_index, target_index, positions (antecedent)
struct RuleInstance {
    RuleTag tag = RuleTag::Axiom;
    std::size_t principal = 0;
    std::optional<Term> term;
    std::string eigenvariable;
    std::size_t eq_index = 0;
    std::size_t target_index = 0;
    std::vector<Position> positions;

    static RuleInstance axiom();
    static RuleInstance logical(RuleTag tag, std::size_t principal);
    static RuleInstance with_witness(RuleTag tag, std::size_t principal, Term witness);
    static RuleInstance with_eigenvariable(RuleTag tag, std::size_t principal, std::string eigen);
    static RuleInstance ref(Term t);
    static RuleInstance replacement(RuleTag tag, std::size_t eq_index, std::size_t target_index,
                                    std::vector<Position> positions);

    friend bool operator==(const RuleInstance &, const RuleInstance &) = default;
};

struct Derivation {
    Sequent conclusion;
    RuleInstance rule;
    std::vector<Derivation> premises;

    static Derivation axiom(Sequent s) { return {std::move(s), RuleInstance::axiom(), {}}; }
};

class RuleViolation : public Error {
public:
    using Error::Error;
};

// A premise the rule demands for a conclusion, with the conclusion index each
// antecedent entry was carried over from (nullopt for formulas the rule
// introduces).
struct PremiseShape {
    Sequent sequent;
    std::vector<std::optional<std::size_t>> antecedent_origin;
};

// Premises required by `rule` at `conclusion`. Throws RuleViolation when the
// instance does not apply (bad indices, wrong principal shape, eigenvariable
// clash, rule disabled, non-axiom leaf).
std::vector<PremiseShape> expected_premises(const Sequent &conclusion, const RuleInstance &rule,
                                            const CalculusConfig &config);

bool is_axiom(const Sequent &s);

// nullopt when the inference is correct, otherwise a description.
std::optional<std::string> check_step(const Sequent &conclusion, const RuleInstance &rule,
                                      std::span<const Sequent> premises, const CalculusConfig &config);

struct Violation {
    std::vector<std::size_t> path;  // premise indices from the root
    std::string message;

    std::string str() const;
};

// Checks every node; premises are visited before their conclusion so the
// deepest violation on the leftmost failing branch is reported.
std::optional<Violation> check_derivation(const Derivation &d, const CalculusConfig &config);

std::size_t height(const Derivation &d);
const Sequent &endsequent(const Derivation &d);
std::size_t count_nodes(const Derivation &d);
std::size_t count_inferences(const Derivation &d);  // nodes other than Axiom leaves
std::size_t count_tag(const Derivation &d, RuleTag tag);
std::size_t count_full_replacements(const Derivation &d);  // Repl + Repl1

// Same derivation whose root sequent lists its formulas in the order of
// `order` (multiset-equal to the current root); root indices are remapped.
Derivation with_root_order(Derivation d, const Sequent &order);

// Reorders the root antecedent so that new position i holds old entry
// order[i]; `order` must be a permutation. Root indices are remapped.
Derivation permute_antecedent(Derivation d, const std::vector<std::size_t> &order);

// Renames free occurrences of a variable throughout a derivation, including
// eigenvariable and term parameters. `to` must be fresh for the subtree.
Derivation rename_variable(const Derivation &d, const std::string &from, const std::string &to);

void collect_names(const Derivation &d, NameSet &out);

// Every replacement tag in `d` is enabled by the returned mode: `preferred`
// when it already suffices, else the narrowest mode that does.
EqualityMode required_mode(const Derivation &d, EqualityMode preferred);

}  // namespace g3eq
