#include "g3eq/calculus.hpp"

#include <algorithm>
#include <array>
#include <utility>

namespace g3eq {

namespace {

struct TagInfo {
    RuleTag tag;
    std::string_view name;
};

constexpr std::array<TagInfo, 17> kTags{{
    {RuleTag::Axiom, "axiom"},
    {RuleTag::LBottom, "lbot"},
    {RuleTag::LAnd, "land"},
    {RuleTag::RAnd, "rand"},
    {RuleTag::LOr, "lor"},
    {RuleTag::ROr, "ror"},
    {RuleTag::LImp, "limp"},
    {RuleTag::RImp, "rimp"},
    {RuleTag::LForAll, "lall"},
    {RuleTag::RForAll, "rall"},
    {RuleTag::LExists, "lex"},
    {RuleTag::RExists, "rex"},
    {RuleTag::Ref, "ref"},
    {RuleTag::Repl, "repl"},
    {RuleTag::ReplMinus, "repl-"},
    {RuleTag::Repl1, "repl1"},
    {RuleTag::Repl1Minus, "repl1-"},
}};

}  // namespace

std::string_view logic_name(Logic logic) {
    switch (logic) {
    case Logic::Minimal:
        return "m";
    case Logic::Intuitionistic:
        return "i";
    case Logic::Classical:
        return "c";
    }
    return "?";
}

std::string_view equality_mode_name(EqualityMode mode) {
    switch (mode) {
    case EqualityMode::Full:
        return "full";
    case EqualityMode::Minus:
        return "minus";
    case EqualityMode::One:
        return "one";
    case EqualityMode::FullOne:
        return "full1";
    case EqualityMode::Any:
        return "any";
    }
    return "?";
}

std::optional<Logic> parse_logic(std::string_view text) {
    for (Logic l : {Logic::Minimal, Logic::Intuitionistic, Logic::Classical}) {
        if (logic_name(l) == text) return l;
    }
    return std::nullopt;
}

std::optional<EqualityMode> parse_equality_mode(std::string_view text) {
    for (EqualityMode m : {EqualityMode::Full, EqualityMode::Minus, EqualityMode::One, EqualityMode::FullOne,
                           EqualityMode::Any}) {
        if (equality_mode_name(m) == text) return m;
    }
    return std::nullopt;
}

std::string Sequent::str() const {
    std::string out = "(seq (";
    for (std::size_t i = 0; i < antecedent.size(); ++i) {
        if (i) out += ' ';
        out += antecedent[i].str();
    }
    out += ") (";
    for (std::size_t i = 0; i < succedent.size(); ++i) {
        if (i) out += ' ';
        out += succedent[i].str();
    }
    return out + "))";
}

std::optional<std::vector<std::size_t>> match_indices(std::span<const Formula> expected,
                                                      std::span<const Formula> actual) {
    if (expected.size() != actual.size()) return std::nullopt;
    std::vector<std::size_t> map(expected.size());
    std::vector<bool> used(actual.size(), false);
    for (std::size_t i = 0; i < expected.size(); ++i) {
        // Prefer the same slot so that already-aligned lists map to the identity.
        if (!used[i] && alpha_equal(expected[i], actual[i])) {
            used[i] = true;
            map[i] = i;
            continue;
        }
        bool found = false;
        for (std::size_t j = 0; j < actual.size(); ++j) {
            if (!used[j] && alpha_equal(expected[i], actual[j])) {
                used[j] = true;
                map[i] = j;
                found = true;
                break;
            }
        }
        if (!found) return std::nullopt;
    }
    return map;
}

bool multiset_equal(std::span<const Formula> a, std::span<const Formula> b) {
    return match_indices(a, b).has_value();
}

bool sequent_equal(const Sequent &a, const Sequent &b) {
    return multiset_equal(a.antecedent, b.antecedent) && multiset_equal(a.succedent, b.succedent);
}

// ---------- tags ----------

std::string_view tag_name(RuleTag tag) {
    for (const auto &info : kTags) {
        if (info.tag == tag) return info.name;
    }
    return "?";
}

std::optional<RuleTag> parse_tag(std::string_view name) {
    for (const auto &info : kTags) {
        if (info.name == name) return info.tag;
    }
    return std::nullopt;
}

bool is_replacement(RuleTag tag) {
    return tag == RuleTag::Repl || tag == RuleTag::ReplMinus || tag == RuleTag::Repl1 || tag == RuleTag::Repl1Minus;
}

bool is_full_replacement(RuleTag tag) { return tag == RuleTag::Repl || tag == RuleTag::Repl1; }

bool principal_in_antecedent(RuleTag tag) {
    switch (tag) {
    case RuleTag::LBottom:
    case RuleTag::LAnd:
    case RuleTag::LOr:
    case RuleTag::LImp:
    case RuleTag::LForAll:
    case RuleTag::LExists:
        return true;
    default:
        return false;
    }
}

bool principal_in_succedent(RuleTag tag) {
    switch (tag) {
    case RuleTag::RAnd:
    case RuleTag::ROr:
    case RuleTag::RImp:
    case RuleTag::RForAll:
    case RuleTag::RExists:
        return true;
    default:
        return false;
    }
}

bool uses_witness(RuleTag tag) { return tag == RuleTag::LForAll || tag == RuleTag::RExists; }

bool uses_eigenvariable(RuleTag tag) { return tag == RuleTag::RForAll || tag == RuleTag::LExists; }

bool rule_enabled(RuleTag tag, const CalculusConfig &config) {
    const EqualityMode m = config.equality;
    switch (tag) {
    case RuleTag::LBottom:
        return config.logic != Logic::Minimal;
    case RuleTag::Repl:
        return m == EqualityMode::Full || m == EqualityMode::Any;
    case RuleTag::Repl1:
        return m == EqualityMode::Full || m == EqualityMode::FullOne || m == EqualityMode::Any;
    case RuleTag::ReplMinus:
        return m == EqualityMode::Minus || m == EqualityMode::Any;
    case RuleTag::Repl1Minus:
        return m == EqualityMode::Minus || m == EqualityMode::One || m == EqualityMode::Any;
    default:
        return true;
    }
}

RuleInstance RuleInstance::axiom() { return RuleInstance{}; }

RuleInstance RuleInstance::logical(RuleTag tag, std::size_t principal) {
    RuleInstance r;
    r.tag = tag;
    r.principal = principal;
    return r;
}

RuleInstance RuleInstance::with_witness(RuleTag tag, std::size_t principal, Term witness) {
    RuleInstance r = logical(tag, principal);
    r.term = std::move(witness);
    return r;
}

RuleInstance RuleInstance::with_eigenvariable(RuleTag tag, std::size_t principal, std::string eigen) {
    RuleInstance r = logical(tag, principal);
    r.eigenvariable = std::move(eigen);
    return r;
}

RuleInstance RuleInstance::ref(Term t) {
    RuleInstance r;
    r.tag = RuleTag::Ref;
    r.term = std::move(t);
    return r;
}

RuleInstance RuleInstance::replacement(RuleTag tag, std::size_t eq_index, std::size_t target_index,
                                       std::vector<Position> positions) {
    RuleInstance r;
    r.tag = tag;
    r.eq_index = eq_index;
    r.target_index = target_index;
    r.positions = std::move(positions);
    return r;
}

// ---------- rule semantics ----------

namespace {

class ShapeBuilder {
public:
    explicit ShapeBuilder(const Sequent &conclusion) : conclusion_(conclusion) {}

    // Carries the conclusion antecedent over, optionally without `skip`.
    ShapeBuilder &antecedent_context(std::optional<std::size_t> skip = std::nullopt) {
        for (std::size_t i = 0; i < conclusion_.antecedent.size(); ++i) {
            if (skip && *skip == i) continue;
            shape_.sequent.antecedent.push_back(conclusion_.antecedent[i]);
            shape_.antecedent_origin.emplace_back(i);
        }
        return *this;
    }
    ShapeBuilder &succedent_context(std::optional<std::size_t> skip = std::nullopt) {
        for (std::size_t i = 0; i < conclusion_.succedent.size(); ++i) {
            if (skip && *skip == i) continue;
            shape_.sequent.succedent.push_back(conclusion_.succedent[i]);
        }
        return *this;
    }
    ShapeBuilder &add_left(Formula f) {
        shape_.sequent.antecedent.push_back(std::move(f));
        shape_.antecedent_origin.emplace_back(std::nullopt);
        return *this;
    }
    ShapeBuilder &add_right(Formula f) {
        shape_.sequent.succedent.push_back(std::move(f));
        return *this;
    }
    PremiseShape build() { return std::move(shape_); }

private:
    const Sequent &conclusion_;
    PremiseShape shape_;
};

const Formula &principal_formula(const Sequent &s, const RuleInstance &rule, Formula::Kind kind) {
    const auto &side = principal_in_antecedent(rule.tag) ? s.antecedent : s.succedent;
    if (rule.principal >= side.size()) {
        throw RuleViolation("index out of range: principal " + std::to_string(rule.principal) + " of " +
                            std::string(tag_name(rule.tag)));
    }
    const Formula &f = side[rule.principal];
    if (f.kind() != kind) {
        throw RuleViolation("principal formula " + f.str() + " has the wrong shape for " +
                            std::string(tag_name(rule.tag)));
    }
    return f;
}

void require_fresh_eigenvariable(const Sequent &s, const RuleInstance &rule) {
    const std::string &y = rule.eigenvariable;
    if (y.empty()) throw RuleViolation("missing eigenvariable for " + std::string(tag_name(rule.tag)));
    for (const auto *side : {&s.antecedent, &s.succedent}) {
        for (const auto &f : *side) {
            if (occurs_free(f, y)) throw RuleViolation("eigenvariable " + y + " occurs in conclusion");
        }
    }
}

const Term &require_term(const RuleInstance &rule) {
    if (!rule.term) throw RuleViolation("missing term parameter for " + std::string(tag_name(rule.tag)));
    return *rule.term;
}

Formula instantiate(const Formula &quantified, const Term &t) {
    return substitute(quantified.body(), Substitution{{quantified.bound_variable(), t}});
}

Formula replacement_premise_formula(const Sequent &s, const RuleInstance &rule) {
    const auto &ant = s.antecedent;
    if (rule.eq_index >= ant.size()) {
        throw RuleViolation("index out of range: equality index " + std::to_string(rule.eq_index));
    }
    if (rule.target_index >= ant.size()) {
        throw RuleViolation("index out of range: target index " + std::to_string(rule.target_index));
    }
    if (rule.eq_index == rule.target_index) {
        throw RuleViolation("replacement target is the active equality itself");
    }
    const Formula &eq = ant[rule.eq_index];
    if (!eq.is_equality()) throw RuleViolation("active formula " + eq.str() + " is not an equality");
    const Formula &target = ant[rule.target_index];
    if (target.kind() != Formula::Kind::Atom && target.kind() != Formula::Kind::Equal) {
        throw RuleViolation("replacement target " + target.str() + " is not atomic");
    }
    if (rule.positions.empty()) throw RuleViolation("replacement without positions");
    const bool single = rule.tag == RuleTag::Repl1 || rule.tag == RuleTag::Repl1Minus;
    if (single && rule.positions.size() != 1) {
        throw RuleViolation("single-occurrence replacement needs exactly one position");
    }
    for (const auto &p : rule.positions) {
        try {
            if (!(subterm_at(target, p) == eq.lhs())) {
                throw RuleViolation("position " + p.str() + " does not hold left term " + eq.lhs().str());
            }
        } catch (const PositionError &e) {
            throw RuleViolation(e.what());
        }
    }
    try {
        return replace_at(target, rule.positions, eq.rhs());
    } catch (const PositionError &e) {
        throw RuleViolation(e.what());
    }
}

}  // namespace

bool is_axiom(const Sequent &s) {
    for (const auto &a : s.antecedent) {
        if (!a.is_atomic()) continue;
        for (const auto &b : s.succedent) {
            if (alpha_equal(a, b)) return true;
        }
    }
    return false;
}

std::vector<PremiseShape> expected_premises(const Sequent &conclusion, const RuleInstance &rule,
                                            const CalculusConfig &config) {
    if (!rule_enabled(rule.tag, config)) {
        throw RuleViolation("rule not enabled: " + std::string(tag_name(rule.tag)) + " under logic=" +
                            std::string(logic_name(config.logic)) +
                            " eq=" + std::string(equality_mode_name(config.equality)));
    }
    const bool classical = config.logic == Logic::Classical;
    const std::size_t k = rule.principal;
    switch (rule.tag) {
    case RuleTag::Axiom:
        if (!is_axiom(conclusion)) throw RuleViolation("not an axiom: no atomic formula on both sides");
        return {};
    case RuleTag::LBottom:
        principal_formula(conclusion, rule, Formula::Kind::Bottom);
        return {};
    case RuleTag::LAnd: {
        const Formula &f = principal_formula(conclusion, rule, Formula::Kind::And);
        return {ShapeBuilder(conclusion).antecedent_context(k).add_left(f.left()).add_left(f.right())
                    .succedent_context().build()};
    }
    case RuleTag::RAnd: {
        const Formula &f = principal_formula(conclusion, rule, Formula::Kind::And);
        return {ShapeBuilder(conclusion).antecedent_context().succedent_context(k).add_right(f.left()).build(),
                ShapeBuilder(conclusion).antecedent_context().succedent_context(k).add_right(f.right()).build()};
    }
    case RuleTag::LOr: {
        const Formula &f = principal_formula(conclusion, rule, Formula::Kind::Or);
        return {ShapeBuilder(conclusion).antecedent_context(k).add_left(f.left()).succedent_context().build(),
                ShapeBuilder(conclusion).antecedent_context(k).add_left(f.right()).succedent_context().build()};
    }
    case RuleTag::ROr: {
        const Formula &f = principal_formula(conclusion, rule, Formula::Kind::Or);
        return {ShapeBuilder(conclusion).antecedent_context().succedent_context(k).add_right(f.left())
                    .add_right(f.right()).build()};
    }
    case RuleTag::LImp: {
        const Formula &f = principal_formula(conclusion, rule, Formula::Kind::Implies);
        // Non-classical: the implication stays available in the left premise.
        ShapeBuilder left(conclusion);
        if (classical) {
            left.antecedent_context(k);
        } else {
            left.antecedent_context();
        }
        left.succedent_context().add_right(f.left());
        return {left.build(),
                ShapeBuilder(conclusion).antecedent_context(k).add_left(f.right()).succedent_context().build()};
    }
    case RuleTag::RImp: {
        const Formula &f = principal_formula(conclusion, rule, Formula::Kind::Implies);
        ShapeBuilder b(conclusion);
        b.antecedent_context().add_left(f.left());
        if (classical) b.succedent_context(k);
        b.add_right(f.right());
        return {b.build()};
    }
    case RuleTag::LForAll: {
        const Formula &f = principal_formula(conclusion, rule, Formula::Kind::ForAll);
        const Term &t = require_term(rule);
        return {ShapeBuilder(conclusion).antecedent_context().add_left(instantiate(f, t)).succedent_context().build()};
    }
    case RuleTag::RForAll: {
        const Formula &f = principal_formula(conclusion, rule, Formula::Kind::ForAll);
        require_fresh_eigenvariable(conclusion, rule);
        ShapeBuilder b(conclusion);
        b.antecedent_context();
        if (classical) b.succedent_context(k);
        b.add_right(instantiate(f, Term::variable(rule.eigenvariable)));
        return {b.build()};
    }
    case RuleTag::LExists: {
        const Formula &f = principal_formula(conclusion, rule, Formula::Kind::Exists);
        require_fresh_eigenvariable(conclusion, rule);
        return {ShapeBuilder(conclusion).antecedent_context(k)
                    .add_left(instantiate(f, Term::variable(rule.eigenvariable))).succedent_context().build()};
    }
    case RuleTag::RExists: {
        const Formula &f = principal_formula(conclusion, rule, Formula::Kind::Exists);
        const Term &t = require_term(rule);
        return {ShapeBuilder(conclusion).antecedent_context().succedent_context().add_right(instantiate(f, t)).build()};
    }
    case RuleTag::Ref: {
        const Term &t = require_term(rule);
        return {ShapeBuilder(conclusion).antecedent_context().add_left(Formula::equal(t, t)).succedent_context().build()};
    }
    case RuleTag::ReplMinus:
    case RuleTag::Repl1Minus: {
        Formula replaced = replacement_premise_formula(conclusion, rule);
        PremiseShape shape = ShapeBuilder(conclusion).antecedent_context().succedent_context().build();
        shape.sequent.antecedent[rule.target_index] = std::move(replaced);
        return {std::move(shape)};
    }
    case RuleTag::Repl:
    case RuleTag::Repl1: {
        Formula replaced = replacement_premise_formula(conclusion, rule);
        return {ShapeBuilder(conclusion).antecedent_context().add_left(std::move(replaced)).succedent_context().build()};
    }
    }
    throw RuleViolation("unknown rule");
}

std::optional<std::string> check_step(const Sequent &conclusion, const RuleInstance &rule,
                                      std::span<const Sequent> premises, const CalculusConfig &config) {
    std::vector<PremiseShape> expected;
    try {
        expected = expected_premises(conclusion, rule, config);
    } catch (const RuleViolation &e) {
        return std::string(e.what());
    }
    if (expected.size() != premises.size()) {
        return std::string(tag_name(rule.tag)) + " expects " + std::to_string(expected.size()) + " premises, got " +
               std::to_string(premises.size());
    }
    for (std::size_t i = 0; i < expected.size(); ++i) {
        if (!sequent_equal(expected[i].sequent, premises[i])) {
            return "multiset mismatch in premise " + std::to_string(i) + " of " + std::string(tag_name(rule.tag)) +
                   ": expected " + expected[i].sequent.str() + ", got " + premises[i].str();
        }
    }
    return std::nullopt;
}

std::string Violation::str() const {
    std::string out = "at (";
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (i) out += ' ';
        out += std::to_string(path[i]);
    }
    return out + "): " + message;
}

namespace {

std::optional<Violation> check_at(const Derivation &d, const CalculusConfig &config, std::vector<std::size_t> &path) {
    for (std::size_t i = 0; i < d.premises.size(); ++i) {
        path.push_back(i);
        if (auto v = check_at(d.premises[i], config, path)) return v;
        path.pop_back();
    }
    std::vector<Sequent> premises;
    premises.reserve(d.premises.size());
    for (const auto &p : d.premises) premises.push_back(p.conclusion);
    if (auto msg = check_step(d.conclusion, d.rule, premises, config)) return Violation{path, *msg};
    return std::nullopt;
}

}  // namespace

std::optional<Violation> check_derivation(const Derivation &d, const CalculusConfig &config) {
    std::vector<std::size_t> path;
    return check_at(d, config, path);
}

std::size_t height(const Derivation &d) {
    std::size_t h = 0;
    for (const auto &p : d.premises) h = std::max(h, height(p) + 1);
    return h;
}

const Sequent &endsequent(const Derivation &d) { return d.conclusion; }

std::size_t count_nodes(const Derivation &d) {
    std::size_t n = 1;
    for (const auto &p : d.premises) n += count_nodes(p);
    return n;
}

std::size_t count_inferences(const Derivation &d) {
    std::size_t n = d.rule.tag == RuleTag::Axiom ? 0 : 1;
    for (const auto &p : d.premises) n += count_inferences(p);
    return n;
}

std::size_t count_tag(const Derivation &d, RuleTag tag) {
    std::size_t n = d.rule.tag == tag ? 1 : 0;
    for (const auto &p : d.premises) n += count_tag(p, tag);
    return n;
}

std::size_t count_full_replacements(const Derivation &d) {
    return count_tag(d, RuleTag::Repl) + count_tag(d, RuleTag::Repl1);
}

Derivation with_root_order(Derivation d, const Sequent &order) {
    auto ant = match_indices(d.conclusion.antecedent, order.antecedent);
    auto suc = match_indices(d.conclusion.succedent, order.succedent);
    if (!ant || !suc) {
        throw Error("cannot reorder " + d.conclusion.str() + " as " + order.str() + ": not multiset-equal");
    }
    RuleInstance &r = d.rule;
    if (principal_in_antecedent(r.tag)) r.principal = (*ant)[r.principal];
    if (principal_in_succedent(r.tag)) r.principal = (*suc)[r.principal];
    if (is_replacement(r.tag)) {
        r.eq_index = (*ant)[r.eq_index];
        r.target_index = (*ant)[r.target_index];
    }
    d.conclusion = order;
    return d;
}

Derivation permute_antecedent(Derivation d, const std::vector<std::size_t> &order) {
    const std::size_t n = d.conclusion.antecedent.size();
    if (order.size() != n) throw Error("antecedent permutation has the wrong length");
    std::vector<std::size_t> old_to_new(n, n);
    std::vector<Formula> ant;
    ant.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (order[i] >= n || old_to_new[order[i]] != n) throw Error("antecedent permutation is not a bijection");
        old_to_new[order[i]] = i;
        ant.push_back(d.conclusion.antecedent[order[i]]);
    }
    RuleInstance &r = d.rule;
    if (principal_in_antecedent(r.tag)) r.principal = old_to_new[r.principal];
    if (is_replacement(r.tag)) {
        r.eq_index = old_to_new[r.eq_index];
        r.target_index = old_to_new[r.target_index];
    }
    d.conclusion.antecedent = std::move(ant);
    return d;
}

Derivation rename_variable(const Derivation &d, const std::string &from, const std::string &to) {
    const Substitution sub{{from, Term::variable(to)}};
    Derivation out;
    for (const auto &f : d.conclusion.antecedent) out.conclusion.antecedent.push_back(substitute(f, sub));
    for (const auto &f : d.conclusion.succedent) out.conclusion.succedent.push_back(substitute(f, sub));
    out.rule = d.rule;
    if (out.rule.term) out.rule.term = substitute(*out.rule.term, sub);
    if (out.rule.eigenvariable == from) out.rule.eigenvariable = to;
    out.premises.reserve(d.premises.size());
    for (const auto &p : d.premises) out.premises.push_back(rename_variable(p, from, to));
    return out;
}

void collect_names(const Derivation &d, NameSet &out) {
    for (const auto &f : d.conclusion.antecedent) collect_names(f, out);
    for (const auto &f : d.conclusion.succedent) collect_names(f, out);
    if (d.rule.term) collect_names(*d.rule.term, out);
    if (!d.rule.eigenvariable.empty()) out.insert(d.rule.eigenvariable);
    for (const auto &p : d.premises) collect_names(p, out);
}

namespace {

void collect_tags(const Derivation &d, std::set<RuleTag> &out) {
    out.insert(d.rule.tag);
    for (const auto &p : d.premises) collect_tags(p, out);
}

}  // namespace

EqualityMode required_mode(const Derivation &d, EqualityMode preferred) {
    std::set<RuleTag> tags;
    collect_tags(d, tags);
    CalculusConfig probe{Logic::Classical, preferred};
    if (std::all_of(tags.begin(), tags.end(), [&](RuleTag t) { return rule_enabled(t, probe); })) return preferred;
    const bool minus = tags.count(RuleTag::ReplMinus) || tags.count(RuleTag::Repl1Minus);
    const bool full = tags.count(RuleTag::Repl) || tags.count(RuleTag::Repl1);
    if (minus && full) return EqualityMode::Any;
    if (minus) return tags.count(RuleTag::ReplMinus) ? EqualityMode::Minus : EqualityMode::One;
    if (full) return tags.count(RuleTag::Repl) ? EqualityMode::Full : EqualityMode::FullOne;
    return preferred;
}

}  // namespace g3eq
