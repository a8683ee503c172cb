#include "g3eq/transforms.hpp"

#include <algorithm>
#include <utility>

namespace g3eq {

namespace {

const CalculusConfig kPermissive{Logic::Classical, EqualityMode::Any};

Derivation make_node(Sequent conclusion, RuleInstance rule, Derivation premise) {
    Derivation d{std::move(conclusion), std::move(rule), {}};
    d.premises.push_back(std::move(premise));
    return d;
}

class Weakener {
public:
    Weakener(const Derivation &d, const Formula &f, bool left, Logic logic, const NameSet &reserved)
        : f_(f), left_(left), logic_(logic), avoid_(reserved), f_free_(free_variables(f)) {
        collect_names(d, avoid_);
        collect_names(f, avoid_);
    }

    Derivation run(const Derivation &d) {
        Derivation out{d.conclusion, d.rule, {}};
        (left_ ? out.conclusion.antecedent : out.conclusion.succedent).push_back(f_);
        std::vector<Derivation> premises = d.premises;
        if (uses_eigenvariable(d.rule.tag) && f_free_.count(d.rule.eigenvariable)) {
            const std::string fresh = fresh_variable(avoid_, d.rule.eigenvariable);
            avoid_.insert(fresh);
            for (auto &p : premises) p = rename_variable(p, d.rule.eigenvariable, fresh);
            out.rule.eigenvariable = fresh;
        }
        const bool drops_context = !left_ && logic_ != Logic::Classical &&
                                   (d.rule.tag == RuleTag::RImp || d.rule.tag == RuleTag::RForAll);
        out.premises.reserve(premises.size());
        for (auto &p : premises) out.premises.push_back(drops_context ? std::move(p) : run(p));
        return out;
    }

private:
    Formula f_;
    bool left_;
    Logic logic_;
    NameSet avoid_;
    NameSet f_free_;
};

// Validates a replacement instance at `conclusion` and returns its positions
// sorted lexicographically.
std::vector<Position> sorted_positions(const Sequent &conclusion, const RuleInstance &inst, bool full) {
    if (!is_replacement(inst.tag) || is_full_replacement(inst.tag) != full) {
        throw TransformError(std::string("unexpected rule ") + std::string(tag_name(inst.tag)) +
                             " for replacement expansion");
    }
    try {
        expected_premises(conclusion, inst, kPermissive);
    } catch (const RuleViolation &e) {
        throw TransformError(std::string("invalid replacement instance: ") + e.what());
    }
    std::vector<Position> positions = inst.positions;
    std::sort(positions.begin(), positions.end());
    return positions;
}

Derivation expand_repl_chain(const Sequent &conclusion, std::size_t eq, std::size_t target,
                             std::span<const Position> positions, Derivation premise, const NameSet &reserved) {
    if (positions.size() == 1) {
        return make_node(conclusion, RuleInstance::replacement(RuleTag::Repl1, eq, target, {positions[0]}),
                         std::move(premise));
    }
    // Mixed copy: the peeled occurrence still holds s, all others hold r.
    const Formula &r_side = conclusion.antecedent[eq];
    Formula mixed = replace_at(conclusion.antecedent[target], positions.subspan(1), r_side.rhs());
    Sequent upper = conclusion;
    upper.antecedent.push_back(mixed);
    const std::size_t mixed_index = upper.antecedent.size() - 1;
    Derivation top = make_node(upper, RuleInstance::replacement(RuleTag::Repl1, eq, mixed_index, {positions[0]}),
                               weaken_left(premise, mixed, reserved));
    return expand_repl_chain(conclusion, eq, target, positions.subspan(1), std::move(top), reserved);
}

std::size_t find_occurrence(const Sequent &s, const Formula &f, std::size_t skip_count) {
    for (std::size_t i = 0; i < s.antecedent.size(); ++i) {
        if (alpha_equal(s.antecedent[i], f)) {
            if (skip_count == 0) return i;
            --skip_count;
        }
    }
    return s.antecedent.size();
}

}  // namespace

Derivation weaken_left(const Derivation &d, const Formula &f, const NameSet &reserved) {
    return Weakener(d, f, true, Logic::Classical, reserved).run(d);
}

Derivation weaken_right(const Derivation &d, const Formula &f, Logic logic, const NameSet &reserved) {
    return Weakener(d, f, false, logic, reserved).run(d);
}

Derivation expand_repl_minus(const Sequent &conclusion, const RuleInstance &inst, const Derivation &premise) {
    const std::vector<Position> positions = sorted_positions(conclusion, inst, false);
    const std::size_t eq = inst.eq_index;
    const std::size_t target = inst.target_index;
    const Term &r = conclusion.antecedent[eq].rhs();
    const Formula &full = conclusion.antecedent[target];
    Derivation current = premise;
    for (std::size_t k = 0; k < positions.size(); ++k) {
        Sequent c = conclusion;
        c.antecedent[target] = replace_at(full, std::span(positions).subspan(k + 1), r);
        current = make_node(std::move(c), RuleInstance::replacement(RuleTag::Repl1Minus, eq, target, {positions[k]}),
                            std::move(current));
    }
    return current;
}

Derivation expand_repl(const Sequent &conclusion, const RuleInstance &inst, const Derivation &premise,
                       const NameSet &reserved) {
    const std::vector<Position> positions = sorted_positions(conclusion, inst, true);
    return expand_repl_chain(conclusion, inst.eq_index, inst.target_index, positions, premise, reserved);
}

Derivation derive_contr_eq(const Derivation &d, std::size_t keep, std::size_t drop) {
    const auto &ant = d.conclusion.antecedent;
    if (keep >= ant.size() || drop >= ant.size() || keep == drop) {
        throw TransformError("duplicate occurrence not found: bad equality indices");
    }
    if (!ant[keep].is_equality() || !alpha_equal(ant[keep], ant[drop])) {
        throw TransformError("duplicate occurrence not found: " + ant[keep].str() + " and " + ant[drop].str() +
                             " are not the same equality");
    }
    const Term s = ant[keep].lhs();
    Sequent middle = d.conclusion;
    middle.antecedent[drop] = Formula::equal(s, s);
    Sequent bottom = middle;
    bottom.antecedent.erase(bottom.antecedent.begin() + static_cast<std::ptrdiff_t>(drop));
    Derivation step =
        make_node(middle, RuleInstance::replacement(RuleTag::Repl1Minus, keep, drop, {Position{1}}), d);
    return make_node(std::move(bottom), RuleInstance::ref(s), std::move(step));
}

Derivation derive_contr_eq(const Derivation &d, const Formula &eq) {
    const std::size_t first = find_occurrence(d.conclusion, eq, 0);
    const std::size_t second = find_occurrence(d.conclusion, eq, 1);
    if (second >= d.conclusion.antecedent.size()) {
        throw TransformError("duplicate occurrence not found: " + eq.str());
    }
    return derive_contr_eq(d, first, second);
}

Derivation derive_symm(const Derivation &d, std::size_t index, const NameSet &reserved) {
    const auto &ant = d.conclusion.antecedent;
    if (index >= ant.size() || !ant[index].is_equality()) {
        throw TransformError("symmetry needs an antecedent equality at index " + std::to_string(index));
    }
    const Term s = ant[index].lhs();
    const Term r = ant[index].rhs();
    Derivation weakened = weaken_left(d, Formula::equal(r, r), reserved);
    const std::size_t added = weakened.conclusion.antecedent.size() - 1;

    Sequent c1 = weakened.conclusion;
    c1.antecedent[added] = Formula::equal(r, s);
    Derivation n1 = make_node(c1, RuleInstance::replacement(RuleTag::Repl1Minus, index, added, {Position{1}}),
                              std::move(weakened));
    Sequent c2 = c1;
    c2.antecedent[index] = Formula::equal(r, r);
    Derivation n2 = make_node(c2, RuleInstance::replacement(RuleTag::Repl1Minus, added, index, {Position{0}}),
                              std::move(n1));
    Sequent c3 = c2;
    c3.antecedent.erase(c3.antecedent.begin() + static_cast<std::ptrdiff_t>(index));
    Derivation n3 = make_node(std::move(c3), RuleInstance::ref(r), std::move(n2));

    // r=s sits last; move it back to where s=r was.
    const std::size_t n = n3.conclusion.antecedent.size();
    std::vector<std::size_t> order;
    order.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (i < index) {
            order.push_back(i);
        } else if (i == index) {
            order.push_back(n - 1);
        } else {
            order.push_back(i - 1);
        }
    }
    return permute_antecedent(std::move(n3), order);
}

Derivation derive_symm(const Derivation &d, const Formula &eq, const NameSet &reserved) {
    const std::size_t index = find_occurrence(d.conclusion, eq, 0);
    if (index >= d.conclusion.antecedent.size()) {
        throw TransformError("equality not present in endsequent antecedent: " + eq.str());
    }
    return derive_symm(d, index, reserved);
}

Derivation translate_minus_to_full(const Derivation &d, const NameSet &reserved) {
    Derivation out{d.conclusion, d.rule, {}};
    out.premises.reserve(d.premises.size());
    for (const auto &p : d.premises) out.premises.push_back(translate_minus_to_full(p, reserved));
    if (d.rule.tag == RuleTag::ReplMinus || d.rule.tag == RuleTag::Repl1Minus) {
        out.rule.tag = d.rule.tag == RuleTag::ReplMinus ? RuleTag::Repl : RuleTag::Repl1;
        out.premises[0] = weaken_left(out.premises[0], d.conclusion.antecedent[d.rule.target_index], reserved);
    }
    return out;
}

Derivation expand_replacements(const Derivation &d, const NameSet &reserved) {
    Derivation out{d.conclusion, d.rule, {}};
    out.premises.reserve(d.premises.size());
    for (const auto &p : d.premises) out.premises.push_back(expand_replacements(p, reserved));
    const bool minus = d.rule.tag == RuleTag::ReplMinus;
    if (!minus && d.rule.tag != RuleTag::Repl) return out;
    if (d.rule.positions.size() == 1) {
        out.rule.tag = minus ? RuleTag::Repl1Minus : RuleTag::Repl1;
        return out;
    }
    NameSet avoid = reserved;
    collect_names(out.premises[0], avoid);
    return minus ? expand_repl_minus(d.conclusion, d.rule, out.premises[0])
                 : expand_repl(d.conclusion, d.rule, out.premises[0], avoid);
}

Derivation bundle_replacements(const Derivation &d, Logic logic) {
    const CalculusConfig config{logic, EqualityMode::Any};
    Derivation out{d.conclusion, d.rule, {}};
    out.premises.reserve(d.premises.size());
    for (const auto &p : d.premises) out.premises.push_back(bundle_replacements(p, logic));

    auto minus = [](RuleTag t) { return t == RuleTag::ReplMinus || t == RuleTag::Repl1Minus; };
    while (minus(out.rule.tag) && minus(out.premises[0].rule.tag)) {
        const Derivation &upper = out.premises[0];
        const auto shape = expected_premises(out.conclusion, out.rule, config);
        const auto map = match_indices(shape[0].sequent.antecedent, upper.conclusion.antecedent);
        if (!map || (*map)[out.rule.eq_index] != upper.rule.eq_index ||
            (*map)[out.rule.target_index] != upper.rule.target_index) {
            break;
        }
        RuleInstance merged = out.rule;
        merged.tag = RuleTag::ReplMinus;
        merged.positions.insert(merged.positions.end(), upper.rule.positions.begin(), upper.rule.positions.end());
        std::sort(merged.positions.begin(), merged.positions.end());
        bool disjoint = true;
        for (std::size_t i = 0; i + 1 < merged.positions.size(); ++i) {
            if (overlapping(merged.positions[i], merged.positions[i + 1])) disjoint = false;
        }
        if (!disjoint) break;
        std::vector<Sequent> above;
        for (const auto &p : upper.premises) above.push_back(p.conclusion);
        if (upper.premises.size() != 1 || check_step(out.conclusion, merged, above, config)) break;
        std::vector<Derivation> grand = upper.premises;
        out.rule = std::move(merged);
        out.premises = std::move(grand);
    }
    return out;
}

}  // namespace g3eq
