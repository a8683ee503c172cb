#include <algorithm>
#include <functional>
#include <random>

#include "g3eq/search.hpp"
#include "g3eq/transforms.hpp"

namespace g3eq {

Signature default_signature() {
    Signature sig;
    sig.constants = {"c", "d"};
    sig.functions = {{"f", 1}};
    sig.predicates = {{"P", 1}, {"Q", 2}};
    return sig;
}

namespace {

Sequent without_left(const Sequent &s, std::size_t i) {
    Sequent out = s;
    out.antecedent.erase(out.antecedent.begin() + static_cast<std::ptrdiff_t>(i));
    return out;
}

Sequent without_right(const Sequent &s, std::size_t j) {
    Sequent out = s;
    out.succedent.erase(out.succedent.begin() + static_cast<std::ptrdiff_t>(j));
    return out;
}

std::vector<Term> terms_of(const Formula &f) {
    std::vector<Term> out;
    std::function<void(const Term &)> walk = [&](const Term &t) {
        if (std::find(out.begin(), out.end(), t) == out.end()) out.push_back(t);
        for (const auto &a : t.args()) walk(a);
    };
    std::function<void(const Formula &)> walkf = [&](const Formula &g) {
        if (g.is_atomic()) {
            for (const auto &t : g.terms()) walk(t);
        } else if (g.is_binary()) {
            walkf(g.left());
            walkf(g.right());
        } else {
            walkf(g.body());
        }
    };
    walkf(f);
    return out;
}

class Generator {
public:
    explicit Generator(const GenSpec &spec)
        : rng_(spec.seed),
          sig_(spec.signature.functions.empty() && spec.signature.predicates.empty() && spec.signature.constants.empty()
                   ? default_signature()
                   : spec.signature),
          config_(spec.config),
          density_(spec.repl_density),
          reserved_(sig_.names()) {
        for (const auto &[name, arity] : sig_.functions) functions_.emplace_back(name, arity);
        for (const auto &[name, arity] : sig_.predicates) predicates_.emplace_back(name, arity);
        constants_.assign(sig_.constants.begin(), sig_.constants.end());
        for (RuleTag t : {RuleTag::Repl, RuleTag::Repl1, RuleTag::ReplMinus, RuleTag::Repl1Minus}) {
            if (rule_enabled(t, config_)) repl_tags_.push_back(t);
        }
    }

    Derivation derivation(std::size_t height) {
        if (height == 0) return leaf();
        for (int attempt = 0; attempt < 12; ++attempt) {
            std::optional<Derivation> d;
            if (!repl_tags_.empty() && chance(density_)) {
                d = replacement(height);
            } else {
                d = logical(height);
            }
            if (d) return std::move(*d);
        }
        return and_left(derivation(height - 1));
    }

private:
    std::mt19937_64 rng_;
    Signature sig_;
    CalculusConfig config_;
    double density_;
    NameSet reserved_;
    std::vector<std::pair<std::string, std::size_t>> functions_;
    std::vector<std::pair<std::string, std::size_t>> predicates_;
    std::vector<std::string> constants_;
    std::vector<RuleTag> repl_tags_;
    const std::vector<std::string> variables_{"x", "y"};

    std::size_t pick(std::size_t n) { return static_cast<std::size_t>(rng_() % n); }
    bool chance(double p) { return static_cast<double>(rng_() >> 11) * 0x1.0p-53 < p; }
    bool classical() const { return config_.logic == Logic::Classical; }

    Term term(std::size_t depth) {
        const std::size_t leaves = constants_.size() + variables_.size();
        if (depth > 0 && !functions_.empty() && pick(3) == 0) {
            const auto &[f, arity] = functions_[pick(functions_.size())];
            std::vector<Term> args;
            for (std::size_t i = 0; i < arity; ++i) args.push_back(term(depth - 1));
            return Term::apply(f, std::move(args));
        }
        const std::size_t k = pick(leaves);
        if (k < constants_.size()) return Term::constant(constants_[k]);
        return Term::variable(variables_[k - constants_.size()]);
    }

    Formula atom() {
        if (predicates_.empty() || pick(10) < 3) return Formula::equal(term(1), term(1));
        const auto &[p, arity] = predicates_[pick(predicates_.size())];
        std::vector<Term> args;
        for (std::size_t i = 0; i < arity; ++i) args.push_back(term(1));
        return Formula::atom(p, std::move(args));
    }

    Formula formula(std::size_t depth) {
        if (depth == 0 || pick(2) == 0) return atom();
        switch (pick(5)) {
        case 0:
            return Formula::conj(formula(depth - 1), formula(depth - 1));
        case 1:
            return Formula::disj(formula(depth - 1), formula(depth - 1));
        case 2:
            return Formula::implies(formula(depth - 1), formula(depth - 1));
        case 3:
            return Formula::forall(variables_[pick(variables_.size())], formula(depth - 1));
        default:
            return Formula::exists(variables_[pick(variables_.size())], formula(depth - 1));
        }
    }

    static std::size_t insert_at(std::vector<Formula> &fs, std::size_t at, Formula f) {
        fs.insert(fs.begin() + static_cast<std::ptrdiff_t>(at), std::move(f));
        return at;
    }

    Derivation leaf() {
        Sequent s;
        for (std::size_t k = pick(3); k > 0; --k) s.antecedent.push_back(formula(1));
        for (std::size_t k = pick(2); k > 0; --k) s.succedent.push_back(formula(1));
        if (config_.logic != Logic::Minimal && pick(8) == 0) {
            const std::size_t i = insert_at(s.antecedent, pick(s.antecedent.size() + 1), Formula::bottom());
            return Derivation{std::move(s), RuleInstance::logical(RuleTag::LBottom, i), {}};
        }
        const Formula p = atom();
        insert_at(s.antecedent, pick(s.antecedent.size() + 1), p);
        insert_at(s.succedent, pick(s.succedent.size() + 1), p);
        return Derivation::axiom(std::move(s));
    }

    Derivation left(Derivation d, const Formula &f) { return weaken_left(d, f, reserved_); }
    Derivation right(Derivation d, const Formula &f) { return weaken_right(d, f, config_.logic, reserved_); }

    // Antecedent index of some formula, weakening a fresh one in if needed.
    std::size_t some_left(Derivation &d, std::size_t avoid = SIZE_MAX) {
        const std::size_t n = d.conclusion.antecedent.size();
        if (n > (avoid < n ? 1u : 0u) && pick(4) != 0) {
            std::size_t i;
            do {
                i = pick(n);
            } while (i == avoid);
            return i;
        }
        d = left(std::move(d), formula(1));
        return d.conclusion.antecedent.size() - 1;
    }

    std::size_t some_right(Derivation &d, std::size_t avoid = SIZE_MAX) {
        const std::size_t n = d.conclusion.succedent.size();
        if (n > (avoid < n ? 1u : 0u) && pick(4) != 0) {
            std::size_t j;
            do {
                j = pick(n);
            } while (j == avoid);
            return j;
        }
        d = right(std::move(d), formula(1));
        return d.conclusion.succedent.size() - 1;
    }

    Derivation top(Sequent s, RuleInstance rule, std::vector<Derivation> premises) {
        return Derivation{std::move(s), std::move(rule), std::move(premises)};
    }

    Derivation and_left(Derivation d) {
        const std::size_t i = some_left(d);
        const std::size_t j = some_left(d, i);
        const auto &ant = d.conclusion.antecedent;
        Formula conj = Formula::conj(ant[i], ant[j]);
        Sequent s = d.conclusion;
        s.antecedent.erase(s.antecedent.begin() + static_cast<std::ptrdiff_t>(std::max(i, j)));
        s.antecedent.erase(s.antecedent.begin() + static_cast<std::ptrdiff_t>(std::min(i, j)));
        const std::size_t k = insert_at(s.antecedent, pick(s.antecedent.size() + 1), conj);
        return top(std::move(s), RuleInstance::logical(RuleTag::LAnd, k), {std::move(d)});
    }

    // Weakens both derivations so that their conclusions share the context
    // made of everything except the chosen side formulas.
    void share_context(Derivation &a, std::size_t a_left, std::size_t a_right, Derivation &b, std::size_t b_left,
                       std::size_t b_right) {
        Sequent ca = a.conclusion;
        Sequent cb = b.conclusion;
        for (std::size_t i = 0; i < cb.antecedent.size(); ++i) {
            if (i != b_left) a = left(std::move(a), cb.antecedent[i]);
        }
        for (std::size_t j = 0; j < cb.succedent.size(); ++j) {
            if (j != b_right) a = right(std::move(a), cb.succedent[j]);
        }
        for (std::size_t i = 0; i < ca.antecedent.size(); ++i) {
            if (i != a_left) b = left(std::move(b), ca.antecedent[i]);
        }
        for (std::size_t j = 0; j < ca.succedent.size(); ++j) {
            if (j != a_right) b = right(std::move(b), ca.succedent[j]);
        }
    }

    std::optional<Derivation> logical(std::size_t h) {
        Derivation d1 = derivation(h - 1);
        switch (pick(11)) {
        case 0:
        case 1:
            return and_left(std::move(d1));
        case 2: {  // L-or
            Derivation d2 = derivation(pick(h));
            const std::size_t i1 = some_left(d1);
            const std::size_t i2 = some_left(d2);
            const Formula a = d1.conclusion.antecedent[i1];
            const Formula b = d2.conclusion.antecedent[i2];
            share_context(d1, i1, SIZE_MAX, d2, i2, SIZE_MAX);
            Sequent s = without_left(d1.conclusion, i1);
            const std::size_t k = insert_at(s.antecedent, pick(s.antecedent.size() + 1), Formula::disj(a, b));
            return top(std::move(s), RuleInstance::logical(RuleTag::LOr, k), {std::move(d1), std::move(d2)});
        }
        case 3: {  // R-and
            Derivation d2 = derivation(pick(h));
            const std::size_t j1 = some_right(d1);
            const std::size_t j2 = some_right(d2);
            const Formula a = d1.conclusion.succedent[j1];
            const Formula b = d2.conclusion.succedent[j2];
            share_context(d1, SIZE_MAX, j1, d2, SIZE_MAX, j2);
            Sequent s = without_right(d1.conclusion, j1);
            const std::size_t k = insert_at(s.succedent, pick(s.succedent.size() + 1), Formula::conj(a, b));
            return top(std::move(s), RuleInstance::logical(RuleTag::RAnd, k), {std::move(d1), std::move(d2)});
        }
        case 4: {  // R-or
            const std::size_t j = some_right(d1);
            const std::size_t k2 = some_right(d1, j);
            const auto &suc = d1.conclusion.succedent;
            Formula disj = Formula::disj(suc[j], suc[k2]);
            Sequent s = d1.conclusion;
            s.succedent.erase(s.succedent.begin() + static_cast<std::ptrdiff_t>(std::max(j, k2)));
            s.succedent.erase(s.succedent.begin() + static_cast<std::ptrdiff_t>(std::min(j, k2)));
            const std::size_t k = insert_at(s.succedent, pick(s.succedent.size() + 1), disj);
            return top(std::move(s), RuleInstance::logical(RuleTag::ROr, k), {std::move(d1)});
        }
        case 5: {  // L-imp
            Derivation d2 = derivation(pick(h));
            const std::size_t ja = some_right(d1);
            const std::size_t ib = some_left(d2);
            const Formula a = d1.conclusion.succedent[ja];
            const Formula b = d2.conclusion.antecedent[ib];
            share_context(d1, SIZE_MAX, ja, d2, ib, SIZE_MAX);
            const Formula imp = Formula::implies(a, b);
            Sequent s = without_right(d1.conclusion, ja);
            const std::size_t k = insert_at(s.antecedent, pick(s.antecedent.size() + 1), imp);
            if (!classical()) d1 = left(std::move(d1), imp);
            return top(std::move(s), RuleInstance::logical(RuleTag::LImp, k), {std::move(d1), std::move(d2)});
        }
        case 6: {  // R-imp
            if (!classical() && d1.conclusion.succedent.size() != 1) return std::nullopt;
            const std::size_t ia = some_left(d1);
            const std::size_t jb = classical() ? some_right(d1) : 0;
            const Formula imp = Formula::implies(d1.conclusion.antecedent[ia], d1.conclusion.succedent[jb]);
            Sequent s = without_right(without_left(d1.conclusion, ia), jb);
            const std::size_t k = insert_at(s.succedent, pick(s.succedent.size() + 1), imp);
            return top(std::move(s), RuleInstance::logical(RuleTag::RImp, k), {std::move(d1)});
        }
        case 7:
            return quantifier_instance(std::move(d1), true);
        case 8:
            return quantifier_instance(std::move(d1), false);
        case 9:
            return eigen(std::move(d1), pick(2) == 0);
        default:
            return ref(std::move(d1));
        }
    }

    // L-forall (left) or R-exists (right): generalize some occurrences of a
    // term in a side formula of the premise.
    std::optional<Derivation> quantifier_instance(Derivation d, bool left_side) {
        const auto &side = left_side ? d.conclusion.antecedent : d.conclusion.succedent;
        if (side.empty()) return std::nullopt;
        const std::size_t i = pick(side.size());
        const Formula f = side[i];
        const auto candidates = terms_of(f);
        if (candidates.empty()) return std::nullopt;
        const Term t = candidates[pick(candidates.size())];
        auto occ = positions_of(f, t);
        if (occ.empty()) return std::nullopt;
        std::vector<Position> chosen;
        for (const auto &p : occ) {
            if (pick(3) != 0) chosen.push_back(p);
        }
        if (chosen.empty()) chosen.push_back(occ[pick(occ.size())]);
        NameSet names;
        collect_names(f, names);
        names.insert(reserved_.begin(), reserved_.end());
        const std::string x = fresh_variable(names, "z");
        const Formula body = abstract(f, chosen, x);
        if (!alpha_equal(substitute(body, Substitution{{x, t}}), f)) return std::nullopt;
        const Formula q = left_side ? Formula::forall(x, body) : Formula::exists(x, body);
        Derivation w = left_side ? left(std::move(d), q) : right(std::move(d), q);
        Sequent s = left_side ? without_left(w.conclusion, i) : without_right(w.conclusion, i);
        const auto &qs = left_side ? s.antecedent : s.succedent;
        const std::size_t k = qs.size() - 1;
        return top(std::move(s), RuleInstance::with_witness(left_side ? RuleTag::LForAll : RuleTag::RExists, k, t),
                   {std::move(w)});
    }

    // R-forall or L-exists on a variable free in exactly one side formula.
    std::optional<Derivation> eigen(Derivation d, bool right_side) {
        const auto &side = right_side ? d.conclusion.succedent : d.conclusion.antecedent;
        if (side.empty()) return std::nullopt;
        if (right_side && !classical() && side.size() != 1) return std::nullopt;
        const std::size_t i = pick(side.size());
        const Formula f = side[i];
        for (const auto &y : free_variables(f)) {
            bool elsewhere = false;
            for (std::size_t k = 0; k < d.conclusion.antecedent.size(); ++k) {
                if ((right_side || k != i) && occurs_free(d.conclusion.antecedent[k], y)) elsewhere = true;
            }
            for (std::size_t k = 0; k < d.conclusion.succedent.size(); ++k) {
                if ((!right_side || k != i) && occurs_free(d.conclusion.succedent[k], y)) elsewhere = true;
            }
            if (elsewhere) continue;
            Sequent s = right_side ? without_right(d.conclusion, i) : without_left(d.conclusion, i);
            auto &qs = right_side ? s.succedent : s.antecedent;
            const std::size_t k = insert_at(qs, pick(qs.size() + 1),
                                            right_side ? Formula::forall(y, f) : Formula::exists(y, f));
            return top(std::move(s),
                       RuleInstance::with_eigenvariable(right_side ? RuleTag::RForAll : RuleTag::LExists, k, y),
                       {std::move(d)});
        }
        return std::nullopt;
    }

    std::optional<Derivation> ref(Derivation d) {
        const auto &ant = d.conclusion.antecedent;
        for (std::size_t i = 0; i < ant.size(); ++i) {
            if (ant[i].is_equality() && ant[i].lhs() == ant[i].rhs()) {
                const Term t = ant[i].lhs();
                Sequent s = without_left(d.conclusion, i);
                return top(std::move(s), RuleInstance::ref(t), {std::move(d)});
            }
        }
        const Term t = term(1);
        Derivation w = left(std::move(d), Formula::equal(t, t));
        Sequent s = without_left(w.conclusion, w.conclusion.antecedent.size() - 1);
        return top(std::move(s), RuleInstance::ref(t), {std::move(w)});
    }

    // A replacement inference whose rewritten target is a formula the premise
    // derivation already has, so that elimination has real work to do.
    std::optional<Derivation> replacement(std::size_t h) {
        Derivation d = derivation(h - 1);
        const RuleTag tag = repl_tags_[pick(repl_tags_.size())];
        std::vector<std::size_t> atomic;
        for (std::size_t i = 0; i < d.conclusion.antecedent.size(); ++i) {
            const Formula &f = d.conclusion.antecedent[i];
            if (f.kind() == Formula::Kind::Atom || f.is_equality()) atomic.push_back(i);
        }
        if (atomic.empty()) {
            d = left(std::move(d), atom());
            atomic.push_back(d.conclusion.antecedent.size() - 1);
        }
        const std::size_t t = atomic[pick(atomic.size())];
        const Formula target = d.conclusion.antecedent[t];
        const auto candidates = terms_of(target);
        if (candidates.empty()) return std::nullopt;
        const Term r = candidates[pick(candidates.size())];
        const auto occ = positions_of(target, r);
        std::vector<Position> chosen;
        const bool single = tag == RuleTag::Repl1 || tag == RuleTag::Repl1Minus;
        if (single) {
            chosen.push_back(occ[pick(occ.size())]);
        } else {
            for (const auto &p : occ) {
                if (pick(4) != 0) chosen.push_back(p);
            }
            if (chosen.empty()) chosen = occ;
        }
        // Left side: reuse an equality of the premise ending in r, or invent one.
        std::optional<std::size_t> eq;
        for (std::size_t i = 0; i < d.conclusion.antecedent.size(); ++i) {
            const Formula &f = d.conclusion.antecedent[i];
            if (i != t && f.is_equality() && f.rhs() == r && pick(2) == 0) eq = i;
        }
        if (!eq) {
            Term s = term(1);
            if (s == r) s = Term::apply(functions_.empty() ? "f" : functions_[0].first, {r});
            if (functions_.empty() && s.is_apply()) return std::nullopt;
            d = left(std::move(d), Formula::equal(s, r));
            eq = d.conclusion.antecedent.size() - 1;
        }
        const Term s = d.conclusion.antecedent[*eq].lhs();
        const Formula rewritten = replace_at(target, chosen, s);
        const bool full = is_full_replacement(tag);
        Sequent c;
        std::size_t eq_index = *eq;
        std::size_t target_index = t;
        if (full) {
            d = left(std::move(d), rewritten);
            c = without_left(d.conclusion, t);
            target_index = c.antecedent.size() - 1;
            if (eq_index > t) --eq_index;
        } else {
            c = d.conclusion;
            c.antecedent[t] = rewritten;
        }
        return top(std::move(c), RuleInstance::replacement(tag, eq_index, target_index, chosen), {std::move(d)});
    }
};

}  // namespace

Derivation generate_derivation(const GenSpec &spec) {
    for (std::size_t attempt = 0; attempt < spec.max_retries; ++attempt) {
        GenSpec shifted = spec;
        shifted.seed = spec.seed + attempt * 0x9E3779B97F4A7C15ULL;
        Generator gen(shifted);
        Derivation d = gen.derivation(spec.target_height);
        if (!check_derivation(d, spec.config)) return d;
    }
    throw GenerationError("generation retries exhausted for seed " + std::to_string(spec.seed));
}

}  // namespace g3eq
