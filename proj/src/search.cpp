#include "g3eq/search.hpp"

#include <algorithm>
#include <functional>

namespace g3eq {

std::string_view outcome_name(SearchOutcome outcome) {
    switch (outcome) {
    case SearchOutcome::Found:
        return "found";
    case SearchOutcome::DepthExhausted:
        return "depth-exhausted";
    case SearchOutcome::NodeLimit:
        return "node-limit";
    }
    return "?";
}

namespace {

void add_subterms(const Term &t, std::vector<Term> &out) {
    if (std::find(out.begin(), out.end(), t) == out.end()) out.push_back(t);
    for (const auto &a : t.args()) add_subterms(a, out);
}

void add_subterms(const Formula &f, std::vector<Term> &out) {
    if (f.is_atomic()) {
        for (const auto &t : f.terms()) add_subterms(t, out);
    } else if (f.is_binary()) {
        add_subterms(f.left(), out);
        add_subterms(f.right(), out);
    } else {
        // Terms under a binder that mention the bound variable are not
        // closed candidates at the outer level.
        std::vector<Term> inner;
        add_subterms(f.body(), inner);
        for (auto &t : inner) {
            if (!occurs_in(t, f.bound_variable()) && std::find(out.begin(), out.end(), t) == out.end()) {
                out.push_back(t);
            }
        }
    }
}

std::string sequent_key(const Sequent &s) {
    std::vector<std::string> a;
    std::vector<std::string> b;
    for (const auto &f : s.antecedent) a.push_back(f.str());
    for (const auto &f : s.succedent) b.push_back(f.str());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::string key;
    for (const auto &x : a) key += x + ",";
    key += "=>";
    for (const auto &x : b) key += x + ",";
    return key;
}

bool contains(const std::vector<Formula> &fs, const Formula &f) {
    return std::any_of(fs.begin(), fs.end(), [&](const Formula &g) { return alpha_equal(f, g); });
}

struct Abort {};

class Prover {
public:
    Prover(const CalculusConfig &config, const SearchBudget &budget, std::vector<Term> universe)
        : config_(config), budget_(budget), universe_(std::move(universe)) {}

    std::optional<Derivation> prove(const Sequent &s, std::size_t depth, std::size_t repl_left) {
        if (budget_.max_nodes && ++nodes_ > budget_.max_nodes) throw Abort{};
        if (auto leaf = closing_leaf(s)) return leaf;
        if (depth == 0) return std::nullopt;
        const std::string key = sequent_key(s);
        if (std::find(history_.begin(), history_.end(), key) != history_.end()) return std::nullopt;
        history_.push_back(key);
        auto result = expand(s, depth, repl_left);
        history_.pop_back();
        return result;
    }

    std::size_t nodes() const { return nodes_; }

private:
    const CalculusConfig &config_;
    const SearchBudget &budget_;
    std::vector<Term> universe_;
    std::vector<std::string> history_;
    std::size_t nodes_ = 0;

    bool classical() const { return config_.logic == Logic::Classical; }

    std::optional<Derivation> closing_leaf(const Sequent &s) const {
        if (is_axiom(s)) return Derivation::axiom(s);
        if (config_.logic != Logic::Minimal) {
            for (std::size_t i = 0; i < s.antecedent.size(); ++i) {
                if (s.antecedent[i].kind() == Formula::Kind::Bottom) {
                    return Derivation{s, RuleInstance::logical(RuleTag::LBottom, i), {}};
                }
            }
        }
        return std::nullopt;
    }

    // Applies `rule` backwards; nullopt if some premise fails.
    std::optional<Derivation> attempt(const Sequent &s, const RuleInstance &rule, std::size_t depth,
                                      std::size_t repl_left) {
        std::vector<PremiseShape> shapes;
        try {
            shapes = expected_premises(s, rule, config_);
        } catch (const RuleViolation &) {
            return std::nullopt;
        }
        Derivation d{s, rule, {}};
        for (const auto &shape : shapes) {
            auto p = prove(shape.sequent, depth - 1, repl_left);
            if (!p) return std::nullopt;
            d.premises.push_back(std::move(*p));
        }
        return d;
    }

    std::string eigenvariable_for(const Sequent &s, const std::string &base) const {
        NameSet avoid;
        for (const auto &f : s.antecedent) collect_names(f, avoid);
        for (const auto &f : s.succedent) collect_names(f, avoid);
        for (const auto &t : universe_) collect_names(t, avoid);
        return fresh_variable(avoid, base);
    }

    std::optional<Derivation> expand(const Sequent &s, std::size_t depth, std::size_t repl_left) {
        const auto &ant = s.antecedent;
        const auto &suc = s.succedent;
        // Invertible rules: the first applicable one decides the node.
        for (std::size_t i = 0; i < ant.size(); ++i) {
            const auto k = ant[i].kind();
            if (k == Formula::Kind::And) return attempt(s, RuleInstance::logical(RuleTag::LAnd, i), depth, repl_left);
            if (k == Formula::Kind::Or) return attempt(s, RuleInstance::logical(RuleTag::LOr, i), depth, repl_left);
            if (k == Formula::Kind::Exists) {
                const std::string y = eigenvariable_for(s, ant[i].bound_variable());
                return with_eigen(s, RuleInstance::with_eigenvariable(RuleTag::LExists, i, y), depth, repl_left);
            }
            if (k == Formula::Kind::Implies && classical()) {
                return attempt(s, RuleInstance::logical(RuleTag::LImp, i), depth, repl_left);
            }
        }
        for (std::size_t j = 0; j < suc.size(); ++j) {
            const auto k = suc[j].kind();
            if (k == Formula::Kind::And) return attempt(s, RuleInstance::logical(RuleTag::RAnd, j), depth, repl_left);
            if (k == Formula::Kind::Or) return attempt(s, RuleInstance::logical(RuleTag::ROr, j), depth, repl_left);
            if (classical() && k == Formula::Kind::Implies) {
                return attempt(s, RuleInstance::logical(RuleTag::RImp, j), depth, repl_left);
            }
            if (classical() && k == Formula::Kind::ForAll) {
                const std::string y = eigenvariable_for(s, suc[j].bound_variable());
                return with_eigen(s, RuleInstance::with_eigenvariable(RuleTag::RForAll, j, y), depth, repl_left);
            }
        }

        // Choice points.
        for (std::size_t j = 0; j < suc.size(); ++j) {
            const auto k = suc[j].kind();
            std::optional<Derivation> d;
            if (k == Formula::Kind::Implies) {
                d = attempt(s, RuleInstance::logical(RuleTag::RImp, j), depth, repl_left);
            } else if (k == Formula::Kind::ForAll) {
                const std::string y = eigenvariable_for(s, suc[j].bound_variable());
                d = with_eigen(s, RuleInstance::with_eigenvariable(RuleTag::RForAll, j, y), depth, repl_left);
            }
            if (d) return d;
        }
        for (std::size_t i = 0; i < ant.size(); ++i) {
            if (ant[i].kind() == Formula::Kind::Implies && !contains(suc, ant[i].left())) {
                if (auto d = attempt(s, RuleInstance::logical(RuleTag::LImp, i), depth, repl_left)) return d;
            }
        }
        for (std::size_t i = 0; i < ant.size(); ++i) {
            if (ant[i].kind() != Formula::Kind::ForAll) continue;
            for (const auto &t : universe_) {
                Formula inst = substitute(ant[i].body(), Substitution{{ant[i].bound_variable(), t}});
                if (contains(ant, inst)) continue;
                if (auto d = attempt(s, RuleInstance::with_witness(RuleTag::LForAll, i, t), depth, repl_left)) return d;
            }
        }
        for (std::size_t j = 0; j < suc.size(); ++j) {
            if (suc[j].kind() != Formula::Kind::Exists) continue;
            for (const auto &t : universe_) {
                Formula inst = substitute(suc[j].body(), Substitution{{suc[j].bound_variable(), t}});
                if (contains(suc, inst)) continue;
                if (auto d = attempt(s, RuleInstance::with_witness(RuleTag::RExists, j, t), depth, repl_left)) return d;
            }
        }
        if (repl_left == 0) return std::nullopt;
        if (auto d = replacements(s, depth, repl_left - 1)) return d;
        for (const auto &t : universe_) {
            if (contains(ant, Formula::equal(t, t))) continue;
            if (auto d = attempt(s, RuleInstance::ref(t), depth, repl_left - 1)) return d;
        }
        return std::nullopt;
    }

    std::optional<Derivation> with_eigen(const Sequent &s, const RuleInstance &rule, std::size_t depth,
                                         std::size_t repl_left) {
        // The eigenvariable and the subterms it now closes off join the universe.
        const Formula &q = rule.tag == RuleTag::LExists ? s.antecedent[rule.principal] : s.succedent[rule.principal];
        std::vector<Term> opened{Term::variable(rule.eigenvariable)};
        add_subterms(substitute(q.body(), Substitution{{q.bound_variable(), opened[0]}}), opened);
        const std::size_t before = universe_.size();
        for (const auto &t : opened) {
            if (occurs_in(t, rule.eigenvariable) && std::find(universe_.begin(), universe_.end(), t) == universe_.end()) {
                universe_.push_back(t);
            }
        }
        auto d = attempt(s, rule, depth, repl_left);
        universe_.erase(universe_.begin() + static_cast<std::ptrdiff_t>(before), universe_.end());
        return d;
    }

    std::optional<Derivation> replacements(const Sequent &s, std::size_t depth, std::size_t repl_left) {
        const auto &ant = s.antecedent;
        const EqualityMode m = config_.equality;
        const bool multi_minus = m == EqualityMode::Minus || m == EqualityMode::Any;
        const bool single_minus = m == EqualityMode::One;
        const bool multi_full = m == EqualityMode::Full || m == EqualityMode::Any;
        const bool single_full = m == EqualityMode::FullOne;
        for (std::size_t e = 0; e < ant.size(); ++e) {
            if (!ant[e].is_equality() || ant[e].lhs() == ant[e].rhs()) continue;
            const Term &lhs = ant[e].lhs();
            const Term &rhs = ant[e].rhs();
            for (std::size_t t = 0; t < ant.size(); ++t) {
                if (t == e || !(ant[t].kind() == Formula::Kind::Atom || ant[t].is_equality())) continue;
                const auto occ = positions_of(ant[t], lhs);
                if (occ.empty()) continue;
                const std::size_t subsets = (std::size_t{1} << occ.size()) - 1;
                for (std::size_t mask = 1; mask <= subsets; ++mask) {
                    std::vector<Position> chosen;
                    for (std::size_t b = 0; b < occ.size(); ++b) {
                        if (mask & (std::size_t{1} << b)) chosen.push_back(occ[b]);
                    }
                    const bool single = chosen.size() == 1;
                    const Formula rewritten = replace_at(ant[t], chosen, rhs);
                    if (contains(ant, rewritten)) continue;
                    auto try_tag = [&](RuleTag tag) {
                        return attempt(s, RuleInstance::replacement(tag, e, t, chosen), depth, repl_left);
                    };
                    std::optional<Derivation> d;
                    if (multi_minus) {
                        d = try_tag(single ? RuleTag::Repl1Minus : RuleTag::ReplMinus);
                    } else if (single_minus && single) {
                        d = try_tag(RuleTag::Repl1Minus);
                    } else if (multi_full) {
                        d = try_tag(single ? RuleTag::Repl1 : RuleTag::Repl);
                    } else if (single_full && single) {
                        d = try_tag(RuleTag::Repl1);
                    }
                    if (d) return d;
                }
            }
        }
        return std::nullopt;
    }
};

}  // namespace

std::vector<Term> subterms(const Sequent &s) {
    std::vector<Term> out;
    for (const auto &f : s.antecedent) add_subterms(f, out);
    for (const auto &f : s.succedent) add_subterms(f, out);
    return out;
}

SearchResult bounded_prove(const Sequent &goal, const CalculusConfig &config, const SearchBudget &budget) {
    std::vector<Term> universe = budget.term_universe.empty() ? subterms(goal) : budget.term_universe;
    if (universe.empty()) {
        NameSet avoid;
        for (const auto &f : goal.antecedent) collect_names(f, avoid);
        for (const auto &f : goal.succedent) collect_names(f, avoid);
        universe.push_back(Term::variable(fresh_variable(avoid, "x")));
    }
    SearchResult result;
    Prover prover(config, budget, std::move(universe));
    try {
        for (std::size_t depth = 0; depth <= budget.max_depth; ++depth) {
            result.depth = depth;
            if (auto d = prover.prove(goal, depth, budget.max_repl_per_branch)) {
                if (auto v = check_derivation(*d, config)) {
                    throw Error("search produced an invalid derivation: " + v->str());
                }
                result.outcome = SearchOutcome::Found;
                result.derivation = std::move(d);
                break;
            }
        }
    } catch (const Abort &) {
        result.outcome = SearchOutcome::NodeLimit;
    }
    result.nodes = prover.nodes();
    return result;
}

EquivReport equiv_oracle(const Sequent &goal, const SearchBudget &budget, Logic logic) {
    EquivReport report;
    report.full = bounded_prove(goal, CalculusConfig{logic, EqualityMode::Full}, budget);
    report.minus = bounded_prove(goal, CalculusConfig{logic, EqualityMode::Minus}, budget);
    return report;
}

}  // namespace g3eq
