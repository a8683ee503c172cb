#include "g3eq/elimination.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <utility>

#include "g3eq/transforms.hpp"

namespace g3eq {

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

// A tracked term position pi together with the antecedent slot of the
// equality  keep|pi = drop|pi  that justifies it.
struct Pair {
    Position pos;
    std::size_t eq;
};

// Slots of the occurrence that survives (keep) and the one to remove (drop).
// keep and drop agree everywhere except at the pair positions.
struct Tracked {
    std::size_t keep = 0;
    std::size_t drop = 0;
    std::vector<Pair> pairs;
};

Derivation make_node(Sequent conclusion, RuleInstance rule, Derivation premise) {
    Derivation d{std::move(conclusion), std::move(rule), {}};
    d.premises.push_back(std::move(premise));
    return d;
}

Sequent without(const Sequent &s, std::size_t index) {
    Sequent out = s;
    out.antecedent.erase(out.antecedent.begin() + static_cast<std::ptrdiff_t>(index));
    return out;
}

std::size_t shift(std::size_t index, std::size_t removed) { return index > removed ? index - 1 : index; }

bool trivial(const Formula &eq) { return eq.lhs() == eq.rhs(); }

// Bottom-up construction below a derivation whose antecedent entries carry
// stable ids, so that later steps can address formulas whose index moves.
class Chain {
public:
    Chain(Derivation d, std::vector<std::size_t> ids, const NameSet &reserved)
        : d_(std::move(d)), ids_(std::move(ids)), reserved_(reserved) {}

    std::size_t at(std::size_t id) const {
        auto it = std::find(ids_.begin(), ids_.end(), id);
        if (it == ids_.end()) throw Error("internal elimination error: lost track of slot " + std::to_string(id));
        return static_cast<std::size_t>(it - ids_.begin());
    }

    const Formula &formula(std::size_t id) const { return d_.conclusion.antecedent[at(id)]; }

    // Repl1-: the occurrence of the equality's right side at `pos` becomes its
    // left side.
    void rewrite(std::size_t eq_id, std::size_t target_id, const Position &pos) {
        const std::size_t e = at(eq_id);
        const std::size_t t = at(target_id);
        const Formula &eq = d_.conclusion.antecedent[e];
        const Formula &target = d_.conclusion.antecedent[t];
        if (!eq.is_equality() || !(subterm_at(target, pos) == eq.rhs())) {
            throw Error("internal elimination error: cannot rewrite " + target.str() + " at " + pos.str() +
                        " with " + eq.str());
        }
        Sequent c = d_.conclusion;
        c.antecedent[t] = replace_at(target, std::span(&pos, 1), eq.lhs());
        d_ = make_node(std::move(c), RuleInstance::replacement(RuleTag::Repl1Minus, e, t, {pos}), std::move(d_));
    }

    void symm(std::size_t id) { d_ = derive_symm(d_, at(id), reserved_); }

    void contract(std::size_t keep_id, std::size_t drop_id) {
        const std::size_t drop = at(drop_id);
        d_ = derive_contr_eq(d_, at(keep_id), drop);
        ids_.erase(ids_.begin() + static_cast<std::ptrdiff_t>(drop));
    }

    Derivation finish(const std::vector<std::size_t> &wanted) && {
        if (wanted.size() != ids_.size()) {
            throw Error("internal elimination error: auxiliary formulas left over");
        }
        std::vector<std::size_t> order;
        order.reserve(wanted.size());
        for (std::size_t id : wanted) order.push_back(at(id));
        return permute_antecedent(std::move(d_), order);
    }

private:
    Derivation d_;
    std::vector<std::size_t> ids_;
    const NameSet &reserved_;
};

class Eliminator {
public:
    Eliminator(Logic logic, const NameSet &reserved, EliminationStats *stats)
        : config_{logic, EqualityMode::Any}, reserved_(reserved), stats_(stats) {}

    Derivation run(const Derivation &d, const Tracked &ctx) {
        check_invariant(d.conclusion, ctx);
        switch (d.rule.tag) {
        case RuleTag::Axiom:
        case RuleTag::LBottom:
            return leaf(d, ctx);
        case RuleTag::Repl:
        case RuleTag::Repl1:
            throw TransformError("full replacement inference inside the derivation being transformed");
        case RuleTag::ReplMinus:
            if (d.rule.positions.size() > 1) {
                return run(expand_repl_minus(d.conclusion, d.rule, d.premises.at(0)), ctx);
            }
            return replacement(d, ctx);
        case RuleTag::Repl1Minus:
            return replacement(d, ctx);
        default:
            return propagate(d, ctx);
        }
    }

private:
    CalculusConfig config_;
    const NameSet &reserved_;
    EliminationStats *stats_;

    void note(const char *name) {
        if (stats_) ++stats_->cases[name];
    }

    static void check_invariant(const Sequent &s, const Tracked &ctx) {
        const auto &ant = s.antecedent;
        if (ctx.keep >= ant.size() || ctx.drop >= ant.size() || ctx.keep == ctx.drop) {
            throw Error("internal elimination error: tracked slots out of range");
        }
        const Formula &a = ant[ctx.keep];
        const Formula &b = ant[ctx.drop];
        for (const auto &p : ctx.pairs) {
            if (p.eq >= ant.size() || p.eq == ctx.keep || p.eq == ctx.drop) {
                throw Error("internal elimination error: bad equality slot");
            }
            if (!(ant[p.eq] == Formula::equal(subterm_at(a, p.pos), subterm_at(b, p.pos)))) {
                throw Error("internal elimination error: equality " + ant[p.eq].str() + " does not relate " +
                            a.str() + " and " + b.str() + " at " + p.pos.str());
            }
        }
        std::vector<Position> ps;
        for (const auto &p : ctx.pairs) ps.push_back(p.pos);
        // replace_at rejects overlapping positions and checks the shared skeleton.
        if (!(replace_at(a, ps, Term::variable("_")) == replace_at(b, ps, Term::variable("_")))) {
            throw Error("internal elimination error: " + a.str() + " and " + b.str() +
                        " differ outside the tracked positions");
        }
    }

    // Identifies every antecedent slot of the conclusion with the slot it
    // occupies in the actual premise.
    std::vector<std::size_t> carry(const PremiseShape &shape, const Derivation &premise, std::size_t n) const {
        auto map = match_indices(shape.sequent.antecedent, premise.conclusion.antecedent);
        if (!map || !multiset_equal(shape.sequent.succedent, premise.conclusion.succedent)) {
            throw TransformError("premise does not match its rule: " + premise.conclusion.str());
        }
        std::vector<std::size_t> to(n, kNone);
        for (std::size_t y = 0; y < shape.antecedent_origin.size(); ++y) {
            if (shape.antecedent_origin[y]) to[*shape.antecedent_origin[y]] = (*map)[y];
        }
        return to;
    }

    static Tracked translate(const Tracked &ctx, const std::vector<std::size_t> &to) {
        auto tr = [&](std::size_t i) {
            if (to[i] == kNone) throw Error("internal elimination error: tracked formula not carried to premise");
            return to[i];
        };
        Tracked out{tr(ctx.keep), tr(ctx.drop), {}};
        for (const auto &p : ctx.pairs) out.pairs.push_back({p.pos, tr(p.eq)});
        return out;
    }

    Derivation leaf(const Derivation &d, const Tracked &ctx) {
        const Sequent &s = d.conclusion;
        Sequent rest = without(s, ctx.drop);
        if (d.rule.tag == RuleTag::LBottom) {
            note("leaf_bottom");
            RuleInstance rule = d.rule;
            rule.principal = shift(rule.principal, ctx.drop);
            return Derivation{std::move(rest), rule, {}};
        }
        if (is_axiom(rest)) {
            note("leaf_kept");
            return Derivation::axiom(std::move(rest));
        }
        // The dropped formula closed the axiom: start from its copy in the
        // kept slot and rewrite one tracked position per equality.
        note("leaf_rewritten");
        Sequent start = rest;
        start.antecedent[shift(ctx.keep, ctx.drop)] = s.antecedent[ctx.drop];
        if (!is_axiom(start)) throw Error("internal elimination error: leaf is not an axiom");
        Chain chain(Derivation::axiom(std::move(start)), remaining_ids(s.antecedent.size(), ctx.drop), reserved_);
        for (const auto &p : ctx.pairs) chain.rewrite(p.eq, ctx.keep, p.pos);
        return std::move(chain).finish(remaining_ids(s.antecedent.size(), ctx.drop));
    }

    static std::vector<std::size_t> remaining_ids(std::size_t n, std::size_t drop) {
        std::vector<std::size_t> ids;
        for (std::size_t i = 0; i < n; ++i) {
            if (i != drop) ids.push_back(i);
        }
        return ids;
    }

    Derivation propagate(const Derivation &d, const Tracked &ctx) {
        note(d.rule.tag == RuleTag::Ref ? "ref" : "logical");
        const Sequent &s = d.conclusion;
        const auto shapes = expected_premises(s, d.rule, config_);
        if (shapes.size() != d.premises.size()) throw TransformError("premise count does not match its rule");
        Derivation out{without(s, ctx.drop), d.rule, {}};
        if (principal_in_antecedent(out.rule.tag)) out.rule.principal = shift(out.rule.principal, ctx.drop);
        for (std::size_t j = 0; j < shapes.size(); ++j) {
            const auto to = carry(shapes[j], d.premises[j], s.antecedent.size());
            out.premises.push_back(run(d.premises[j], translate(ctx, to)));
        }
        return out;
    }

    // Recursion on the premise of the last inference, weakened by `extras`,
    // under a context written in ids: 0..n-1 are conclusion slots, n+k is the
    // k-th extra formula. Returns the result with its slots labelled by ids.
    Chain descend(const Derivation &premise, const std::vector<std::size_t> &to, std::size_t n,
                  const std::vector<Formula> &extras, const Tracked &ids_ctx) {
        Derivation weakened = premise;
        for (const auto &f : extras) weakened = weaken_left(weakened, f, reserved_);
        const std::size_t base = premise.conclusion.antecedent.size();
        auto index_of = [&](std::size_t id) {
            if (id >= n) return base + (id - n);
            if (to[id] == kNone) throw Error("internal elimination error: slot not carried to premise");
            return to[id];
        };
        Tracked sub{index_of(ids_ctx.keep), index_of(ids_ctx.drop), {}};
        for (const auto &p : ids_ctx.pairs) sub.pairs.push_back({p.pos, index_of(p.eq)});

        std::vector<std::size_t> id_at(weakened.conclusion.antecedent.size(), kNone);
        for (std::size_t id = 0; id < n; ++id) id_at[index_of(id)] = id;
        for (std::size_t k = 0; k < extras.size(); ++k) id_at[base + k] = n + k;
        Derivation result = run(weakened, sub);
        id_at.erase(id_at.begin() + static_cast<std::ptrdiff_t>(sub.drop));
        return Chain(std::move(result), std::move(id_at), reserved_);
    }

    // Equalities  p_i = q_i  for the nontrivial pairs inside the left side of
    // the dropped equality; they let the kept equality stand in for it.
    static std::vector<std::size_t> left_pairs(const Sequent &s, const Tracked &ctx) {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < ctx.pairs.size(); ++i) {
            if (ctx.pairs[i].pos.path.front() == 0 && !trivial(s.antecedent[ctx.pairs[i].eq])) out.push_back(i);
        }
        return out;
    }

    static std::vector<Formula> reversed(const Sequent &s, const Tracked &ctx, const std::vector<std::size_t> &idx) {
        std::vector<Formula> out;
        for (std::size_t i : idx) {
            const Formula &e = s.antecedent[ctx.pairs[i].eq];
            out.push_back(Formula::equal(e.rhs(), e.lhs()));
        }
        return out;
    }

    // Performs, with the dropped equality gone, the rewrite of `target` at
    // rho that it used to justify: the kept equality `middle` does the step at
    // rho, the pair equalities adjust both sides. `pairs` gives the current eq
    // ids; reversed equalities for left pairs sit at ids w_ids and are
    // discharged afterwards.
    static void simulate(Chain &chain, const std::vector<Pair> &pairs, std::size_t target,
                         const Position &rho, std::size_t middle, const std::vector<std::size_t> &lefts,
                         const std::vector<std::size_t> &w_ids) {
        for (const auto &p : pairs) {
            if (p.pos.path.front() == 1 && !trivial(chain.formula(p.eq))) {
                chain.rewrite(p.eq, target, rho.concat(p.pos.strip(Position{1})));
            }
        }
        chain.rewrite(middle, target, rho);
        for (std::size_t k = 0; k < lefts.size(); ++k) {
            chain.rewrite(w_ids[k], target, rho.concat(pairs[lefts[k]].pos.strip(Position{0})));
        }
        for (std::size_t k = 0; k < lefts.size(); ++k) {
            chain.symm(w_ids[k]);
            chain.contract(pairs[lefts[k]].eq, w_ids[k]);
        }
    }

    Derivation replacement(const Derivation &d, const Tracked &ctx) {
        const Sequent &s = d.conclusion;
        const std::size_t n = s.antecedent.size();
        const std::size_t e = d.rule.eq_index;
        const std::size_t t = d.rule.target_index;
        const Position rho = d.rule.positions.at(0);
        const Derivation &premise = d.premises.at(0);
        const auto shapes = expected_premises(s, d.rule, config_);
        const auto to = carry(shapes[0], premise, n);
        const Sequent &above = shapes[0].sequent;  // conclusion order, target rewritten
        const std::vector<std::size_t> wanted = remaining_ids(n, ctx.drop);
        const Term &d_term = s.antecedent[e].rhs();

        const bool target_is_eq =
            std::any_of(ctx.pairs.begin(), ctx.pairs.end(), [&](const Pair &p) { return p.eq == t; });

        if (t != ctx.keep && t != ctx.drop && !target_is_eq) {
            if (e != ctx.drop) {
                note("untracked_target");
                Chain chain = descend(premise, to, n, {}, ctx);
                chain.rewrite(e, t, rho);
                return std::move(chain).finish(wanted);
            }
            note("untracked_target_via_dropped");
            const auto lefts = left_pairs(s, ctx);
            Chain chain = descend(premise, to, n, reversed(s, ctx, lefts), ctx);
            simulate(chain, ctx.pairs, t, rho, ctx.keep, lefts, extra_ids(n, 0, lefts.size()));
            return std::move(chain).finish(wanted);
        }

        if (t == ctx.keep && e == ctx.drop) {
            note("kept_target_via_dropped");
            const auto lefts = left_pairs(s, ctx);
            std::vector<Formula> extras{s.antecedent[ctx.keep]};
            const auto ws = reversed(s, ctx, lefts);
            extras.insert(extras.end(), ws.begin(), ws.end());
            Tracked sub = ctx;
            sub.keep = n;
            Chain chain = descend(premise, to, n, extras, sub);
            simulate(chain, ctx.pairs, ctx.keep, rho, n, lefts, extra_ids(n, 1, lefts.size()));
            chain.contract(ctx.keep, n);
            return std::move(chain).finish(wanted);
        }

        if (target_is_eq) {
            Tracked sub = ctx;
            for (auto &p : sub.pairs) {
                if (p.eq == t) p.eq = n;
            }
            std::vector<Formula> extras{s.antecedent[t]};
            if (e != ctx.drop) {
                note("equation_target");
                Chain chain = descend(premise, to, n, extras, sub);
                chain.rewrite(e, t, rho);
                chain.contract(t, n);
                return std::move(chain).finish(wanted);
            }
            note("equation_target_via_dropped");
            const auto lefts = left_pairs(s, ctx);
            const auto ws = reversed(s, ctx, lefts);
            extras.insert(extras.end(), ws.begin(), ws.end());
            Chain chain = descend(premise, to, n, extras, sub);
            simulate(chain, sub.pairs, t, rho, ctx.keep, lefts, extra_ids(n, 1, lefts.size()));
            chain.contract(t, n);
            return std::move(chain).finish(wanted);
        }

        // The rewrite acts on one of the tracked occurrences; locate rho
        // relative to the tracked positions.
        std::vector<std::size_t> below;  // pairs with rho a prefix of their position
        std::size_t inside = kNone;      // pair whose position is a strict prefix of rho
        for (std::size_t i = 0; i < ctx.pairs.size(); ++i) {
            if (rho.is_prefix_of(ctx.pairs[i].pos)) {
                below.push_back(i);
            } else if (ctx.pairs[i].pos.is_strict_prefix_of(rho)) {
                inside = i;
            }
        }
        const Formula &keep_f = s.antecedent[ctx.keep];
        const Formula &drop_f = s.antecedent[ctx.drop];

        if (t == ctx.drop) {
            const Formula &drop_above = above.antecedent[ctx.drop];
            if (inside != kNone) {
                note("dropped_inside");
                const Pair &pk = ctx.pairs[inside];
                const Position sigma = rho.strip(pk.pos);
                Tracked sub = ctx;
                sub.pairs[inside].eq = n;
                Chain chain = descend(premise, to, n,
                                      {Formula::equal(subterm_at(keep_f, pk.pos), subterm_at(drop_above, pk.pos))},
                                      sub);
                chain.rewrite(e, n, Position{1}.concat(sigma));
                chain.contract(pk.eq, n);
                return std::move(chain).finish(wanted);
            }
            if (below.empty()) {
                Tracked sub = ctx;
                if (e != ctx.keep) {
                    note("dropped_disjoint");
                    sub.pairs.push_back({rho, e});
                    Chain chain = descend(premise, to, n, {}, sub);
                    return std::move(chain).finish(wanted);
                }
                note("dropped_disjoint_kept_equality");
                sub.pairs.push_back({rho, n});
                Chain chain = descend(premise, to, n, {keep_f}, sub);
                chain.contract(ctx.keep, n);
                return std::move(chain).finish(wanted);
            }
            note("dropped_covering");
            Tracked sub{ctx.keep, ctx.drop, {}};
            for (std::size_t i = 0; i < ctx.pairs.size(); ++i) {
                if (std::find(below.begin(), below.end(), i) == below.end()) sub.pairs.push_back(ctx.pairs[i]);
            }
            sub.pairs.push_back({rho, n});
            Chain chain = descend(premise, to, n, {Formula::equal(subterm_at(keep_f, rho), d_term)}, sub);
            const auto flips = nontrivial_slots(s, ctx, below);
            for (std::size_t slot : flips) chain.symm(slot);
            for (std::size_t i : below) {
                const Pair &p = ctx.pairs[i];
                if (!trivial(s.antecedent[p.eq])) chain.rewrite(p.eq, n, Position{0}.concat(p.pos.strip(rho)));
            }
            for (std::size_t slot : flips) chain.symm(slot);
            chain.contract(e, n);
            return std::move(chain).finish(wanted);
        }

        // t == keep, e != drop.
        const Formula &keep_above = above.antecedent[ctx.keep];
        if (inside != kNone) {
            note("kept_inside");
            const Pair &pk = ctx.pairs[inside];
            const Position sigma = rho.strip(pk.pos);
            Tracked sub = ctx;
            sub.pairs[inside].eq = n;
            Chain chain = descend(premise, to, n,
                                  {Formula::equal(subterm_at(keep_above, pk.pos), subterm_at(drop_f, pk.pos))}, sub);
            chain.rewrite(e, ctx.keep, rho);
            chain.rewrite(e, n, Position{0}.concat(sigma));
            chain.contract(pk.eq, n);
            return std::move(chain).finish(wanted);
        }
        if (below.empty()) {
            note("kept_disjoint");
            Tracked sub = ctx;
            sub.pairs.push_back({rho, n});
            Chain chain = descend(premise, to, n, {Formula::equal(d_term, subterm_at(drop_f, rho))}, sub);
            chain.rewrite(e, ctx.keep, rho);
            chain.symm(n);
            chain.contract(e, n);
            return std::move(chain).finish(wanted);
        }
        note("kept_covering");
        Tracked sub{ctx.keep, ctx.drop, {}};
        for (std::size_t i = 0; i < ctx.pairs.size(); ++i) {
            if (std::find(below.begin(), below.end(), i) == below.end()) sub.pairs.push_back(ctx.pairs[i]);
        }
        sub.pairs.push_back({rho, n});
        Chain chain = descend(premise, to, n, {Formula::equal(d_term, subterm_at(drop_f, rho))}, sub);
        chain.rewrite(e, ctx.keep, rho);
        for (std::size_t i : below) {
            const Pair &p = ctx.pairs[i];
            if (!trivial(s.antecedent[p.eq])) chain.rewrite(p.eq, n, Position{1}.concat(p.pos.strip(rho)));
        }
        chain.symm(n);
        chain.contract(e, n);
        return std::move(chain).finish(wanted);
    }

    static std::vector<std::size_t> extra_ids(std::size_t n, std::size_t first, std::size_t count) {
        std::vector<std::size_t> ids;
        for (std::size_t k = 0; k < count; ++k) ids.push_back(n + first + k);
        return ids;
    }

    // Distinct equality slots of the nontrivial pairs among `which`.
    static std::vector<std::size_t> nontrivial_slots(const Sequent &s, const Tracked &ctx,
                                                     const std::vector<std::size_t> &which) {
        std::vector<std::size_t> out;
        for (std::size_t i : which) {
            const std::size_t slot = ctx.pairs[i].eq;
            if (!trivial(s.antecedent[slot]) && std::find(out.begin(), out.end(), slot) == out.end()) {
                out.push_back(slot);
            }
        }
        return out;
    }
};

std::size_t single_occurrence(const Formula &templ, const std::string &var) {
    auto occ = occurrences(templ, var);
    if (occ.size() != 1) {
        throw TransformError("variable " + var + " must occur exactly once in the template " + templ.str());
    }
    return 0;
}

Position occurrence_of(const Formula &templ, const std::string &var) { return occurrences(templ, var).at(0); }

Substitution side(const ReplContext &ctx, bool left) {
    Substitution sub;
    for (std::size_t i = 0; i < ctx.pairs.size(); ++i) {
        sub.emplace(ctx.context_vars[i], left ? ctx.pairs[i].first : ctx.pairs[i].second);
    }
    sub.emplace(ctx.v, left ? ctx.s : ctx.r);
    return sub;
}

struct Normalizer {
    Logic logic;
    const NameSet &reserved;
    EliminationStats *stats;

    Derivation run(const Derivation &d) {
        Derivation out{d.conclusion, d.rule, {}};
        out.premises.reserve(d.premises.size());
        for (const auto &p : d.premises) out.premises.push_back(run(p));
        switch (d.rule.tag) {
        case RuleTag::Repl:
            if (d.rule.positions.size() > 1) {
                return run(expand_repl(out.conclusion, out.rule, out.premises[0], reserved));
            }
            [[fallthrough]];
        case RuleTag::Repl1:
            return eliminate_step(out);
        case RuleTag::ReplMinus:
            if (d.rule.positions.size() > 1) return expand_repl_minus(out.conclusion, out.rule, out.premises[0]);
            out.rule.tag = RuleTag::Repl1Minus;
            return out;
        default:
            return out;
        }
    }

    Derivation eliminate_step(const Derivation &node) {
        const CalculusConfig config{logic, EqualityMode::Any};
        const auto shapes = expected_premises(node.conclusion, node.rule, config);
        const Derivation &premise = node.premises.at(0);
        auto map = match_indices(shapes[0].sequent.antecedent, premise.conclusion.antecedent);
        if (!map) throw TransformError("premise does not match Repl1 inference: " + premise.conclusion.str());
        Tracked ctx{(*map)[node.rule.target_index], (*map)[shapes[0].sequent.antecedent.size() - 1],
                    {{node.rule.positions.at(0), (*map)[node.rule.eq_index]}}};
        Eliminator elim(logic, reserved, stats);
        Derivation result = elim.run(premise, ctx);
        if (stats) ++stats->eliminated;
        return with_root_order(std::move(result), node.conclusion);
    }
};

}  // namespace

std::size_t EliminationStats::total(const std::string &name) const {
    auto it = cases.find(name);
    return it == cases.end() ? 0 : it->second;
}

void validate(const ReplContext &ctx) {
    if (ctx.context_vars.size() != ctx.pairs.size()) {
        throw TransformError("context needs one variable per equality pair");
    }
    if (!ctx.templ.is_atomic() || ctx.templ.kind() == Formula::Kind::Bottom) {
        throw TransformError("template must be an atomic formula with arguments");
    }
    std::set<std::string> vars(ctx.context_vars.begin(), ctx.context_vars.end());
    vars.insert(ctx.v);
    if (vars.size() != ctx.context_vars.size() + 1) throw TransformError("context variables are not distinct");
    NameSet in_terms;
    for (const auto &[q, p] : ctx.pairs) {
        in_terms.merge(free_variables(q));
        in_terms.merge(free_variables(p));
    }
    in_terms.merge(free_variables(ctx.s));
    in_terms.merge(free_variables(ctx.r));
    for (const auto &x : vars) {
        single_occurrence(ctx.templ, x);
        if (in_terms.count(x)) throw TransformError("context variable " + x + " occurs in a replaced term");
    }
}

Sequent assemble_conclusion(const ReplContext &ctx) {
    Sequent out;
    for (const auto &[q, p] : ctx.pairs) out.antecedent.push_back(Formula::equal(q, p));
    out.antecedent.push_back(Formula::equal(ctx.s, ctx.r));
    out.antecedent.push_back(substitute(ctx.templ, side(ctx, true)));
    out.antecedent.insert(out.antecedent.end(), ctx.gamma.begin(), ctx.gamma.end());
    out.succedent = ctx.delta;
    return out;
}

Sequent assemble_premise(const ReplContext &ctx) {
    Sequent out = assemble_conclusion(ctx);
    const auto at = out.antecedent.begin() + static_cast<std::ptrdiff_t>(ctx.pairs.size() + 2);
    out.antecedent.insert(at, substitute(ctx.templ, side(ctx, false)));
    return out;
}

Derivation eliminate_repl1(const Derivation &d, const ReplContext &ctx, Logic logic, const NameSet &reserved,
                           EliminationStats *stats) {
    validate(ctx);
    const Sequent premise = assemble_premise(ctx);
    auto map = match_indices(premise.antecedent, d.conclusion.antecedent);
    if (!map || !multiset_equal(premise.succedent, d.conclusion.succedent)) {
        throw TransformError("endsequent " + d.conclusion.str() + " does not match the context premise " +
                             premise.str());
    }
    const std::size_t n = ctx.pairs.size();
    Tracked tracked{(*map)[n + 1], (*map)[n + 2], {}};
    for (std::size_t i = 0; i < n; ++i) {
        tracked.pairs.push_back({occurrence_of(ctx.templ, ctx.context_vars[i]), (*map)[i]});
    }
    tracked.pairs.push_back({occurrence_of(ctx.templ, ctx.v), (*map)[n]});
    NameSet avoid = reserved;
    collect_names(d, avoid);
    Eliminator elim(logic, avoid, stats);
    Derivation result = elim.run(d, tracked);
    return with_root_order(std::move(result), assemble_conclusion(ctx));
}

Derivation eliminate_all_repl(const Derivation &d, Logic logic, const NameSet &reserved, EliminationStats *stats) {
    if (count_full_replacements(d) == 0) return d;
    Normalizer norm{logic, reserved, stats};
    return norm.run(d);
}

Derivation translate_full_to_minus(const Derivation &d, Logic logic, const NameSet &reserved,
                                   EliminationStats *stats) {
    return bundle_replacements(eliminate_all_repl(d, logic, reserved, stats), logic);
}

}  // namespace g3eq
