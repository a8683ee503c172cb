#include <gtest/gtest.h>

#include "g3eq/search.hpp"
#include "g3eq/transforms.hpp"
#include "support.hpp"

using namespace g3eq;
using namespace g3eq::testing;

namespace {

const Term c = cst("c");
const Term d = cst("d");
const CalculusConfig one{Logic::Classical, EqualityMode::One};
const CalculusConfig full_one{Logic::Classical, EqualityMode::FullOne};
const CalculusConfig minus{Logic::Classical, EqualityMode::Minus};

Term g(const Term &a, const Term &b) { return Term::apply("g", {a, b}); }

Derivation D(const std::string &text) { return parse_derivation(text, small_signature()); }

bool checks(const Derivation &x, const CalculusConfig &config) { return !check_derivation(x, config); }

std::string why(const Derivation &x, const CalculusConfig &config) {
    auto v = check_derivation(x, config);
    return v ? v->str() : "";
}

// Q(g(c,c), g(c,c)) and its four occurrences of c.
const Formula quad = Q(g(c, c), g(c, c));
const std::vector<Position> quad_positions{{0, 0}, {0, 1}, {1, 0}, {1, 1}};

std::vector<std::vector<Position>> subsets_of_size(std::size_t n) {
    std::vector<std::vector<Position>> out;
    for (unsigned mask = 1; mask < 16; ++mask) {
        if (static_cast<std::size_t>(__builtin_popcount(mask)) != n) continue;
        std::vector<Position> s;
        for (unsigned b = 0; b < 4; ++b) {
            if (mask & (1u << b)) s.push_back(quad_positions[b]);
        }
        out.push_back(s);
    }
    return out;
}

}  // namespace

TEST(WeakenLeft, LeafStaysLeaf) {
    const Derivation leaf = D("(axiom (seq ((P c)) ((P c))))");
    const Derivation w = weaken_left(leaf, Q(d, d));
    EXPECT_EQ(w.rule.tag, RuleTag::Axiom);
    EXPECT_EQ(height(w), 0u);
    EXPECT_EQ(w.conclusion.antecedent.size(), 2u);
    EXPECT_TRUE(checks(w, minus));
}

TEST(WeakenRight, LeafStaysLeaf) {
    const Derivation w = weaken_right(D("(axiom (seq ((P c)) ((P c))))"), Q(d, d), Logic::Classical);
    EXPECT_EQ(height(w), 0u);
    EXPECT_EQ(w.conclusion.succedent.size(), 2u);
}

TEST(WeakenRight, StopsAtImplicationRightOutsideClassical) {
    const Derivation d1 = D(R"((rule rimp :principal 0 (seq () ((imp (P c) (P c))))
        (axiom (seq ((P c)) ((P c))))))");
    const Derivation w = weaken_right(d1, Q(d, d), Logic::Intuitionistic);
    EXPECT_TRUE(checks(w, {Logic::Intuitionistic, EqualityMode::Minus})) << why(w, minus);
    EXPECT_EQ(w.premises[0].conclusion.succedent.size(), 1u);
    const Derivation wc = weaken_right(d1, Q(d, d), Logic::Classical);
    EXPECT_EQ(wc.premises[0].conclusion.succedent.size(), 2u);
    EXPECT_TRUE(checks(wc, minus));
}

TEST(WeakenLeft, RenamesClashingEigenvariable) {
    const Derivation d1 = D(R"((rule rall :principal 0 :eigen y (seq ((all x (P x))) ((all x (P x))))
        (rule lall :principal 0 :witness y (seq ((all x (P x))) ((P y)))
          (axiom (seq ((all x (P x)) (P y)) ((P y)))))))");
    const Derivation w = weaken_left(d1, P(var("y")));
    EXPECT_TRUE(checks(w, minus)) << why(w, minus);
    EXPECT_NE(w.rule.eigenvariable, "y");
    EXPECT_EQ(height(w), height(d1));
}

TEST(WeakenBothSides, GeneratedDerivationsKeepHeight) {
    for (Logic logic : {Logic::Minimal, Logic::Intuitionistic, Logic::Classical}) {
        for (std::uint64_t seed = 0; seed < 40; ++seed) {
            GenSpec spec;
            spec.seed = seed;
            spec.target_height = 1 + seed % 5;
            spec.config = {logic, EqualityMode::Any};
            const Derivation in = generate_derivation(spec);
            const Formula extra = Formula::forall("x", Q(var("x"), var("y")));
            const Derivation l = weaken_left(in, extra);
            const Derivation r = weaken_right(in, extra, logic);
            ASSERT_TRUE(checks(l, spec.config)) << why(l, spec.config);
            ASSERT_TRUE(checks(r, spec.config)) << why(r, spec.config);
            EXPECT_LE(height(l), height(in));
            EXPECT_LE(height(r), height(in));
        }
    }
}

TEST(ExpandReplMinus, EmitsOneNodePerPosition) {
    for (std::size_t n = 1; n <= 4; ++n) {
        for (const auto &pos : subsets_of_size(n)) {
            const Formula conclusion_target = quad;
            const Formula premise_target = replace_at(quad, pos, d);
            const Sequent conclusion{{eq(c, d), conclusion_target}, {premise_target}};
            const Derivation premise = Derivation::axiom({{eq(c, d), premise_target}, {premise_target}});
            const RuleInstance inst = RuleInstance::replacement(RuleTag::ReplMinus, 0, 1, pos);
            ASSERT_FALSE(check_step(conclusion, inst, std::span(&premise.conclusion, 1), minus));
            const Derivation out = expand_repl_minus(conclusion, inst, premise);
            EXPECT_EQ(count_tag(out, RuleTag::Repl1Minus), n);
            EXPECT_EQ(count_inferences(out), n);
            EXPECT_TRUE(checks(out, one)) << why(out, one);
            EXPECT_TRUE(sequent_equal(out.conclusion, conclusion));
        }
    }
}

TEST(ExpandReplMinus, SinglePositionIsTheInstanceItself) {
    const Sequent conclusion{{eq(c, d), P(c)}, {P(d)}};
    const Derivation premise = Derivation::axiom({{eq(c, d), P(d)}, {P(d)}});
    const Derivation out =
        expand_repl_minus(conclusion, RuleInstance::replacement(RuleTag::ReplMinus, 0, 1, {{0}}), premise);
    EXPECT_EQ(out.rule, RuleInstance::replacement(RuleTag::Repl1Minus, 0, 1, {{0}}));
    EXPECT_EQ(out.conclusion.antecedent, conclusion.antecedent);
}

TEST(ExpandReplMinus, LeftmostPositionRewrittenNearestThePremise) {
    const Sequent conclusion{{eq(c, d), Q(c, c)}, {Q(d, d)}};
    const Derivation premise = Derivation::axiom({{eq(c, d), Q(d, d)}, {Q(d, d)}});
    const Derivation out =
        expand_repl_minus(conclusion, RuleInstance::replacement(RuleTag::ReplMinus, 0, 1, {{1}, {0}}), premise);
    ASSERT_EQ(out.premises.size(), 1u);
    EXPECT_EQ(out.premises[0].rule.positions, (std::vector<Position>{{0}}));
    EXPECT_EQ(out.rule.positions, (std::vector<Position>{{1}}));
}

TEST(ExpandRepl, EmitsOneSingleNodePerPositionAndChecksUnderFullOne) {
    for (std::size_t n = 1; n <= 4; ++n) {
        for (const auto &pos : subsets_of_size(n)) {
            const Formula premise_extra = replace_at(quad, pos, d);
            const Sequent conclusion{{eq(c, d), quad}, {premise_extra}};
            const Derivation premise = Derivation::axiom({{eq(c, d), quad, premise_extra}, {premise_extra}});
            const RuleInstance inst = RuleInstance::replacement(RuleTag::Repl, 0, 1, pos);
            ASSERT_FALSE(check_step(conclusion, inst, std::span(&premise.conclusion, 1),
                                    {Logic::Classical, EqualityMode::Full}));
            const Derivation out = expand_repl(conclusion, inst, premise);
            EXPECT_EQ(count_tag(out, RuleTag::Repl1), n);
            EXPECT_EQ(count_tag(out, RuleTag::Repl), 0u);
            EXPECT_TRUE(checks(out, full_one)) << why(out, full_one);
            EXPECT_TRUE(sequent_equal(out.conclusion, conclusion));
        }
    }
}

TEST(ContrEq, AddsTwoInferences) {
    const Derivation leaf = D("(axiom (seq ((= c d) (= c d) (P c)) ((P c))))");
    const Derivation out = derive_contr_eq(leaf, eq(c, d));
    EXPECT_EQ(count_inferences(out), count_inferences(leaf) + 2);
    EXPECT_EQ(height(out), 2u);
    EXPECT_TRUE(checks(out, one)) << why(out, one);
    EXPECT_TRUE(sequent_equal(out.conclusion, {{eq(c, d), P(c)}, {P(c)}}));
    EXPECT_EQ(out.rule.tag, RuleTag::Ref);
    EXPECT_EQ(out.premises[0].rule.tag, RuleTag::Repl1Minus);
}

TEST(ContrEq, RequiresDuplicate) {
    const Derivation leaf = D("(axiom (seq ((= c d) (P c)) ((P c))))");
    EXPECT_THROW(derive_contr_eq(leaf, eq(c, d)), TransformError);
    EXPECT_THROW(derive_contr_eq(leaf, 0, 0), TransformError);
}

TEST(Symm, AddsThreeInferencesOverAnyDerivation) {
    const Derivation leaf = D("(axiom (seq ((= c d) (P c)) ((P c))))");
    const Derivation out = derive_symm(leaf, eq(c, d));
    EXPECT_EQ(count_inferences(out), 3u);
    EXPECT_TRUE(checks(out, one)) << why(out, one);
    EXPECT_TRUE(sequent_equal(out.conclusion, {{eq(d, c), P(c)}, {P(c)}}));
    EXPECT_EQ(out.conclusion.antecedent[0], eq(d, c));

    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        GenSpec spec;
        spec.seed = seed;
        spec.target_height = 3;
        spec.config = one;
        Derivation in = weaken_left(generate_derivation(spec), eq(fn(c), var("x")));
        const std::size_t idx = in.conclusion.antecedent.size() - 1;
        const Derivation s = derive_symm(in, idx);
        EXPECT_EQ(count_inferences(s), count_inferences(in) + 3);
        EXPECT_TRUE(checks(s, one)) << why(s, one);
        EXPECT_EQ(s.conclusion.antecedent[idx], eq(var("x"), fn(c)));
    }
}

TEST(Symm, TwiceRestoresTheEndsequent) {
    const Derivation leaf = D("(axiom (seq ((= c (f d)) (P c)) ((P c))))");
    const Derivation out = derive_symm(derive_symm(leaf, 0), 0);
    EXPECT_TRUE(checks(out, one)) << why(out, one);
    EXPECT_TRUE(sequent_equal(out.conclusion, leaf.conclusion));
    EXPECT_EQ(count_inferences(out), 6u);
}

TEST(Symm, RejectsNonEquality) {
    const Derivation leaf = D("(axiom (seq ((P c)) ((P c))))");
    EXPECT_THROW(derive_symm(leaf, 0), TransformError);
}

TEST(MinusToFull, UnchangedWithoutReplacements) {
    const Derivation leaf = D("(axiom (seq ((P c)) ((P c))))");
    EXPECT_TRUE(derivations_identical(translate_minus_to_full(leaf), leaf));
}

TEST(MinusToFull, PremiseGainsTheRetainedTarget) {
    const Derivation in = parse_document(read_text(data_path("golden/repl_minus_instance.g3"))).derivations[0].derivation;
    const Derivation out = translate_minus_to_full(in);
    EXPECT_EQ(out.rule.tag, RuleTag::Repl);
    EXPECT_TRUE(sequent_equal(out.premises[0].conclusion, {{eq(c, d), P(d), P(c)}, {P(d)}}));
    EXPECT_TRUE(checks(out, {Logic::Classical, EqualityMode::Full}));
}

TEST(ExpandAndBundle, RoundTripToSingleNode) {
    const Sequent conclusion{{eq(c, d), quad}, {replace_at(quad, quad_positions, d)}};
    const Derivation premise =
        Derivation::axiom({{eq(c, d), replace_at(quad, quad_positions, d)}, {replace_at(quad, quad_positions, d)}});
    const Derivation multi{conclusion, RuleInstance::replacement(RuleTag::ReplMinus, 0, 1, quad_positions), {premise}};
    const Derivation expanded = expand_replacements(multi);
    EXPECT_EQ(count_tag(expanded, RuleTag::Repl1Minus), 4u);
    EXPECT_TRUE(checks(expanded, one));
    const Derivation bundled = bundle_replacements(expanded, Logic::Classical);
    EXPECT_EQ(count_inferences(bundled), 1u);
    EXPECT_TRUE(checks(bundled, minus)) << why(bundled, minus);
    EXPECT_TRUE(sequent_equal(bundled.conclusion, conclusion));
}
