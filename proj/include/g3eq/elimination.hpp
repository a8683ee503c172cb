#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "g3eq/calculus.hpp"
#include "g3eq/syntax.hpp"

namespace g3eq {

// Induction context for removing one Repl1 inference. With pairs q_i, p_i,
// context variables u_i and template A, the derivation to transform proves
//   q1=p1, ..., qn=pn, s=r, A[u/q, v/s], A[u/p, v/r], gamma => delta
// and the result proves the same sequent without A[u/p, v/r].
struct ReplContext {
    std::vector<std::pair<Term, Term>> pairs;
    std::vector<std::string> context_vars;
    Term s = Term::constant("s");
    Term r = Term::constant("r");
    std::string v = "v";
    Formula templ = Formula::bottom();
    std::vector<Formula> gamma;
    std::vector<Formula> delta;
};

Sequent assemble_premise(const ReplContext &ctx);
Sequent assemble_conclusion(const ReplContext &ctx);
// Throws TransformError when a variable does not occur exactly once in the
// template, the variables are not distinct or one of them occurs in a term.
void validate(const ReplContext &ctx);

// How often each shape of the last inference was met during elimination.
struct EliminationStats {
    std::map<std::string, std::size_t> cases;
    std::size_t eliminated = 0;  // Repl1 inferences removed

    std::size_t total(const std::string &name) const;
};

// `d` uses Repl1- as its only replacement rule and proves
// assemble_premise(ctx). Returns a derivation of assemble_conclusion(ctx) in
// the same fragment.
Derivation eliminate_repl1(const Derivation &d, const ReplContext &ctx, Logic logic, const NameSet &reserved = {},
                           EliminationStats *stats = nullptr);

// Removes every Repl and Repl1 inference. Derivations without them are
// returned as they are; otherwise every replacement in the output is Repl1-.
Derivation eliminate_all_repl(const Derivation &d, Logic logic, const NameSet &reserved = {},
                              EliminationStats *stats = nullptr);

// eliminate_all_repl followed by bundle_replacements.
Derivation translate_full_to_minus(const Derivation &d, Logic logic, const NameSet &reserved = {},
                                   EliminationStats *stats = nullptr);

}  // namespace g3eq
