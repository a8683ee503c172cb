#pragma once

#include <cstddef>

#include "g3eq/calculus.hpp"
#include "g3eq/syntax.hpp"

namespace g3eq {

// A transform was applied to a derivation that does not meet its
// precondition.
class TransformError : public Error {
public:
    using Error::Error;
};

// Appends `f` to the antecedent of every node. Eigenvariables that occur free
// in `f` are renamed in their subtree to names outside `reserved` and the
// derivation. The tree shape, and hence the height, is unchanged.
Derivation weaken_left(const Derivation &d, const Formula &f, const NameSet &reserved = {});

// Succedent counterpart. Under minimal and intuitionistic logic the premises
// of R-> and R-forall drop the succedent context and are left untouched.
Derivation weaken_right(const Derivation &d, const Formula &f, Logic logic, const NameSet &reserved = {});

// One-occurrence expansion of a multi-position Repl- inference: n stacked
// Repl1- nodes, the occurrence at the lexicographically smallest position
// being rewritten first (topmost).
Derivation expand_repl_minus(const Sequent &conclusion, const RuleInstance &inst, const Derivation &premise);

// Same for Repl: n Repl1 nodes, each preceded by a left weakening with the
// partially rewritten copy of the target.
Derivation expand_repl(const Sequent &conclusion, const RuleInstance &inst, const Derivation &premise,
                       const NameSet &reserved = {});

// Contraction of a duplicated equality s=r at antecedent indices keep/drop:
// Repl1- turns the dropped copy into s=s, which Ref removes.
Derivation derive_contr_eq(const Derivation &d, std::size_t keep, std::size_t drop);
// Uses the first two antecedent occurrences of `eq`.
Derivation derive_contr_eq(const Derivation &d, const Formula &eq);

// From a derivation of s=r, G => D, a derivation of r=s, G => D with r=s at
// the index s=r had: weakening by r=r, two Repl1- steps and Ref.
Derivation derive_symm(const Derivation &d, std::size_t index, const NameSet &reserved = {});
// Uses the first antecedent occurrence of `eq`.
Derivation derive_symm(const Derivation &d, const Formula &eq, const NameSet &reserved = {});

// Repl- and Repl1- nodes become Repl and Repl1 nodes whose premise derivation
// is weakened by the retained target formula.
Derivation translate_minus_to_full(const Derivation &d, const NameSet &reserved = {});

// Every Repl- and Repl node becomes a chain of single-position nodes; a
// single-position Repl- or Repl is retagged Repl1- or Repl1.
Derivation expand_replacements(const Derivation &d, const NameSet &reserved = {});

// Merges stacked replacement-minus nodes that rewrite the same target with
// the same equality into single Repl- nodes.
Derivation bundle_replacements(const Derivation &d, Logic logic);

}  // namespace g3eq
