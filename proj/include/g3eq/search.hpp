#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "g3eq/calculus.hpp"
#include "g3eq/syntax.hpp"

namespace g3eq {

struct SearchBudget {
    std::size_t max_depth = 6;
    // Witness candidates for quantifier and equality rules; empty means the
    // subterms of the goal.
    std::vector<Term> term_universe;
    // Ref and replacement inferences allowed on one branch.
    std::size_t max_repl_per_branch = 3;
    // Hard stop on visited sequents per search, 0 for none.
    std::size_t max_nodes = 5'000'000;
};

enum class SearchOutcome { Found, DepthExhausted, NodeLimit };

struct SearchResult {
    SearchOutcome outcome = SearchOutcome::DepthExhausted;
    std::optional<Derivation> derivation;  // set iff Found; checks under the config
    std::size_t nodes = 0;
    std::size_t depth = 0;  // bound at which the proof was found, or last bound tried

    bool found() const { return outcome == SearchOutcome::Found; }
};

std::string_view outcome_name(SearchOutcome outcome);

// Every subterm of every formula of the sequent, in first-seen order.
std::vector<Term> subterms(const Sequent &s);

// Iterative deepening backward search. Invertible rules are applied eagerly;
// witnesses, Ref terms and replacement positions are enumerated. Failure means
// only that nothing was found within the budget.
SearchResult bounded_prove(const Sequent &goal, const CalculusConfig &config, const SearchBudget &budget);

struct EquivReport {
    SearchResult full;
    SearchResult minus;

    bool found_full() const { return full.found(); }
    bool found_minus() const { return minus.found(); }
    bool one_sided() const { return found_full() != found_minus(); }
};

// Searches the goal with Repl and with Repl- under the same budget.
EquivReport equiv_oracle(const Sequent &goal, const SearchBudget &budget, Logic logic = Logic::Classical);

struct GenSpec {
    std::uint64_t seed = 0;
    Signature signature;  // empty: constants c d, function f/1, predicates P/1 Q/2
    std::size_t target_height = 3;
    double repl_density = 0.3;
    CalculusConfig config;
    std::size_t max_retries = 200;
};

Signature default_signature();

class GenerationError : public Error {
public:
    using Error::Error;
};

// Seeded forward construction of a derivation of height target_height that
// checks under spec.config. At each inference a replacement rule enabled by
// the config is chosen with probability repl_density.
Derivation generate_derivation(const GenSpec &spec);

}  // namespace g3eq
