#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "g3eq/calculus.hpp"
#include "g3eq/syntax.hpp"

namespace g3eq {

// Malformed input; the message starts with "line:column:".
class ParseError : public Error {
public:
    ParseError(std::size_t line, std::size_t column, const std::string &message);
    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

struct NamedDerivation {
    std::string name;
    Derivation derivation;
};

struct Goal {
    std::string name;
    Sequent sequent;
};

//   (signature (fun f 1) (pred P 1) (const c))
//   (config logic=c eq=minus)
//   (derivation name node)*  (goal name sequent)*
struct ProofDocument {
    Signature signature;
    CalculusConfig config;
    std::vector<NamedDerivation> derivations;
    std::vector<Goal> goals;
};

ProofDocument parse_document(std::string_view text);
std::string print_document(const ProofDocument &doc);

// Single items against a signature, mainly for tests and goal literals.
Term parse_term(std::string_view text, const Signature &sig);
Formula parse_formula(std::string_view text, const Signature &sig);
Sequent parse_sequent(std::string_view text, const Signature &sig);
Derivation parse_derivation(std::string_view text, const Signature &sig);
std::string print_derivation(const Derivation &d, std::size_t indent = 0);

bool documents_equal(const ProofDocument &a, const ProofDocument &b);
bool derivations_identical(const Derivation &a, const Derivation &b);

}  // namespace g3eq
