#pragma once

#include <string>
#include <vector>

#include "bvinf/params.hpp"
#include "bvinf/series.hpp"

namespace bvinf {

/// Raised for malformed expression text (CLI maps it to exit code 2).
class ParseError : public std::runtime_error {
  public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

/// Expression grammar (whitespace-insensitive):
///   element := ['-'] term (('+'|'-') term)*
///   term    := factor ('*' factor)*
///   factor  := rational | '(' ['-'] rational ')' | name ['^' ['-'] int]
/// where `name` is a declared generator or the reserved series variable 'h',
/// and `rational` is `p` or `p/q`. Examples: "3/2*t^2*dt + (-1)*h^1*1",
/// "t^2 - h*1". The unit monomial renders as "1".

/// Parse an element; 'h' is rejected.
AlgebraElement parse_element(const SigPtr& sig, const std::string& text);
/// Parse a Laurent series; 'h' carries the (possibly negative) exponent.
LaurentSeries parse_laurent(const SigPtr& sig, const std::string& text);
/// Parse a single monomial with coefficient 1.
Monomial parse_monomial(const SigPtr& sig, const std::string& text);
/// Parse a scalar Laurent polynomial in h (no generators allowed).
ScalarLaurent parse_scalar_laurent(const std::string& text);

std::string scalar_laurent_to_string(const ScalarLaurent& s);

/// One parsed term of a differential-operator expression:
/// coefficient * d/d<gen> ... d/d<gen>  (rightmost derivative acts first).
struct ParsedOperatorTerm {
    AlgebraElement coeff;
    std::vector<std::size_t> derivs;
};

/// Operator grammar: sum of terms `coeff_factors d/d<gen> ...` with optional
/// '*' separators; "0" denotes the zero operator.
std::vector<ParsedOperatorTerm> parse_operator_terms(const SigPtr& sig, const std::string& text);

}  // namespace bvinf
