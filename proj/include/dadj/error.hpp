#pragma once

#include <stdexcept>
#include <string>

namespace dadj {

// Base class for every error raised by the library.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Expression cannot be brought to canonical form (zero denominator etc.).
struct MalformedExpressionError : Error {
    using Error::Error;
};

// A substitution introduced a division by an identically-zero expression.
struct SubstitutionSingularError : Error {
    using Error::Error;
};

// Numeric evaluation hit a vanishing denominator.
struct EvaluationSingularError : Error {
    explicit EvaluationSingularError(const std::string& what, std::string offending = {})
        : Error(what), offending_subexpression(std::move(offending)) {}
    std::string offending_subexpression;
};

// Symbolic and numeric zero tests disagreed; indicates a normalization bug.
struct InternalConsistencyError : Error {
    using Error::Error;
};

// Parse failure with source position.
struct ParseError : Error {
    ParseError(const std::string& what, int line, int column)
        : Error(what + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")"),
          line(line), column(column) {}
    int line = 0;
    int column = 0;
};

// reduce_mod ran past its substitution budget.
struct ReductionDepthError : Error {
    using Error::Error;
};

// Operation requires a forward-normalized system.
struct NotForwardNormalizedError : Error {
    using Error::Error;
};

// Solution iteration stepped on a vanishing denominator.
struct SingularOrbitError : Error {
    explicit SingularOrbitError(const std::string& what) : Error(what) {}
};

// pr Y(L) is not a recognized divergence and no remainder was supplied.
struct MissingRemainderError : Error {
    using Error::Error;
};

// Summation-by-parts decomposition failed; caller may fall back to the
// forward-normalized Noether route.
struct NotDecomposableError : Error {
    using Error::Error;
};

// A substitution failed verification against the adjoint system.
struct InvalidSubstitutionError : Error {
    using Error::Error;
};

}  // namespace dadj
