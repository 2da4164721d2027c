#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dadj/calculus.hpp"
#include "dadj/system.hpp"

namespace dadj {

struct SymmetryVerdict {
    enum class Status {
        Witness,       // explicit operator with pr X(F) = B(F) identically
        Reduced,       // pr X(F) reduces to zero on solutions
        NotSymmetric,  // nonzero residual on solutions, counterexample attached
        Inconclusive,  // no solved forms and no witness found
    };
    Status status = Status::Inconclusive;
    std::optional<OperatorMatrix> witness;
    std::string counterexample;  // point with nonzero residual, human-readable
    std::string detail;

    bool symmetric() const { return status == Status::Witness || status == Status::Reduced; }
};

// Symmetry criterion: pr X(F_alpha) must vanish on solutions.  Tries an
// explicit operator witness first, then on-solutions reduction; a nonzero
// reduced residual is turned into a concrete counterexample by evaluating it
// at random initial data (which always extends to a solution).
SymmetryVerdict checkSymmetry(const DifferenceSystem& sys, const Characteristic& Q,
                              unsigned seed = 0);

// Find B with G_alpha = sum_beta B_{alpha beta}(F_beta).  Tries, in order:
// (1) diagonal multipliers lambda = G_alpha / F_alpha certified by exact
// division (the denominator picked up by the quotient must not vanish on
// solutions); (2) a bounded-stencil ansatz sum_{|J| <= radius} b_J S_J with
// coefficients spanned by {1, n^i, (-1)^(n^1+...+n^p)} and the unknowns
// solved exactly by equating normalized polynomial coefficients.
// radius < 0 means "stencil width of G".
std::optional<OperatorMatrix> findOperator(const DifferenceSystem& sys,
                                           const std::vector<Expr>& G, int radius = -1);

// Q*^alpha = -sum_beta B*_{beta alpha}(v^beta); the combined characteristic is
// checked against the variational criterion pr Y(L) = Div R (constructively
// for p = 1, through Euler annihilation for p >= 2).
ExtendedCharacteristic extendCharacteristic(const DifferenceSystem& sys, const Characteristic& Q,
                                            const OperatorMatrix& B);

// Component beta of [Q1, Q2] is pr X1(Q2^beta) - pr X2(Q1^beta); parameter
// components bracket the same way through parameter derivatives.
Characteristic lieBracket(const Characteristic& Q1, const Characteristic& Q2);

}  // namespace dadj
