#pragma once

#include <optional>
#include <vector>

#include "dadj/system.hpp"

namespace dadj {

// pr X applied to e: sum over dependent atoms a = (alpha, J) of
// S_J(Q^alpha) * d e/d a, plus parameter-direction terms rho * d e/d param.
Expr prolongApply(const Characteristic& Q, const Expr& e);
// Same, with the v-components of an extended characteristic included.
Expr prolongApply(const ExtendedCharacteristic& Y, const Expr& e);

// Difference Euler operator E_{u^alpha} = sum_J S_{-J} d/du^alpha_J.
Expr euler(const Expr& e, VarClass cls, int comp);

// Higher Euler operator E_{u_J} = sum_{I >= 0} S_{-I} d/du_{I+J}; J >= 0.
Expr higherEuler(const Expr& e, VarClass cls, int comp, const MultiIndex& J);

// Div P = sum_i (S_i - id) P^i.
Expr divergence(const std::vector<Expr>& P);

// If e is a difference divergence, return a remainder tuple R with
// Div R = e; otherwise nullopt.  Constructive only for p = 1; for p >= 2 only
// the identically-zero case yields R (= zero tuple).
std::optional<std::vector<Expr>> isDivergence(const Expr& e, int p);

// Adjoint system F*_alpha = E_{u^alpha}(v^beta F_beta) in doubled variables.
// Requires a forward-normalized system.
DifferenceSystem adjointSystem(const DifferenceSystem& sys);

// Formal adjoint sum_J (b_J, J) -> sum_J (S_{-J} b_J, -J); verified through
// the Euler identity on v*B(u) - u*B*(v).
DifferenceOperator adjointOperator(const DifferenceOperator& B);

// L = sum_alpha v^alpha_0 F_alpha.  Requires forward-normalized input.
Expr lagrangian(const DifferenceSystem& sys);

// Shift every equation forward by the minimal J >= 0 removing negative shift
// components; solved forms are shifted along.
DifferenceSystem forwardNormalize(const DifferenceSystem& sys);

// Solve F = 0 for the atom a; requires the numerator of F to have degree 1
// in a.  Throws Error otherwise.
Expr solveFor(const Expr& F, const Atom& a);

// On-solutions reduction: rewrite rules derived from the solved forms of a
// system (plus, optionally, of its adjoint), applied until no reducible atom
// remains.  An expression vanishes on solutions iff it reduces to zero.
class ReductionContext {
  public:
    // Rules for the original system only.
    static ReductionContext forSystem(const DifferenceSystem& sys);
    // Rules for the combined system (original + adjoint).
    static ReductionContext forCombined(const DifferenceSystem& sys);

    Expr reduce(const Expr& e, int depthLimit = 4000) const;

    struct Rule {
        VarClass cls;
        int comp;
        MultiIndex anchor;  // shift of the solved atom
        Expr rhs;
        enum class Kind { Quad, ColForward, ColBackward } kind;
        // Quad rules: eps is a sign vector; the rule fires at shift s when
        // s_i >= anchor_i for eps_i = +1 and s_i <= anchor_i - 1 for
        // eps_i = -1, leaving a cross of bands of free initial data.
        MultiIndex eps;
        int axis = 0;       // column rules: lattice direction being reduced
        int threshold = 0;  // column rules: bound on shift[axis]
    };
    const std::vector<Rule>& rules() const { return rules_; }

  private:
    std::vector<Rule> rules_;
    void addRulesFor(const Expr& F, VarClass cls, int comp,
                     const std::optional<Atom>& declared);
};

}  // namespace dadj
