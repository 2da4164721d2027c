#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dadj/calculus.hpp"
#include "dadj/system.hpp"

namespace dadj {

// A named substitution eliminating the adjoint variables: bindings are keyed
// by the unshifted v-atoms and propagate to all shifted instances.
struct Substitution {
    std::string name;
    std::map<Atom, Expr> bindings;
};

// Convenience constructor: v^alpha -> f[alpha] for every component.
Substitution vSubstitution(const std::string& name, int p, const std::vector<Expr>& f);

// Conservation law for the combined system from a verified extended
// characteristic, built on the forward-normalized Lagrangian L = v F.  The
// flux is assembled by path-ordered summation by parts over the atoms of L;
// the remainder R is taken from isDivergence(pr Y(L)) unless supplied.
// Characteristics with parameter components get a compensating flux found by
// an exact linear ansatz; failure raises MissingRemainderError.  The result
// is always re-verified by on-solutions reduction of its divergence.
ConservationLaw noetherFlux(const DifferenceSystem& sys, const ExtendedCharacteristic& Y,
                            std::optional<std::vector<Expr>> R = std::nullopt);

// Same construction applied to the system as written (no forward
// normalization), e.g. for centered schemes.  Raises NotDecomposableError
// when pr Y(L) is not a recognized divergence.
ConservationLaw directFlux(const DifferenceSystem& sys, const ExtendedCharacteristic& Y);

// Try v = u first, then the user candidates, then a built-in menu
// (1/u, 1/u^2, sigma*u, sigma, 1, C); the first substitution whose
// substituted adjoint system reduces to zero modulo the original system
// wins.  Classification: identity -> strict, lattice-dependent witness ->
// weak, otherwise quasi.
SelfAdjointness classifySelfAdjointness(const DifferenceSystem& sys,
                                        const std::vector<Substitution>& candidates = {});

// Sufficient self-adjointness condition for a1(n) u2 + a2(n) u1 + a3(n) u0:
// a3(n+2) = a1(n), a2(n+1) = a2(n), a1(n) = a3(n), each checked identically.
bool checkO2deCondition(const Expr& a1, const Expr& a2, const Expr& a3);

// Eliminate the adjoint variables from a combined-system law.  f must be a
// solution of the adjoint system modulo the original one (this covers both
// self-adjointness witnesses and particular adjoint solutions); otherwise
// InvalidSubstitutionError.  The result certifies the original system and is
// re-verified.
ConservationLaw transfer(const DifferenceSystem& sys, const ConservationLaw& cl,
                         const Substitution& f);

// Every flux component reduces to zero modulo the certified system.
bool isTrivial(const DifferenceSystem& sys, const ConservationLaw& cl);

// pr X applied componentwise to the fluxes; Q must be a symmetry of the
// certified system, enforced by re-verification (InternalConsistencyError).
ConservationLaw applySymmetryToLaw(const DifferenceSystem& sys, const Characteristic& Q,
                                   const ConservationLaw& cl);

// Componentwise reduction of a - b (or a + b: one global sign flip is
// allowed) to zero modulo the system certified by both laws.
bool lawsEquivalent(const DifferenceSystem& sys, const ConservationLaw& a,
                    const ConservationLaw& b);

}  // namespace dadj
