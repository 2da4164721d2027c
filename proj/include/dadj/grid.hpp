#pragma once

#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "dadj/system.hpp"

namespace dadj {

// Exact values of one variable class over a rectangular index window.  Every
// window point is filled: computed entries satisfy their defining solved form
// exactly, free entries are initial data.  An equation instance whose whole
// stencil lies inside the window is therefore satisfied exactly on the grid.
struct SolutionGrid {
    int p = 1;
    int q = 1;
    VarClass cls = VarClass::U;
    std::vector<int> lo, hi;                              // inclusive bounds
    std::map<std::vector<int>, std::vector<mpq_class>> values;  // point -> per component
    std::set<std::pair<int, std::vector<int>>> freeEntries;     // (comp, point)

    bool inWindow(const std::vector<int>& x) const;
    const mpq_class* find(int comp, const std::vector<int>& x) const;
};

// Grid-backed evaluation of expressions at lattice points.
struct EvalEnv {
    const SolutionGrid* u = nullptr;
    const SolutionGrid* v = nullptr;
    std::map<std::string, mpq_class> params;
    unsigned funcSeed = 0;  // named coefficient functions get deterministic values

    mpq_class funcValue(const std::string& name, const std::vector<int>& point) const;
    // Every dependent atom of e lands on a stored grid entry when anchored at x.
    bool covers(const Expr& e, const std::vector<int>& x) const;
    mpq_class evalAt(const Expr& e, const std::vector<int>& x) const;
};

using InitialData = std::function<mpq_class(int comp, const std::vector<int>& point)>;

// Fill a window by exact forward iteration of the solved forms; entries whose
// dependencies leave the window come from `initial`.  Requires solved forms
// whose right-hand sides only reach lexicographically backwards.
SolutionGrid iterateSolution(const DifferenceSystem& sys, const EvalEnv& env,
                             const InitialData& initial, const std::vector<int>& lo,
                             const std::vector<int>& hi);

// Same for the adjoint system, solved for the lexicographically leading
// v-atom of each adjoint equation; coefficients are read off env.u.
SolutionGrid iterateAdjoint(const DifferenceSystem& sys, const EvalEnv& env,
                            const InitialData& initial, const std::vector<int>& lo,
                            const std::vector<int>& hi);

// Exact evaluation of Div P over a box of base points.
struct LawCheck {
    long points = 0;
    long skipped = 0;  // singular flux denominators
    mpq_class maxAbs = 0;
    std::string firstBad;  // first point with nonzero residual
    bool exact() const { return maxAbs == 0; }
};
LawCheck checkDivergence(const std::vector<Expr>& fluxes, const EvalEnv& env,
                         const std::vector<int>& boxLo, const std::vector<int>& boxHi);

struct VerifySettings {
    long steps = 20;
    int orbits = 5;
    unsigned seed = 0;
    long magnitude = 5;  // initial data drawn from nonzero rationals <= this
};

// Random-orbit verification: iterate the system (and, for combined laws, its
// adjoint) from random rational initial data and check Div P = 0 exactly at
// margin-interior points.  Singular orbits are retried with fresh data a
// bounded number of times; exhaustion marks the outcome inconclusive.
struct VerifyOutcome {
    int orbits = 0;
    long points = 0;
    int retries = 0;
    bool exact = true;
    bool inconclusive = false;
    std::string detail;
    bool verified() const { return exact && !inconclusive && orbits > 0; }
};
VerifyOutcome verifyConservationLaw(const DifferenceSystem& sys, const ConservationLaw& cl,
                                    const VerifySettings& settings);

}  // namespace dadj
