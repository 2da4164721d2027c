#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dadj/expr.hpp"

namespace dadj {

// One equation written as F = 0, optionally with a declared solved form
// u^alpha_J = rhs for one of its atoms (used for on-solutions reduction and
// for forward iteration).
struct Equation {
    Expr lhs;  // F
    std::optional<Atom> solvedAtom;
    std::optional<Expr> solvedRhs;
};

struct DifferenceSystem {
    int p = 1;  // lattice dimension
    int q = 1;  // number of u-components
    std::vector<Equation> equations;

    bool hasSolvedForms() const {
        for (const auto& e : equations)
            if (!e.solvedAtom) return false;
        return !equations.empty();
    }

    // No equation touches a negative shift component of any dependent atom.
    bool forwardNormalized() const {
        for (const auto& e : equations)
            for (const auto& a : e.lhs.atoms())
                if (a.isDep() && !a.shift.allGE(0)) return false;
        return true;
    }
};

// Sum of shift operators with expression coefficients: sum_J b_J(n,[u]) S_J.
struct DifferenceOperator {
    std::vector<std::pair<Expr, MultiIndex>> terms;

    static DifferenceOperator multiplier(const Expr& coeff, int p) {
        DifferenceOperator b;
        if (!coeff.isZeroFast()) b.terms.emplace_back(coeff, MultiIndex::zero(p));
        return b;
    }

    Expr apply(const Expr& e) const {
        Expr r;
        for (const auto& [c, J] : terms) r = r + c * e.shifted(J);
        return r;
    }

    bool isZero() const { return terms.empty(); }
};

// q x q matrix of difference operators (row = equation index of pr X(F),
// column = equation index of F).
struct OperatorMatrix {
    int q = 1;
    std::vector<DifferenceOperator> entries;  // row-major, q*q

    static OperatorMatrix zero(int q) {
        OperatorMatrix m;
        m.q = q;
        m.entries.resize(static_cast<size_t>(q) * static_cast<size_t>(q));
        return m;
    }
    DifferenceOperator& at(int row, int col) {
        return entries[static_cast<size_t>(row) * static_cast<size_t>(q) + static_cast<size_t>(col)];
    }
    const DifferenceOperator& at(int row, int col) const {
        return entries[static_cast<size_t>(row) * static_cast<size_t>(q) + static_cast<size_t>(col)];
    }
};

// Evolutionary vector field data: one expression per u-component, plus
// optional parameter-direction components (pure functions of parameters).
struct Characteristic {
    std::string name;
    std::vector<Expr> q;                                   // per u-component
    std::vector<std::pair<std::string, Expr>> paramComps;  // parameter name -> rho
};

// Characteristic extended to the adjoint variables: Q*^alpha = -B*_{ba}(v^b).
struct ExtendedCharacteristic {
    Characteristic base;
    std::vector<Expr> qstar;  // per v-component
};

enum class Certifies { Original, Combined };

struct ConservationLaw {
    std::string id;
    std::vector<Expr> fluxes;     // p components
    std::vector<Expr> remainder;  // R, p components
    Certifies certifies = Certifies::Combined;
    std::string characteristicName;
    std::string substitutionName;  // empty if none applied
};

enum class SelfAdjointKind { Strict, Quasi, Weak, NoneFound };

struct SelfAdjointness {
    SelfAdjointKind kind = SelfAdjointKind::NoneFound;
    std::string witnessName;             // e.g. "v = 1/u^2"
    std::map<Atom, Expr> witness;        // v-atom bindings (empty if none found)
};

}  // namespace dadj
