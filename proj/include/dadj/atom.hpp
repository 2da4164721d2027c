#pragma once

#include <compare>
#include <string>
#include <tuple>

#include "dadj/multiindex.hpp"

namespace dadj {

// Which class of dependent variable an atom belongs to.  The v class holds
// the adjoint variables.
enum class VarClass { U = 0, V = 1 };

inline const char* varClassName(VarClass c) { return c == VarClass::U ? "u" : "v"; }

// A single indeterminate of the expression algebra.  Expressions are rational
// functions of finitely many atoms, times parity-sign factors which are kept
// on the monomials, not here.
struct Atom {
    enum class Kind {
        Lattice = 0,  // lattice symbol n^i
        Param = 1,    // named constant parameter
        Func = 2,     // named coefficient function of n, with a shift offset
        Dep = 3,      // dependent variable atom u^alpha_J / v^alpha_J
    };

    Kind kind = Kind::Lattice;
    int index = 0;               // Lattice: direction
    std::string name;            // Param, Func
    VarClass cls = VarClass::U;  // Dep
    int comp = 0;                // Dep: component alpha
    MultiIndex shift;            // Dep, Func

    static Atom lattice(int direction) {
        Atom a;
        a.kind = Kind::Lattice;
        a.index = direction;
        return a;
    }
    static Atom param(std::string n) {
        Atom a;
        a.kind = Kind::Param;
        a.name = std::move(n);
        return a;
    }
    static Atom func(std::string n, MultiIndex j) {
        Atom a;
        a.kind = Kind::Func;
        a.name = std::move(n);
        a.shift = std::move(j);
        return a;
    }
    static Atom dep(VarClass c, int component, MultiIndex j) {
        Atom a;
        a.kind = Kind::Dep;
        a.cls = c;
        a.comp = component;
        a.shift = std::move(j);
        return a;
    }

    bool isDep() const { return kind == Kind::Dep; }
    bool isDep(VarClass c) const { return kind == Kind::Dep && cls == c; }

    // Structural total order; this fixes the deterministic monomial order.
    auto key() const { return std::tie(kind, index, name, cls, comp, shift); }
    bool operator==(const Atom& o) const { return key() == o.key(); }
    bool operator<(const Atom& o) const { return key() < o.key(); }
};

}  // namespace dadj
