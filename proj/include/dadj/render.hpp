#pragma once

#include <string>
#include <vector>

#include "dadj/expr.hpp"

namespace dadj {

// Display names for lattice directions and u-components.  The adjoint
// variables render as "v" (single component) or "v1", "v2", ...
struct NameTable {
    std::vector<std::string> latticeNames;    // by direction
    std::vector<std::string> componentNames;  // by u-component

    static NameTable defaults(int p, int q = 1);
    std::string lattice(int direction) const;
    std::string component(VarClass cls, int comp) const;
};

// Text form of an expression in the equation-file grammar; parsing the result
// back normalizes equal to the input.
std::string renderExpr(const Expr& e, const NameTable& names);
std::string renderPoly(const Polynomial& p, const NameTable& names);

}  // namespace dadj
