#pragma once

#include "dadj/system.hpp"
#include "testutil.hpp"

// The worked systems used across the test suite.
namespace corpus {

using namespace dadj;
using namespace tu;

inline DifferenceSystem shift2() {
    DifferenceSystem s;
    s.p = 1;
    s.q = 1;
    s.equations.push_back({U(2) - U(0), Ua(2), U(0)});
    return s;
}

// u_{n+2} u_n - u_{n+1}^2 = 0
inline DifferenceSystem geometric() {
    DifferenceSystem s;
    s.p = 1;
    s.q = 1;
    s.equations.push_back({U(2) * U(0) - U(1).pow(2), Ua(2), U(1).pow(2) / U(0)});
    return s;
}

// u_{n+2} = u_n u_{n+1} / (2u_n - u_{n+1})
inline DifferenceSystem recip() {
    DifferenceSystem s;
    s.p = 1;
    s.q = 1;
    s.equations.push_back(
        {U(2) - U(0) * U(1) / (Q(2) * U(0) - U(1)), Ua(2), U(0) * U(1) / (Q(2) * U(0) - U(1))});
    return s;
}

// (1/2 - n) u_{n+2} + (2n - 1/2) u_{n+1} - n u_n = 0
inline DifferenceSystem linear3() {
    DifferenceSystem s;
    s.p = 1;
    s.q = 1;
    Expr F = (Q(1, 2) - N()) * U(2) + (Q(2) * N() - Q(1, 2)) * U(1) - N() * U(0);
    s.equations.push_back({F, Ua(2), {}});
    return s;
}

inline Expr coefFn(const char* name, int shift) { return Expr::func(name, MultiIndex{shift}); }

// a1(n) u_{n+2} + a2(n) u_{n+1} + a3(n) u_n = 0 with abstract coefficients
inline DifferenceSystem o2de() {
    DifferenceSystem s;
    s.p = 1;
    s.q = 1;
    Expr F = coefFn("a1", 0) * U(2) + coefFn("a2", 0) * U(1) + coefFn("a3", 0) * U(0);
    s.equations.push_back({F, Ua(2), {}});
    return s;
}

inline Expr alpha() { return Expr::param("alpha"); }
inline Expr beta() { return Expr::param("beta"); }

// (u00 - u11)(u10 - u01) + beta - alpha = 0 (lattice potential KdV / H1)
inline DifferenceSystem h1() {
    DifferenceSystem s;
    s.p = 2;
    s.q = 1;
    Expr F = (U2(0, 0) - U2(1, 1)) * (U2(1, 0) - U2(0, 1)) + beta() - alpha();
    s.equations.push_back({F, Atom::dep(VarClass::U, 0, MultiIndex{1, 1}), {}});
    return s;
}

// alpha (u_{1,0} + u_{-1,0}) - beta (u_{0,1} + u_{0,-1}) = 0
inline DifferenceSystem wave() {
    DifferenceSystem s;
    s.p = 2;
    s.q = 1;
    Expr F = alpha() * (U2(1, 0) + U2(-1, 0)) - beta() * (U2(0, 1) + U2(0, -1));
    s.equations.push_back({F, {}, {}});
    return s;
}

inline Characteristic charac(const std::string& name, Expr q) { return {name, {std::move(q)}, {}}; }

}  // namespace corpus
