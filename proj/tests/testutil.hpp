#pragma once

#include <random>

#include "dadj/expr.hpp"

namespace tu {

using namespace dadj;

// p = 1 shorthands
inline Expr U(int k) { return Expr::dep(VarClass::U, 0, MultiIndex{k}); }
inline Expr V(int k) { return Expr::dep(VarClass::V, 0, MultiIndex{k}); }
inline Atom Ua(int k) { return Atom::dep(VarClass::U, 0, MultiIndex{k}); }
inline Atom Va(int k) { return Atom::dep(VarClass::V, 0, MultiIndex{k}); }
inline Expr N() { return Expr::lattice(0); }
inline Expr Q(long num, long den = 1) { return Expr::rational(mpq_class(num, den)); }
inline Expr SigN() { return Expr::sign(1u); }  // (-1)^n, p = 1

// p = 2 shorthands (directions: 0 = m, 1 = n)
inline Expr U2(int i, int j) { return Expr::dep(VarClass::U, 0, MultiIndex{i, j}); }
inline Expr V2(int i, int j) { return Expr::dep(VarClass::V, 0, MultiIndex{i, j}); }
inline Atom U2a(int i, int j) { return Atom::dep(VarClass::U, 0, MultiIndex{i, j}); }
inline Expr M2() { return Expr::lattice(0); }
inline Expr N2() { return Expr::lattice(1); }
inline Expr SigMN() { return Expr::sign(3u); }  // (-1)^(m+n)

// Random rational-function generator over a small atom pool.
class ExprGen {
  public:
    explicit ExprGen(unsigned seed, int p = 1, bool useV = true)
        : rng_(seed), p_(p), useV_(useV) {}

    Expr atom() {
        switch (pick(5)) {
            case 0:
                return Expr::dep(VarClass::U, 0, randomShift());
            case 1:
                return useV_ ? Expr::dep(VarClass::V, 0, randomShift())
                             : Expr::dep(VarClass::U, 0, randomShift());
            case 2:
                return p_ == 1 ? Expr::lattice(0) : Expr::lattice(pick(p_));
            case 3:
                return Expr::rational(mpq_class(static_cast<long>(pick(9)) - 4, 1 + pick(3)));
            default:
                return Expr::param("alpha");
        }
    }

    Expr expr(int depth = 3) {
        if (depth == 0) return atom();
        switch (pick(6)) {
            case 0:
                return expr(depth - 1) + expr(depth - 1);
            case 1:
                return expr(depth - 1) - expr(depth - 1);
            case 2:
            case 3:
                return expr(depth - 1) * expr(depth - 1);
            case 4: {
                Expr d = expr(depth - 1);
                if (d.isZeroFast()) d = atom() + Q(1);
                if (d.isZeroFast()) return expr(depth - 1);
                return expr(depth - 1) / d;
            }
            default:
                return expr(depth - 1).pow(1 + static_cast<int>(pick(2)));
        }
    }

    MultiIndex randomShift() {
        std::vector<int> c(static_cast<size_t>(p_));
        for (auto& x : c) x = static_cast<int>(pick(5)) - 2;
        return MultiIndex(c);
    }

    unsigned pick(unsigned n) { return std::uniform_int_distribution<unsigned>(0, n - 1)(rng_); }

  private:
    std::mt19937 rng_;
    int p_;
    bool useV_ = true;
};

}  // namespace tu
