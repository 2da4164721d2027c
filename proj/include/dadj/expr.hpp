#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>

#include "dadj/poly.hpp"

namespace dadj {

// Assignment of values to atoms for exact evaluation.  Lattice symbols must
// be integers; they feed the parity signs.
struct Assignment {
    std::map<Atom, mpq_class> values;
    // Lattice values by direction; defaults to 0 for unset directions.
    std::map<int, long> lattice;

    void set(const Atom& a, const mpq_class& v);
    void setLattice(int direction, long v);
};

// Immutable rational function of the atoms, kept in canonical form:
// a quotient of two expanded polynomials with the sigma-free denominator
// normalized to coprime integer coefficients and positive leading
// coefficient, and no common polynomial factor.
class Expr {
  public:
    Expr() : num_(), den_(Polynomial::constant(1)) {}  // zero
    Expr(const Polynomial& num, const Polynomial& den);

    static Expr rational(const mpq_class& q) { return Expr(Polynomial::constant(q), Polynomial::constant(1)); }
    static Expr integer(long v) { return rational(mpq_class(v)); }
    static Expr atom(const Atom& a) { return Expr(Polynomial::atom(a), Polynomial::constant(1)); }
    static Expr lattice(int direction) { return atom(Atom::lattice(direction)); }
    static Expr param(const std::string& name) { return atom(Atom::param(name)); }
    static Expr dep(VarClass c, int comp, const MultiIndex& J) { return atom(Atom::dep(c, comp, J)); }
    static Expr func(const std::string& name, const MultiIndex& J) { return atom(Atom::func(name, J)); }
    // (-1)^(c0 + sum over mask directions of n^i)
    static Expr sign(std::uint32_t mask, bool odd_constant = false) {
        return Expr(Polynomial::sign(mask, odd_constant), Polynomial::constant(1));
    }

    const Polynomial& num() const { return num_; }
    const Polynomial& den() const { return den_; }

    bool isZeroFast() const { return num_.isZero(); }
    bool isOne() const;
    bool isRationalConstant() const { return num_.isConstant() && den_.isConstant(); }
    mpq_class rationalValue() const { return num_.constantValue() / den_.constantValue(); }

    Expr operator+(const Expr& o) const;
    Expr operator-(const Expr& o) const;
    Expr operator-() const;
    Expr operator*(const Expr& o) const;
    Expr operator/(const Expr& o) const;
    Expr pow(int e) const;

    bool operator==(const Expr& o) const { return num_ == o.num_ && den_ == o.den_; }

    std::set<Atom> atoms() const;
    bool dependsOn(const Atom& a) const { return num_.dependsOn(a) || den_.dependsOn(a); }
    bool hasSigma() const { return num_.hasSigma() || den_.hasSigma(); }

    // Exact partial derivative treating every distinct atom as independent.
    Expr diff(const Atom& a) const;

    // Shift action S_J.
    Expr shifted(const MultiIndex& J) const;

    mpq_class eval(const Assignment& at) const;

    std::string str() const;  // canonical rendering (see parser module)

  private:
    Polynomial num_, den_;
};

// normalize is the Expr constructor; this re-runs it (idempotence hook for
// tests and for expressions built by hand).
Expr normalize(const Expr& e);

// True iff e is identically zero as a rational function of its atoms.
// Symbolic-first with a randomized exact-evaluation cross-check; disagreement
// raises InternalConsistencyError.
bool isZero(const Expr& e, unsigned seed = 0);

// Simultaneous substitution followed by normalization.  A binding for an
// unshifted dependent atom is propagated to all shifted instances of that
// component by shifting the bound expression.
Expr substitute(const Expr& e, const std::map<Atom, Expr>& bindings);

// Like substitute, but bindings apply only to the exact atoms given; an
// unshifted dependent-atom key is not propagated to its shifted instances.
Expr substituteExact(const Expr& e, const std::map<Atom, Expr>& bindings);

}  // namespace dadj
