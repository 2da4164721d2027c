#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "dadj/atom.hpp"
#include "dadj/error.hpp"

namespace dadj {

// Power product of atoms times a parity-sign factor.
//
// `sigma` is a bitmask over lattice directions: bit i set means the monomial
// carries a factor (-1)^{n^i}.  The constant parity bit of a sign
// (-1)^{c0 + sum c_i n^i} is folded into the coefficient, and products of
// parity signs combine by XOR of masks, so sigma^2 = 1 holds by construction.
struct Monomial {
    std::vector<std::pair<Atom, int>> factors;  // sorted by atom, exponents > 0
    std::uint32_t sigma = 0;

    int degree() const {
        int d = 0;
        for (const auto& [a, e] : factors) d += e;
        return d;
    }
    bool isConstant() const { return factors.empty() && sigma == 0; }
    int exponentOf(const Atom& a) const {
        for (const auto& [b, e] : factors)
            if (b == a) return e;
        return 0;
    }

    Monomial times(const Monomial& o) const;
    // Componentwise divisibility of the sigma-free part; both masks must be 0.
    std::optional<Monomial> dividedBy(const Monomial& o) const;

    // Graded order: total degree first, then exponents compared from the
    // greatest atom downwards, then the sigma mask.  Multiplicative on
    // sigma-free monomials, which is what polynomial division relies on.
    bool operator<(const Monomial& o) const;
    bool operator==(const Monomial& o) const { return sigma == o.sigma && factors == o.factors; }
};

// Sparse multivariate polynomial over Q in the atoms, with parity signs.
class Polynomial {
  public:
    using Terms = std::map<Monomial, mpq_class>;

    Polynomial() = default;
    static Polynomial constant(const mpq_class& c);
    static Polynomial atom(const Atom& a, int exponent = 1);
    static Polynomial sign(std::uint32_t mask, bool odd_constant = false);

    bool isZero() const { return terms_.empty(); }
    bool isConstant() const;
    // Value of a constant polynomial (requires isConstant()).
    mpq_class constantValue() const;
    const Terms& terms() const { return terms_; }
    size_t size() const { return terms_.size(); }

    void add(const Monomial& m, mpq_class c);

    Polynomial operator+(const Polynomial& o) const;
    Polynomial operator-(const Polynomial& o) const;
    Polynomial operator-() const;
    Polynomial operator*(const Polynomial& o) const;
    Polynomial operator*(const mpq_class& c) const;
    Polynomial pow(int e) const;  // e >= 0

    bool operator==(const Polynomial& o) const { return terms_ == o.terms_; }

    // Partial derivative treating every distinct atom as independent.
    Polynomial derivative(const Atom& a) const;

    bool dependsOn(const Atom& a) const;
    bool hasSigma() const;
    bool hasDepAtoms() const;
    std::set<Atom> atoms() const;
    void collectAtoms(std::set<Atom>& into) const;

    // Leading term under the monomial order.
    const std::pair<const Monomial, mpq_class>& leading() const;

    // Translate every lattice-dependent object by J: dependent and function
    // atoms get J added to their offsets, n^i becomes n^i + j_i, and parity
    // signs contribute (-1)^{sum of shifted odd directions}.
    Polynomial shifted(const MultiIndex& J) const;

    // Exact rational evaluation.  `value` must cover every atom; `parity`
    // returns the parity (0/1) of sum n^i over the mask's directions.
    mpq_class eval(const std::function<mpq_class(const Atom&)>& value,
                   const std::function<int(std::uint32_t)>& parity) const;

  private:
    Terms terms_;
};

// Quotient and remainder do not exist in general; this is the exact-division
// test: returns the quotient iff divisor * quotient == dividend.
std::optional<Polynomial> exactDivide(const Polynomial& dividend, const Polynomial& divisor);

// GCD over Q of sigma-free polynomials, normalized to integer coprime
// coefficients with positive leading coefficient.
Polynomial polyGcd(Polynomial a, Polynomial b);

}  // namespace dadj
