#include "dadj/expr.hpp"

#include <random>

namespace dadj {

void Assignment::set(const Atom& a, const mpq_class& v) {
    mpq_class c = v;
    c.canonicalize();
    values[a] = c;
}
void Assignment::setLattice(int direction, long v) {
    lattice[direction] = v;
    values[Atom::lattice(direction)] = v;
}

namespace {

// Split off the monomials whose sigma mask has `bit` set.
void splitByBit(const Polynomial& p, std::uint32_t bit, Polynomial& clear, Polynomial& set) {
    for (const auto& [m, c] : p.terms()) {
        if (m.sigma & bit)
            set.add(m, c);
        else
            clear.add(m, c);
    }
}

mpq_class canonicalScale(const Polynomial& den) {
    mpz_class den_lcm = 1;
    for (const auto& [m, c] : den.terms()) {
        mpz_class d = c.get_den();
        mpz_class g;
        mpz_gcd(g.get_mpz_t(), den_lcm.get_mpz_t(), d.get_mpz_t());
        den_lcm = den_lcm / g * d;
    }
    mpz_class num_gcd = 0;
    for (const auto& [m, c] : den.terms()) {
        mpq_class scaled = c * mpq_class(den_lcm);
        mpz_gcd(num_gcd.get_mpz_t(), num_gcd.get_mpz_t(), scaled.get_num().get_mpz_t());
    }
    mpq_class scale = mpq_class(den_lcm) / mpq_class(num_gcd);
    if (den.leading().second * scale < 0) scale = -scale;
    return scale;
}

// Sigma-free cofactor polynomials of p, grouped by sigma mask.
std::map<std::uint32_t, Polynomial> sigmaComponents(const Polynomial& p) {
    std::map<std::uint32_t, Polynomial> comps;
    for (const auto& [m, c] : p.terms()) {
        Monomial stripped = m;
        stripped.sigma = 0;
        comps[m.sigma].add(stripped, c);
    }
    return comps;
}

}  // namespace

Expr::Expr(const Polynomial& num, const Polynomial& den) : num_(num), den_(den) {
    if (den_.isZero()) throw MalformedExpressionError("division by the zero polynomial");
    if (num_.isZero()) {
        den_ = Polynomial::constant(1);
        return;
    }
    // Parity signs are units (sigma^2 = 1); conjugate them out of the
    // denominator one direction bit at a time.
    while (den_.hasSigma()) {
        std::uint32_t mask = 0;
        for (const auto& [m, c] : den_.terms()) mask |= m.sigma;
        std::uint32_t bit = mask & (~mask + 1);
        Polynomial d0, d1;
        splitByBit(den_, bit, d0, d1);
        num_ = num_ * (d0 - d1);
        den_ = d0 * d0 - d1 * d1;
        if (den_.isZero())
            throw MalformedExpressionError("denominator is a zero divisor of the parity-sign algebra");
    }
    if (num_.isZero()) {
        den_ = Polynomial::constant(1);
        return;
    }
    if (!den_.isConstant()) {
        Polynomial g = den_;
        for (const auto& [mask, comp] : sigmaComponents(num_)) g = polyGcd(g, comp);
        if (!g.isConstant()) {
            num_ = *exactDivide(num_, g);
            den_ = *exactDivide(den_, g);
        }
    }
    mpq_class s = canonicalScale(den_);
    num_ = num_ * s;
    den_ = den_ * s;
}

bool Expr::isOne() const {
    return num_.isConstant() && den_.isConstant() && !num_.isZero() &&
           num_.constantValue() == den_.constantValue();
}

Expr Expr::operator+(const Expr& o) const { return Expr(num_ * o.den_ + o.num_ * den_, den_ * o.den_); }
Expr Expr::operator-(const Expr& o) const { return Expr(num_ * o.den_ - o.num_ * den_, den_ * o.den_); }
Expr Expr::operator-() const {
    Expr r = *this;
    r.num_ = -r.num_;
    return r;
}
Expr Expr::operator*(const Expr& o) const { return Expr(num_ * o.num_, den_ * o.den_); }
Expr Expr::operator/(const Expr& o) const {
    if (o.num_.isZero()) throw MalformedExpressionError("division by the zero polynomial");
    return Expr(num_ * o.den_, den_ * o.num_);
}

Expr Expr::pow(int e) const {
    if (e == 0) return integer(1);
    if (e < 0) {
        if (num_.isZero()) throw MalformedExpressionError("negative power of zero");
        return Expr(den_.pow(-e), num_.pow(-e));
    }
    return Expr(num_.pow(e), den_.pow(e));
}

std::set<Atom> Expr::atoms() const {
    std::set<Atom> s = num_.atoms();
    den_.collectAtoms(s);
    return s;
}

Expr Expr::diff(const Atom& a) const {
    if (!dependsOn(a)) return Expr();
    return Expr(num_.derivative(a) * den_ - num_ * den_.derivative(a), den_ * den_);
}

Expr Expr::shifted(const MultiIndex& J) const { return Expr(num_.shifted(J), den_.shifted(J)); }

mpq_class Expr::eval(const Assignment& at) const {
    auto value = [&](const Atom& a) -> mpq_class {
        if (a.kind == Atom::Kind::Lattice) {
            auto it = at.lattice.find(a.index);
            return it == at.lattice.end() ? mpq_class(0) : mpq_class(it->second);
        }
        auto it = at.values.find(a);
        if (it == at.values.end())
            throw Error("unassigned atom in evaluation: " + a.name +
                        (a.kind == Atom::Kind::Dep ? a.shift.str() : std::string()));
        return it->second;
    };
    auto parity = [&](std::uint32_t mask) {
        long s = 0;
        for (int i = 0; i < 32; ++i)
            if (mask & (1u << i)) {
                auto it = at.lattice.find(i);
                if (it != at.lattice.end()) s += it->second;
            }
        return static_cast<int>(((s % 2) + 2) % 2);
    };
    mpq_class d = den_.eval(value, parity);
    if (d == 0) throw EvaluationSingularError("denominator evaluates to zero", str());
    return num_.eval(value, parity) / d;
}

Expr normalize(const Expr& e) { return Expr(e.num(), e.den()); }

bool isZero(const Expr& e, unsigned seed) {
    if (e.isZeroFast()) return true;
    // Randomized exact-evaluation cross-check of the symbolic verdict.
    std::mt19937 rng(seed ^ 0x9e3779b9u);
    std::uniform_int_distribution<int> numDist(-50, 50);
    std::uniform_int_distribution<int> denDist(1, 16);
    std::uniform_int_distribution<int> latDist(-20, 20);
    auto as = e.atoms();
    int valid = 0;
    for (int attempt = 0; attempt < 64 && valid < 8; ++attempt) {
        Assignment at;
        for (const auto& a : as)
            if (a.kind == Atom::Kind::Lattice) at.setLattice(a.index, latDist(rng));
        for (const auto& a : as) {
            if (a.kind == Atom::Kind::Lattice) continue;
            int n = numDist(rng);
            if (n == 0) n = 1;
            at.set(a, mpq_class(n, denDist(rng)));
        }
        try {
            if (e.eval(at) != 0) return false;
            ++valid;
        } catch (const EvaluationSingularError&) {
            continue;  // resample
        }
    }
    if (valid == 0) return false;  // could not confirm; trust the nonzero numerator
    throw InternalConsistencyError(
        "normalization says nonzero but the expression vanished at every sample point");
}

namespace {

Expr substituteImpl(const Expr& e, const std::map<Atom, Expr>& bindings, bool propagate) {
    if (bindings.empty()) return normalize(e);
    // Integer lattice bindings feed the parity signs.
    std::map<int, long> latticeValues;
    for (const auto& [a, v] : bindings) {
        if (a.kind == Atom::Kind::Lattice) {
            if (!v.isRationalConstant() || v.rationalValue().get_den() != 1)
                throw Error("lattice symbols may only be bound to integers");
            latticeValues[a.index] = mpz_get_si(v.rationalValue().get_num().get_mpz_t());
        }
    }
    auto resolve = [&](const Atom& a) -> std::optional<Expr> {
        auto it = bindings.find(a);
        if (it != bindings.end()) return it->second;
        if (propagate && a.kind == Atom::Kind::Dep) {
            Atom base = Atom::dep(a.cls, a.comp, MultiIndex::zero(a.shift.dim()));
            auto bt = bindings.find(base);
            if (bt != bindings.end()) return bt->second.shifted(a.shift);
        }
        return std::nullopt;
    };
    auto substPoly = [&](const Polynomial& p) -> Expr {
        Expr total;
        for (const auto& [m, c] : p.terms()) {
            std::uint32_t mask = m.sigma;
            mpq_class coeff = c;
            for (const auto& [dir, v] : latticeValues) {
                if (mask & (1u << dir)) {
                    mask &= ~(1u << dir);
                    if (((v % 2) + 2) % 2 == 1) coeff = -coeff;
                }
            }
            Expr t = Expr(Polynomial::sign(mask), Polynomial::constant(1)) * Expr::rational(coeff);
            for (const auto& [a, ex] : m.factors) {
                auto b = resolve(a);
                Expr base = b ? *b : Expr::atom(a);
                t = t * base.pow(ex);
            }
            total = total + t;
        }
        return total;
    };
    Expr n = substPoly(e.num());
    Expr d = substPoly(e.den());
    if (d.isZeroFast())
        throw SubstitutionSingularError("substitution makes a denominator identically zero");
    try {
        return n / d;
    } catch (const MalformedExpressionError&) {
        throw SubstitutionSingularError("substitution makes a denominator identically zero");
    }
}

}  // namespace

Expr substitute(const Expr& e, const std::map<Atom, Expr>& bindings) {
    return substituteImpl(e, bindings, /*propagate=*/true);
}

Expr substituteExact(const Expr& e, const std::map<Atom, Expr>& bindings) {
    return substituteImpl(e, bindings, /*propagate=*/false);
}

}  // namespace dadj
