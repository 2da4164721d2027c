#include "dadj/poly.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <random>

namespace dadj {

Monomial Monomial::times(const Monomial& o) const {
    Monomial r;
    r.sigma = sigma ^ o.sigma;
    r.factors.reserve(factors.size() + o.factors.size());
    auto it = factors.begin();
    auto jt = o.factors.begin();
    while (it != factors.end() && jt != o.factors.end()) {
        if (it->first < jt->first) {
            r.factors.push_back(*it++);
        } else if (jt->first < it->first) {
            r.factors.push_back(*jt++);
        } else {
            int e = it->second + jt->second;
            if (e != 0) r.factors.emplace_back(it->first, e);
            ++it;
            ++jt;
        }
    }
    r.factors.insert(r.factors.end(), it, factors.end());
    r.factors.insert(r.factors.end(), jt, o.factors.end());
    return r;
}

std::optional<Monomial> Monomial::dividedBy(const Monomial& o) const {
    if (o.sigma != 0) return std::nullopt;
    Monomial r;
    r.sigma = sigma;
    auto it = factors.begin();
    for (const auto& [a, e] : o.factors) {
        while (it != factors.end() && it->first < a) r.factors.push_back(*it++);
        if (it == factors.end() || !(it->first == a) || it->second < e) return std::nullopt;
        if (it->second > e) r.factors.emplace_back(a, it->second - e);
        ++it;
    }
    r.factors.insert(r.factors.end(), it, factors.end());
    return r;
}

bool Monomial::operator<(const Monomial& o) const {
    int da = degree(), db = o.degree();
    if (da != db) return da < db;
    // Lexicographic from the greatest atom down.
    auto it = factors.rbegin();
    auto jt = o.factors.rbegin();
    while (it != factors.rend() && jt != o.factors.rend()) {
        if (it->first == jt->first) {
            if (it->second != jt->second) return it->second < jt->second;
            ++it;
            ++jt;
        } else {
            return it->first < jt->first;
        }
    }
    if (it != factors.rend()) return false;
    if (jt != o.factors.rend()) return true;
    return sigma < o.sigma;
}

Polynomial Polynomial::constant(const mpq_class& c) {
    Polynomial p;
    p.add(Monomial{}, c);
    return p;
}

Polynomial Polynomial::atom(const Atom& a, int exponent) {
    Polynomial p;
    Monomial m;
    if (exponent != 0) m.factors.emplace_back(a, exponent);
    p.add(m, 1);
    return p;
}

Polynomial Polynomial::sign(std::uint32_t mask, bool odd_constant) {
    Polynomial p;
    Monomial m;
    m.sigma = mask;
    p.add(m, odd_constant ? -1 : 1);
    return p;
}

bool Polynomial::isConstant() const {
    return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.isConstant());
}

mpq_class Polynomial::constantValue() const {
    if (terms_.empty()) return 0;
    assert(isConstant());
    return terms_.begin()->second;
}

void Polynomial::add(const Monomial& m, mpq_class c) {
    c.canonicalize();
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
    Polynomial r = *this;
    for (const auto& [m, c] : o.terms_) r.add(m, c);
    return r;
}

Polynomial Polynomial::operator-(const Polynomial& o) const {
    Polynomial r = *this;
    for (const auto& [m, c] : o.terms_) r.add(m, -c);
    return r;
}

Polynomial Polynomial::operator-() const {
    Polynomial r;
    for (const auto& [m, c] : terms_) r.terms_.emplace(m, -c);
    return r;
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
    Polynomial r;
    for (const auto& [m1, c1] : terms_)
        for (const auto& [m2, c2] : o.terms_) r.add(m1.times(m2), c1 * c2);
    return r;
}

Polynomial Polynomial::operator*(const mpq_class& c) const {
    Polynomial r;
    if (c == 0) return r;
    for (const auto& [m, k] : terms_) r.terms_.emplace(m, k * c);
    return r;
}

Polynomial Polynomial::pow(int e) const {
    assert(e >= 0);
    Polynomial r = constant(1);
    Polynomial base = *this;
    while (e > 0) {
        if (e & 1) r = r * base;
        base = base * base;
        e >>= 1;
    }
    return r;
}

Polynomial Polynomial::derivative(const Atom& a) const {
    Polynomial r;
    for (const auto& [m, c] : terms_) {
        int e = m.exponentOf(a);
        if (e == 0) continue;
        Monomial d = m;
        for (auto& [b, k] : d.factors) {
            if (b == a) {
                k -= 1;
                break;
            }
        }
        std::erase_if(d.factors, [](const auto& f) { return f.second == 0; });
        r.add(d, c * e);
    }
    return r;
}

bool Polynomial::dependsOn(const Atom& a) const {
    for (const auto& [m, c] : terms_)
        if (m.exponentOf(a) != 0) return true;
    return false;
}

bool Polynomial::hasSigma() const {
    for (const auto& [m, c] : terms_)
        if (m.sigma != 0) return true;
    return false;
}

bool Polynomial::hasDepAtoms() const {
    for (const auto& [m, c] : terms_)
        for (const auto& [a, e] : m.factors)
            if (a.isDep()) return true;
    return false;
}

std::set<Atom> Polynomial::atoms() const {
    std::set<Atom> s;
    collectAtoms(s);
    return s;
}

void Polynomial::collectAtoms(std::set<Atom>& into) const {
    for (const auto& [m, c] : terms_)
        for (const auto& [a, e] : m.factors) into.insert(a);
}

const std::pair<const Monomial, mpq_class>& Polynomial::leading() const {
    assert(!terms_.empty());
    return *terms_.rbegin();
}

Polynomial Polynomial::shifted(const MultiIndex& J) const {
    Polynomial r;
    for (const auto& [m, c] : terms_) {
        // Parity sign of the shifted directions.
        int flips = 0;
        for (int i = 0; i < J.dim(); ++i)
            if (m.sigma & (1u << i)) flips += J[i];
        Polynomial term = constant((flips % 2 + 2) % 2 == 1 ? -c : c);
        Monomial plain;
        plain.sigma = m.sigma;
        for (const auto& [a, e] : m.factors) {
            switch (a.kind) {
                case Atom::Kind::Lattice: {
                    int j = a.index < J.dim() ? J[a.index] : 0;
                    if (j == 0) {
                        plain.factors.emplace_back(a, e);
                    } else {
                        term = term * (atom(a) + constant(j)).pow(e);
                    }
                    break;
                }
                case Atom::Kind::Param:
                    plain.factors.emplace_back(a, e);
                    break;
                case Atom::Kind::Func:
                    plain.factors.emplace_back(Atom::func(a.name, a.shift + J), e);
                    break;
                case Atom::Kind::Dep:
                    plain.factors.emplace_back(Atom::dep(a.cls, a.comp, a.shift + J), e);
                    break;
            }
        }
        std::sort(plain.factors.begin(), plain.factors.end(),
                  [](const auto& x, const auto& y) { return x.first < y.first; });
        Polynomial pm;
        pm.add(plain, 1);
        r = r + term * pm;
    }
    return r;
}

mpq_class Polynomial::eval(const std::function<mpq_class(const Atom&)>& value,
                           const std::function<int(std::uint32_t)>& parity) const {
    mpq_class total = 0;
    for (const auto& [m, c] : terms_) {
        mpq_class t = c;
        if (m.sigma != 0 && parity(m.sigma) % 2 != 0) t = -t;
        for (const auto& [a, e] : m.factors) {
            mpq_class base = value(a);
            mpq_class p = 1;
            for (int k = 0; k < e; ++k) p *= base;
            t *= p;
        }
        total += t;
    }
    return total;
}

std::optional<Polynomial> exactDivide(const Polynomial& dividend, const Polynomial& divisor) {
    if (divisor.isZero()) return std::nullopt;
    if (divisor.hasSigma()) return std::nullopt;  // division only by sigma-free polynomials
    Polynomial q;
    Polynomial r = dividend;
    const auto& dl = divisor.leading();
    while (!r.isZero()) {
        const auto& rl = r.leading();
        auto m = rl.first.dividedBy(dl.first);
        if (!m) return std::nullopt;
        mpq_class c = rl.second / dl.second;
        q.add(*m, c);
        Monomial qm = *m;  // copy: rl dangles once r mutates
        for (const auto& [dm, dc] : divisor.terms()) r.add(qm.times(dm), -c * dc);
    }
    return q;
}

namespace {

// Normalize to integer coprime coefficients with positive leading coefficient.
Polynomial makePrimitive(const Polynomial& p) {
    if (p.isZero()) return p;
    mpz_class den_lcm = 1;
    for (const auto& [m, c] : p.terms()) {
        mpz_class d = c.get_den();
        mpz_class g;
        mpz_gcd(g.get_mpz_t(), den_lcm.get_mpz_t(), d.get_mpz_t());
        den_lcm = den_lcm / g * d;
    }
    mpz_class num_gcd = 0;
    for (const auto& [m, c] : p.terms()) {
        mpq_class scaled = c * mpq_class(den_lcm);
        mpz_gcd(num_gcd.get_mpz_t(), num_gcd.get_mpz_t(), scaled.get_num().get_mpz_t());
    }
    mpq_class scale = mpq_class(den_lcm) / mpq_class(num_gcd);
    if (p.leading().second * scale < 0) scale = -scale;
    return p * scale;
}

// Coefficients of p viewed as univariate in x; index = exponent of x.
std::vector<Polynomial> univariateView(const Polynomial& p, const Atom& x) {
    std::vector<Polynomial> coeffs;
    for (const auto& [m, c] : p.terms()) {
        int e = m.exponentOf(x);
        Monomial rest = m;
        std::erase_if(rest.factors, [&](const auto& f) { return f.first == x; });
        if (static_cast<int>(coeffs.size()) <= e) coeffs.resize(static_cast<size_t>(e) + 1);
        coeffs[static_cast<size_t>(e)].add(rest, c);
    }
    while (!coeffs.empty() && coeffs.back().isZero()) coeffs.pop_back();
    return coeffs;
}


int degreeIn(const Polynomial& p, const Atom& x) {
    int d = 0;
    for (const auto& [m, c] : p.terms()) d = std::max(d, m.exponentOf(x));
    return d;
}

Polynomial contentIn(const Polynomial& p, const Atom& x) {
    Polynomial g;
    for (const auto& c : univariateView(p, x)) g = polyGcd(g, c);
    return g;
}

// Canonical pseudo-remainder lc(b)^(delta+1) * a mod b, delta = deg a - deg b.
Polynomial pseudoRemainder(Polynomial a, const Polynomial& b, const Atom& x) {
    int db = degreeIn(b, x);
    auto bc = univariateView(b, x);
    const Polynomial& lcb = bc.back();
    int scale = degreeIn(a, x) - db + 1;
    while (!a.isZero()) {
        int da = degreeIn(a, x);
        if (da < db) break;
        auto ac = univariateView(a, x);
        Polynomial lead = ac.back();
        a = a * lcb - lead * Polynomial::atom(x, da - db) * b;
        --scale;
    }
    for (; scale > 0; --scale) a = a * lcb;
    return a;
}

// Common monomial factor of all terms.
Monomial monomialContent(const Polynomial& p) {
    Monomial g = p.terms().begin()->first;
    g.sigma = 0;
    for (const auto& [m, c] : p.terms()) {
        if (g.factors.empty()) break;
        std::vector<std::pair<Atom, int>> kept;
        for (const auto& [a, e] : g.factors) {
            int f = m.exponentOf(a);
            if (f > 0) kept.emplace_back(a, std::min(e, f));
        }
        g.factors = std::move(kept);
    }
    return g;
}

// Deterministic evaluation of p as a univariate polynomial in x, with every
// other atom sent to a fixed pseudo-random integer.
std::vector<mpq_class> univariateProbe(const Polynomial& p, const Atom& x,
                                       const std::map<Atom, long>& point) {
    std::vector<mpq_class> c;
    for (const auto& [m, q] : p.terms()) {
        mpq_class v = q;
        int e = 0;
        for (const auto& [a, k] : m.factors) {
            if (a == x) {
                e = k;
                continue;
            }
            mpz_class base = point.at(a);
            mpz_class pw;
            mpz_pow_ui(pw.get_mpz_t(), base.get_mpz_t(), static_cast<unsigned long>(k));
            v *= mpq_class(pw);
        }
        if (static_cast<int>(c.size()) <= e) c.resize(static_cast<size_t>(e) + 1);
        c[static_cast<size_t>(e)] += v;
    }
    while (!c.empty() && c.back() == 0) c.pop_back();
    return c;
}

int univariateGcdDegree(std::vector<mpq_class> a, std::vector<mpq_class> b) {
    if (a.empty()) return b.empty() ? 0 : static_cast<int>(b.size()) - 1;
    while (!b.empty()) {
        // a mod b over Q
        while (a.size() >= b.size()) {
            mpq_class f = a.back() / b.back();
            for (size_t i = 0; i < b.size(); ++i)
                a[a.size() - b.size() + i] -= f * b[i];
            while (!a.empty() && a.back() == 0) a.pop_back();
            if (a.empty()) break;
        }
        std::swap(a, b);
    }
    return a.empty() ? 0 : static_cast<int>(a.size()) - 1;
}

// Degree in x of gcd(a, b) at a deterministic sample point; this is an
// overestimate except on the (rare) points killing a leading coefficient.
int probeGcdDegree(const Polynomial& a, const Polynomial& b, const Atom& x, unsigned salt) {
    std::set<Atom> vars = a.atoms();
    b.collectAtoms(vars);
    std::map<Atom, long> point;
    std::mt19937 rng(salt);
    for (const auto& v : vars)
        if (!(v == x)) point[v] = 65536 + static_cast<long>(rng() % 1048576);
    return univariateGcdDegree(univariateProbe(a, x, point), univariateProbe(b, x, point));
}

}  // namespace

Polynomial polyGcd(Polynomial a, Polynomial b) {
    if (a.isZero()) return b.isZero() ? b : makePrimitive(b);
    if (b.isZero()) return makePrimitive(a);
    // Parity signs are units with zero divisors in products; no cancellation
    // is attempted across them.
    if (a.hasSigma() || b.hasSigma()) return Polynomial::constant(1);
    if (a.isConstant() || b.isConstant()) return Polynomial::constant(1);

    // Monomial contents split off exactly.
    Monomial ma = monomialContent(a);
    Monomial mb = monomialContent(b);
    Monomial mg;
    for (const auto& [atom, e] : ma.factors) {
        int f = mb.exponentOf(atom);
        if (f > 0) mg.factors.emplace_back(atom, std::min(e, f));
    }
    if (!ma.factors.empty() || !mb.factors.empty()) {
        Polynomial pa, pb, pg;
        pa.add(ma, 1);
        pb.add(mb, 1);
        pg.add(mg, 1);
        a = *exactDivide(a, pa);
        b = *exactDivide(b, pb);
        if (a.isConstant() || b.isConstant()) return makePrimitive(pg);
        Polynomial inner = polyGcd(a, b);
        return makePrimitive(inner * pg);
    }

    std::set<Atom> varsA = a.atoms();
    std::set<Atom> common;
    for (const auto& v : b.atoms())
        if (varsA.count(v)) common.insert(v);
    if (common.empty()) return Polynomial::constant(1);

    // Main variable: the common atom with the least joint degree.
    Atom x = *common.begin();
    int best = degreeIn(a, x) + degreeIn(b, x);
    for (const auto& v : common) {
        int d = degreeIn(a, v) + degreeIn(b, v);
        if (d < best) {
            best = d;
            x = v;
        }
    }

    Polynomial contA = contentIn(a, x);
    Polynomial contB = contentIn(b, x);
    Polynomial cont = polyGcd(contA, contB);
    Polynomial A = *exactDivide(a, contA);
    Polynomial B = *exactDivide(b, contB);
    if (degreeIn(A, x) < degreeIn(B, x)) std::swap(A, B);

    // Evaluation probe: two independent sample points claiming coprimality
    // let us skip the remainder sequence.
    int probe1 = probeGcdDegree(A, B, x, 0x51ed270bu);
    if (probe1 == 0 && probeGcdDegree(A, B, x, 0x9e3779b9u) == 0)
        return makePrimitive(cont);
    if (probe1 == degreeIn(B, x) && exactDivide(A, B)) return makePrimitive(cont * B);

    // Subresultant remainder sequence (Knuth's Algorithm C): every
    // pseudo-remainder is divided by the predicted exact factor gc * h^delta,
    // which keeps coefficient growth polynomial without the recursive content
    // computations a primitive sequence would need.  A probe-guided trial
    // division short-circuits the sequence as soon as a member reaches the
    // sampled gcd degree.
    const Polynomial A0 = A;
    const Polynomial B0 = B;
    Polynomial gc = Polynomial::constant(1);
    Polynomial h = Polynomial::constant(1);
    Polynomial g;
    while (true) {
        if (B.isZero()) {
            g = A;
            break;
        }
        if (degreeIn(B, x) == 0) {
            g = Polynomial::constant(1);
            break;
        }
        if (probe1 > 0 && degreeIn(B, x) == probe1) {
            Polynomial cand = *exactDivide(B, contentIn(B, x));
            if (exactDivide(A0, cand) && exactDivide(B0, cand))
                return makePrimitive(cont * cand);
        }
        int delta = degreeIn(A, x) - degreeIn(B, x);
        Polynomial R = pseudoRemainder(A, B, x);
        if (!R.isZero()) {
            Polynomial div = gc;
            for (int i = 0; i < delta; ++i) div = div * h;
            if (auto q = exactDivide(R, div)) {
                R = *q;
            } else {
                R = *exactDivide(R, contentIn(R, x));  // defensive fallback
            }
        }
        A = B;
        B = R;
        gc = univariateView(A, x).back();
        if (delta > 0) {
            Polynomial hn = Polynomial::constant(1);
            for (int i = 0; i < delta; ++i) hn = hn * gc;
            Polynomial hd = Polynomial::constant(1);
            for (int i = 0; i + 1 < delta; ++i) hd = hd * h;
            if (auto q = exactDivide(hn, hd)) h = *q;
            else h = *exactDivide(hn, contentIn(hn, x));  // defensive fallback
        }
    }
    if (!g.isConstant()) {
        Polynomial c = contentIn(g, x);
        g = *exactDivide(g, c);
    }
    return makePrimitive(cont * g);
}

}  // namespace dadj
