#include "dadj/calculus.hpp"

#include <algorithm>
#include <cstdlib>

namespace dadj {

namespace {

Expr prolongCommon(const std::vector<Expr>& qU, const std::vector<Expr>* qV,
                   const std::vector<std::pair<std::string, Expr>>& paramComps, const Expr& e) {
    Expr r;
    for (const auto& a : e.atoms()) {
        if (a.isDep(VarClass::U)) {
            if (a.comp < static_cast<int>(qU.size()) && !qU[static_cast<size_t>(a.comp)].isZeroFast())
                r = r + qU[static_cast<size_t>(a.comp)].shifted(a.shift) * e.diff(a);
        } else if (a.isDep(VarClass::V) && qV) {
            if (a.comp < static_cast<int>(qV->size()) && !(*qV)[static_cast<size_t>(a.comp)].isZeroFast())
                r = r + (*qV)[static_cast<size_t>(a.comp)].shifted(a.shift) * e.diff(a);
        }
    }
    for (const auto& [name, rho] : paramComps) r = r + rho * e.diff(Atom::param(name));
    return r;
}

}  // namespace

Expr prolongApply(const Characteristic& Q, const Expr& e) {
    return prolongCommon(Q.q, nullptr, Q.paramComps, e);
}

Expr prolongApply(const ExtendedCharacteristic& Y, const Expr& e) {
    return prolongCommon(Y.base.q, &Y.qstar, Y.base.paramComps, e);
}

Expr euler(const Expr& e, VarClass cls, int comp) {
    Expr r;
    for (const auto& a : e.atoms())
        if (a.isDep(cls) && a.comp == comp) r = r + e.diff(a).shifted(-a.shift);
    return r;
}

Expr higherEuler(const Expr& e, VarClass cls, int comp, const MultiIndex& J) {
    Expr r;
    for (const auto& a : e.atoms())
        if (a.isDep(cls) && a.comp == comp && a.shift.allGE(J))
            r = r + e.diff(a).shifted(-(a.shift - J));
    return r;
}

Expr divergence(const std::vector<Expr>& P) {
    Expr r;
    int p = static_cast<int>(P.size());
    for (int i = 0; i < p; ++i) r = r + P[static_cast<size_t>(i)].shifted(MultiIndex::unit(p, i)) - P[static_cast<size_t>(i)];
    return r;
}

namespace {

// Extreme first-direction shift among the dependent atoms of a monomial, or
// nullopt if it has none.
std::optional<int> monomialTopShift(const Monomial& m) {
    std::optional<int> top;
    for (const auto& [a, ex] : m.factors)
        if (a.isDep() && (!top || a.shift[0] > *top)) top = a.shift[0];
    return top;
}

int coeffDegree(const Polynomial& p, const Atom& n) {
    int d = 0;
    for (const auto& [m, c] : p.terms()) d = std::max(d, m.exponentOf(n));
    return d;
}

// Coefficient of n^k in p (p treated as polynomial in the lattice atom n).
Polynomial coeffOfPow(const Polynomial& p, const Atom& n, int k) {
    Polynomial r;
    for (const auto& [m, c] : p.terms()) {
        if (m.exponentOf(n) != k) continue;
        Monomial stripped = m;
        std::erase_if(stripped.factors, [&](const auto& f) { return f.first == n; });
        r.add(stripped, c);
    }
    return r;
}

// (S - 1) rho = n^k for p = 1; polynomial antidifference.
Expr antidiffPow(int k) {
    Expr n = Expr::lattice(0);
    // (S-1) n^{k+1} = sum_{j<=k} C(k+1,j) n^j
    Expr r = n.pow(k + 1);
    for (int j = 0; j < k; ++j) {
        mpz_class c;
        mpz_bin_uiui(c.get_mpz_t(), static_cast<unsigned long>(k + 1), static_cast<unsigned long>(j));
        r = r - Expr::rational(mpq_class(c)) * antidiffPow(j);
    }
    return r / Expr::integer(k + 1);
}

// Solve (S - 1) rho = r for p = 1, where r is free of dependent atoms.
// Handles polynomials in n (and parameters) with an optional sigma(n) factor.
std::optional<Expr> antidifference1(const Expr& r) {
    if (r.isZeroFast()) return Expr();
    if (r.den().hasDepAtoms() || !r.den().isConstant()) return std::nullopt;
    for (const auto& a : r.num().atoms())
        if (a.kind == Atom::Kind::Func || a.kind == Atom::Kind::Dep) return std::nullopt;
    Atom n = Atom::lattice(0);

    Polynomial plain, signed_;
    for (const auto& [m, c] : r.num().terms()) {
        Monomial stripped = m;
        stripped.sigma = 0;
        if (m.sigma == 0)
            plain.add(stripped, c);
        else if (m.sigma == 1u)
            signed_.add(stripped, c);
        else
            return std::nullopt;
    }
    Expr den(Polynomial::constant(1), r.den());
    Expr rho;

    for (const auto& [m, c] : plain.terms()) {
        int k = m.exponentOf(n);
        Monomial rest = m;
        std::erase_if(rest.factors, [&](const auto& f) { return f.first == n; });
        Polynomial restPoly;
        restPoly.add(rest, c);
        rho = rho + Expr(restPoly, Polynomial::constant(1)) * antidiffPow(k);
    }

    if (!signed_.isZero()) {
        // rho_s = sigma(n) * g with S g + g = -h, solved top-down in deg n.
        Expr nE = Expr::atom(n);
        Expr h(signed_, Polynomial::constant(1));
        Expr g;
        int d = coeffDegree(signed_, n);
        for (int k = d; k >= 0; --k) {
            Expr resid = -h - (g.shifted(MultiIndex{1}) + g);
            Polynomial ck = coeffOfPow(resid.num(), n, k);
            if (ck.isZero()) continue;
            Expr cE(ck, resid.den());
            g = g + cE / Expr::integer(2) * nE.pow(k);
        }
        if (!isZero(-h - (g.shifted(MultiIndex{1}) + g))) return std::nullopt;
        rho = rho + Expr::sign(1u) * g;
    }
    return rho * den;
}

}  // namespace

std::optional<std::vector<Expr>> isDivergence(const Expr& e, int p) {
    std::vector<Expr> zero(static_cast<size_t>(p), Expr());
    if (isZero(e)) return zero;

    // Necessary condition: every Euler operator annihilates e.
    std::set<std::pair<VarClass, int>> comps;
    for (const auto& a : e.atoms())
        if (a.isDep()) comps.insert({a.cls, a.comp});
    for (const auto& [cls, comp] : comps)
        if (!isZero(euler(e, cls, comp))) return std::nullopt;

    if (p != 1) return std::nullopt;  // no constructive homotopy beyond p = 1

    // Telescoping: move every dependent-bearing monomial to top shift 0.
    Expr cur = normalize(e);
    Expr R;
    for (int guard = 0; guard < 400; ++guard) {
        if (cur.den().hasDepAtoms()) return std::nullopt;
        std::optional<int> hi, lo;
        for (const auto& [m, c] : cur.num().terms()) {
            auto t = monomialTopShift(m);
            if (!t) continue;
            if (!hi || *t > *hi) hi = *t;
            if (!lo || *t < *lo) lo = *t;
        }
        if (hi && *hi > 0) {
            Polynomial part;
            for (const auto& [m, c] : cur.num().terms())
                if (monomialTopShift(m) == hi) part.add(m, c);
            Expr t(part, cur.den());
            Expr moved = t.shifted(MultiIndex{-1});
            R = R + moved;
            cur = cur - t + moved;
            continue;
        }
        if (lo && *lo < 0) {
            Polynomial part;
            for (const auto& [m, c] : cur.num().terms())
                if (monomialTopShift(m) == lo) part.add(m, c);
            Expr t(part, cur.den());
            R = R - t;
            cur = cur - t + t.shifted(MultiIndex{1});
            continue;
        }
        break;
    }
    // Leftover dependent terms mean the peeling stalled.
    for (const auto& a : cur.atoms())
        if (a.isDep()) return std::nullopt;
    auto tail = antidifference1(cur);
    if (!tail) return std::nullopt;
    R = R + *tail;
    if (!isZero(divergence({R}) - e)) return std::nullopt;
    return std::vector<Expr>{R};
}

Expr lagrangian(const DifferenceSystem& sys) {
    if (!sys.forwardNormalized())
        throw NotForwardNormalizedError("system has backward shifts; apply forward normalization first");
    Expr L;
    for (size_t a = 0; a < sys.equations.size(); ++a)
        L = L + Expr::dep(VarClass::V, static_cast<int>(a), MultiIndex::zero(sys.p)) * sys.equations[a].lhs;
    return L;
}

DifferenceSystem adjointSystem(const DifferenceSystem& sys) {
    Expr L = lagrangian(sys);
    DifferenceSystem adj;
    adj.p = sys.p;
    adj.q = sys.q;
    for (int a = 0; a < sys.q; ++a) adj.equations.push_back({euler(L, VarClass::U, a), {}, {}});
    return adj;
}

DifferenceOperator adjointOperator(const DifferenceOperator& B) {
    DifferenceOperator adj;
    for (const auto& [b, J] : B.terms) adj.terms.emplace_back(b.shifted(-J), -J);
    if (B.terms.empty()) return adj;

    int p = B.terms.front().second.dim();
    Expr u0 = Expr::dep(VarClass::U, 0, MultiIndex::zero(p));
    Expr v0 = Expr::dep(VarClass::V, 0, MultiIndex::zero(p));
    Expr d = v0 * B.apply(u0) - u0 * adj.apply(v0);
    if (!isZero(euler(d, VarClass::V, 0)))
        throw InternalConsistencyError("adjoint operator failed the Euler verification identity");
    bool coeffsTouchU = false;
    for (const auto& [b, J] : B.terms)
        for (const auto& a : b.atoms())
            if (a.isDep(VarClass::U)) coeffsTouchU = true;
    if (!coeffsTouchU && !isZero(euler(d, VarClass::U, 0)))
        throw InternalConsistencyError("adjoint operator failed the Euler verification identity");
    return adj;
}

DifferenceSystem forwardNormalize(const DifferenceSystem& sys) {
    DifferenceSystem out = sys;
    for (auto& eq : out.equations) {
        MultiIndex J = MultiIndex::zero(sys.p);
        for (const auto& a : eq.lhs.atoms())
            if (a.isDep())
                for (int i = 0; i < sys.p; ++i) J[i] = std::max(J[i], -a.shift[i]);
        if (J == MultiIndex::zero(sys.p)) continue;
        eq.lhs = eq.lhs.shifted(J);
        if (eq.solvedAtom) eq.solvedAtom->shift = eq.solvedAtom->shift + J;
        if (eq.solvedRhs) eq.solvedRhs = eq.solvedRhs->shifted(J);
    }
    return out;
}

Expr solveFor(const Expr& F, const Atom& a) {
    // F = 0 iff num(F) = 0; the denominator only rescales the equation.
    const Polynomial& num = F.num();
    Polynomial c1 = num.derivative(a);
    if (c1.isZero() || c1.dependsOn(a))
        throw Error("equation is not of degree one in the requested atom");
    Polynomial c0 = num - c1 * Polynomial::atom(a);
    return Expr(-c0, c1);
}

namespace {

std::vector<MultiIndex> stencilOf(const Expr& F, VarClass cls, int comp) {
    std::vector<MultiIndex> s;
    for (const auto& a : F.atoms())
        if (a.isDep(cls) && a.comp == comp) s.push_back(a.shift);
    return s;
}

}  // namespace

void ReductionContext::addRulesFor(const Expr& F, VarClass cls, int comp,
                                   const std::optional<Atom>& declared) {
    auto stencil = stencilOf(F, cls, comp);
    if (stencil.empty()) return;
    (void)declared;
    int p = stencil.front().dim();
    MultiIndex lo = stencil.front(), hi = stencil.front();
    for (const auto& s : stencil)
        for (int i = 0; i < p; ++i) {
            lo[i] = std::min(lo[i], s[i]);
            hi[i] = std::max(hi[i], s[i]);
        }
    auto tryRule = [&](Rule r) -> bool {
        try {
            r.rhs = solveFor(F, Atom::dep(cls, comp, r.anchor));
        } catch (const Error&) {
            return false;  // not of degree one in this atom
        }
        rules_.push_back(std::move(r));
        return true;
    };
    // Quadrant scheme: one rule per sign vector, anchored at the matching
    // corner of the stencil's bounding box.  Each corner must belong to the
    // stencil and the equation must be solvable there; the corner then
    // dominates the whole stencil in its quadrant order, so every
    // substitution moves atoms strictly toward the free cross of bands.
    std::vector<Rule> quad;
    bool ok = true;
    for (int mask = 0; ok && mask < (1 << p); ++mask) {
        Rule r;
        r.cls = cls;
        r.comp = comp;
        r.kind = Rule::Kind::Quad;
        r.eps = MultiIndex::zero(p);
        r.anchor = MultiIndex::zero(p);
        for (int i = 0; i < p; ++i) {
            r.eps[i] = (mask >> i) & 1 ? -1 : 1;
            r.anchor[i] = r.eps[i] > 0 ? hi[i] : lo[i];
        }
        if (std::find(stencil.begin(), stencil.end(), r.anchor) == stencil.end()) {
            ok = false;
            break;
        }
        try {
            r.rhs = solveFor(F, Atom::dep(cls, comp, r.anchor));
        } catch (const Error&) {
            ok = false;
            break;
        }
        quad.push_back(std::move(r));
    }
    if (ok) {
        for (auto& r : quad) rules_.push_back(std::move(r));
        return;
    }
    // Fallback: pick a lattice direction whose extreme layers each hold a
    // single atom and reduce along that direction (e.g. cross stencils).
    for (int axis = 0; axis < p; ++axis) {
        int mmax = stencil.front()[axis], mmin = stencil.front()[axis];
        for (const auto& s : stencil) {
            mmax = std::max(mmax, s[axis]);
            mmin = std::min(mmin, s[axis]);
        }
        if (mmin == mmax) continue;
        std::vector<MultiIndex> top, bottom;
        for (const auto& s : stencil) {
            if (s[axis] == mmax) top.push_back(s);
            if (s[axis] == mmin) bottom.push_back(s);
        }
        if (top.size() != 1 || bottom.size() != 1) continue;
        bool added = tryRule({cls, comp, top.front(), Expr(), Rule::Kind::ColForward,
                              MultiIndex::zero(p), axis, mmax});
        added |= tryRule({cls, comp, bottom.front(), Expr(), Rule::Kind::ColBackward,
                         MultiIndex::zero(p), axis, mmin - 1});
        if (added) return;
    }
}

ReductionContext ReductionContext::forSystem(const DifferenceSystem& sys) {
    ReductionContext ctx;
    for (const auto& eq : sys.equations) {
        if (eq.solvedAtom) {
            ctx.addRulesFor(eq.lhs, eq.solvedAtom->cls, eq.solvedAtom->comp, eq.solvedAtom);
        } else {
            std::set<std::pair<VarClass, int>> comps;
            for (const auto& a : eq.lhs.atoms())
                if (a.isDep(VarClass::U)) comps.insert({a.cls, a.comp});
            if (comps.size() == 1)
                ctx.addRulesFor(eq.lhs, comps.begin()->first, comps.begin()->second, {});
        }
    }
    return ctx;
}

ReductionContext ReductionContext::forCombined(const DifferenceSystem& sys) {
    ReductionContext ctx = forSystem(sys);
    DifferenceSystem adj = adjointSystem(forwardNormalize(sys));
    if (sys.q == 1)
        for (const auto& eq : adj.equations) ctx.addRulesFor(eq.lhs, VarClass::V, 0, {});
    return ctx;
}

Expr ReductionContext::reduce(const Expr& e, int depthLimit) const {
    Expr cur = normalize(e);
    for (int step = 0;; ++step) {
        if (step > depthLimit) throw ReductionDepthError("substitution budget exhausted during reduction");
        const Rule* best = nullptr;
        Atom bestAtom;
        long bestScore = -1;
        for (const auto& a : cur.atoms()) {
            if (!a.isDep()) continue;
            for (const auto& r : rules_) {
                if (r.cls != a.cls || r.comp != a.comp || r.anchor.dim() != a.shift.dim()) continue;
                MultiIndex K = a.shift - r.anchor;
                bool fires = false;
                switch (r.kind) {
                    case Rule::Kind::Quad:
                        fires = true;
                        for (int i = 0; i < K.dim(); ++i)
                            if (r.eps[i] > 0 ? K[i] < 0 : K[i] > -1) fires = false;
                        break;
                    case Rule::Kind::ColForward: fires = a.shift[r.axis] >= r.threshold; break;
                    case Rule::Kind::ColBackward: fires = a.shift[r.axis] <= r.threshold; break;
                }
                if (!fires) continue;
                long score = 0;
                for (int i = 0; i < K.dim(); ++i) score += std::abs(K[i]);
                if (score > bestScore) {
                    bestScore = score;
                    best = &r;
                    bestAtom = a;
                }
            }
        }
        if (!best) return cur;
        MultiIndex K = bestAtom.shift - best->anchor;
        cur = substituteExact(cur, {{bestAtom, best->rhs.shifted(K)}});
    }
}

}  // namespace dadj
