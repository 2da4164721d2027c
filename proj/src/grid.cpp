#include "dadj/grid.hpp"

#include <algorithm>
#include <random>

#include "dadj/calculus.hpp"
#include "dadj/error.hpp"

namespace dadj {

namespace {

std::string pointStr(const std::vector<int>& x) {
    std::string s = "[";
    for (size_t i = 0; i < x.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(x[i]);
    }
    return s + "]";
}

std::vector<int> plus(const std::vector<int>& x, const MultiIndex& J) {
    std::vector<int> r = x;
    for (size_t i = 0; i < r.size(); ++i) r[i] += J[static_cast<int>(i)];
    return r;
}

// Stable across runs, unlike std::hash.
unsigned fnv(const std::string& s, unsigned h = 2166136261u) {
    for (unsigned char c : s) h = (h ^ c) * 16777619u;
    return h;
}

unsigned fnvPoint(const std::vector<int>& x, unsigned h) {
    for (int c : x) {
        h = (h ^ static_cast<unsigned>(c & 0xff)) * 16777619u;
        h = (h ^ static_cast<unsigned>((c >> 8) & 0xff)) * 16777619u;
    }
    return h;
}

mpq_class drawNonzero(std::mt19937& rng, long magnitude) {
    long num = 1 + static_cast<long>(rng() % static_cast<unsigned long>(std::max(1L, magnitude)));
    long den = 1 + static_cast<long>(rng() % 3);
    mpq_class v(num, den);
    v.canonicalize();
    return rng() % 2 ? v : mpq_class(-v);
}

// Solved form driving one component's forward fill.
struct FillRule {
    MultiIndex A;  // solved atom shift
    Expr rhs;      // relative to the instance base point
};

// Every same-class dependency must reach strictly lexicographically backwards
// from the solved atom, so a single lexicographic sweep fills the window.
void validateRule(const FillRule& rule, VarClass cls, int comp) {
    for (const auto& a : rule.rhs.atoms()) {
        if (!a.isDep(cls)) continue;
        if (a.shift < rule.A) continue;
        if (a.shift == rule.A && a.comp != comp)
            throw Error("solved form couples components at the solved point; cannot iterate");
        throw Error("solved form for " + std::string(varClassName(cls)) + rule.A.str() +
                    " reaches forward to " + rule.A.str() + "; cannot iterate");
    }
}

SolutionGrid fillGrid(int p, int q, VarClass cls, const std::vector<FillRule>& rules,
                      const EvalEnv& outer, const InitialData& initial,
                      const std::vector<int>& lo, const std::vector<int>& hi) {
    if (static_cast<int>(lo.size()) != p || static_cast<int>(hi.size()) != p)
        throw Error("window dimension does not match the lattice dimension");
    for (int i = 0; i < p; ++i)
        if (lo[i] > hi[i]) throw Error("empty grid window");

    SolutionGrid g;
    g.p = p;
    g.q = q;
    g.cls = cls;
    g.lo = lo;
    g.hi = hi;

    EvalEnv env = outer;
    (cls == VarClass::U ? env.u : env.v) = &g;

    std::vector<int> x = lo;
    while (true) {
        std::vector<mpq_class> row(static_cast<size_t>(q));
        for (int comp = 0; comp < q; ++comp) {
            const FillRule& rule = rules[static_cast<size_t>(comp)];
            std::vector<int> base = plus(x, -rule.A);
            mpq_class val;
            if (env.covers(rule.rhs, base)) {
                try {
                    val = env.evalAt(rule.rhs, base);
                } catch (const EvaluationSingularError& e) {
                    throw SingularOrbitError("singular solved form at " + pointStr(x) + ": " +
                                             e.what());
                }
            } else {
                val = initial(comp, x);
                g.freeEntries.emplace(comp, x);
            }
            row[static_cast<size_t>(comp)] = val;
        }
        g.values.emplace(x, std::move(row));

        int i = p - 1;
        for (; i >= 0; --i) {
            if (++x[static_cast<size_t>(i)] <= hi[static_cast<size_t>(i)]) break;
            x[static_cast<size_t>(i)] = lo[static_cast<size_t>(i)];
        }
        if (i < 0) break;
    }
    return g;
}

void shiftRange(const std::set<Atom>& atoms, std::vector<int>& mlo, std::vector<int>& mhi) {
    for (const auto& a : atoms) {
        if (!a.isDep()) continue;
        for (int i = 0; i < a.shift.dim(); ++i) {
            mlo[static_cast<size_t>(i)] = std::min(mlo[static_cast<size_t>(i)], a.shift[i]);
            mhi[static_cast<size_t>(i)] = std::max(mhi[static_cast<size_t>(i)], a.shift[i]);
        }
    }
}

}  // namespace

bool SolutionGrid::inWindow(const std::vector<int>& x) const {
    for (size_t i = 0; i < x.size(); ++i)
        if (x[i] < lo[i] || x[i] > hi[i]) return false;
    return true;
}

const mpq_class* SolutionGrid::find(int comp, const std::vector<int>& x) const {
    auto it = values.find(x);
    if (it == values.end() || comp < 0 || comp >= q) return nullptr;
    return &it->second[static_cast<size_t>(comp)];
}

mpq_class EvalEnv::funcValue(const std::string& name, const std::vector<int>& point) const {
    std::mt19937 rng(fnvPoint(point, fnv(name, funcSeed ^ 2166136261u)));
    rng.discard(3);
    return drawNonzero(rng, 5);
}

bool EvalEnv::covers(const Expr& e, const std::vector<int>& x) const {
    for (const auto& a : e.atoms()) {
        if (!a.isDep()) continue;
        const SolutionGrid* g = a.cls == VarClass::U ? u : v;
        if (!g || !g->find(a.comp, plus(x, a.shift))) return false;
    }
    return true;
}

mpq_class EvalEnv::evalAt(const Expr& e, const std::vector<int>& x) const {
    Assignment at;
    for (size_t i = 0; i < x.size(); ++i) at.setLattice(static_cast<int>(i), x[i]);
    for (const auto& a : e.atoms()) {
        switch (a.kind) {
            case Atom::Kind::Lattice:
                break;
            case Atom::Kind::Param: {
                auto it = params.find(a.name);
                if (it == params.end()) throw Error("no value for parameter " + a.name);
                at.set(a, it->second);
                break;
            }
            case Atom::Kind::Func:
                at.set(a, funcValue(a.name, plus(x, a.shift)));
                break;
            case Atom::Kind::Dep: {
                const SolutionGrid* g = a.cls == VarClass::U ? u : v;
                const mpq_class* val = g ? g->find(a.comp, plus(x, a.shift)) : nullptr;
                if (!val)
                    throw Error("grid has no value for " + std::string(varClassName(a.cls)) +
                                pointStr(plus(x, a.shift)));
                at.set(a, *val);
                break;
            }
        }
    }
    return e.eval(at);
}

SolutionGrid iterateSolution(const DifferenceSystem& sys, const EvalEnv& env,
                             const InitialData& initial, const std::vector<int>& lo,
                             const std::vector<int>& hi) {
    if (!sys.hasSolvedForms()) throw Error("forward iteration needs solved forms");
    std::vector<FillRule> rules(static_cast<size_t>(sys.q));
    std::vector<bool> have(static_cast<size_t>(sys.q), false);
    for (const auto& eq : sys.equations) {
        const Atom& a = *eq.solvedAtom;
        if (!a.isDep(VarClass::U)) throw Error("solved atom is not a u-component");
        if (have[static_cast<size_t>(a.comp)])
            throw Error("two equations solved for the same component");
        have[static_cast<size_t>(a.comp)] = true;
        rules[static_cast<size_t>(a.comp)] = {
            a.shift, eq.solvedRhs ? *eq.solvedRhs : solveFor(eq.lhs, a)};
        validateRule(rules[static_cast<size_t>(a.comp)], VarClass::U, a.comp);
    }
    for (int c = 0; c < sys.q; ++c)
        if (!have[static_cast<size_t>(c)]) throw Error("no solved form for a component");
    return fillGrid(sys.p, sys.q, VarClass::U, rules, env, initial, lo, hi);
}

SolutionGrid iterateAdjoint(const DifferenceSystem& sys, const EvalEnv& env,
                            const InitialData& initial, const std::vector<int>& lo,
                            const std::vector<int>& hi) {
    if (!env.u) throw Error("adjoint iteration needs a u-grid in the environment");
    DifferenceSystem adj = adjointSystem(forwardNormalize(sys));
    std::vector<FillRule> rules(static_cast<size_t>(adj.q));
    std::vector<bool> have(static_cast<size_t>(adj.q), false);
    for (const auto& eq : adj.equations) {
        // Solve for the lexicographically leading v-atom; the rest of the
        // stencil then lies strictly behind it.
        std::optional<Atom> lead;
        for (const auto& a : eq.lhs.atoms())
            if (a.isDep(VarClass::V) && (!lead || lead->shift < a.shift)) lead = a;
        if (!lead) throw Error("adjoint equation has no v-atoms");
        if (have[static_cast<size_t>(lead->comp)])
            throw Error("adjoint equations lead with the same v-component; cannot iterate");
        have[static_cast<size_t>(lead->comp)] = true;
        rules[static_cast<size_t>(lead->comp)] = {lead->shift, solveFor(eq.lhs, *lead)};
        validateRule(rules[static_cast<size_t>(lead->comp)], VarClass::V, lead->comp);
    }
    for (int c = 0; c < adj.q; ++c)
        if (!have[static_cast<size_t>(c)]) throw Error("no adjoint solved form for a component");
    return fillGrid(adj.p, adj.q, VarClass::V, rules, env, initial, lo, hi);
}

LawCheck checkDivergence(const std::vector<Expr>& fluxes, const EvalEnv& env,
                         const std::vector<int>& boxLo, const std::vector<int>& boxHi) {
    int p = static_cast<int>(fluxes.size());
    LawCheck out;
    std::vector<int> x = boxLo;
    for (int i = 0; i < p; ++i)
        if (boxLo[static_cast<size_t>(i)] > boxHi[static_cast<size_t>(i)]) return out;
    while (true) {
        bool covered = true;
        for (int i = 0; i < p && covered; ++i)
            covered = env.covers(fluxes[static_cast<size_t>(i)], x) &&
                      env.covers(fluxes[static_cast<size_t>(i)],
                                 plus(x, MultiIndex::unit(p, i)));
        if (covered) {
            try {
                mpq_class r = 0;
                for (int i = 0; i < p; ++i) {
                    const Expr& P = fluxes[static_cast<size_t>(i)];
                    r += env.evalAt(P, plus(x, MultiIndex::unit(p, i))) - env.evalAt(P, x);
                }
                ++out.points;
                mpq_class a = r < 0 ? mpq_class(-r) : r;
                if (a > out.maxAbs) {
                    out.maxAbs = a;
                    if (out.firstBad.empty()) out.firstBad = pointStr(x);
                }
            } catch (const EvaluationSingularError&) {
                ++out.skipped;
            }
        }
        int i = p - 1;
        for (; i >= 0; --i) {
            if (++x[static_cast<size_t>(i)] <= boxHi[static_cast<size_t>(i)]) break;
            x[static_cast<size_t>(i)] = boxLo[static_cast<size_t>(i)];
        }
        if (i < 0) break;
    }
    return out;
}

VerifyOutcome verifyConservationLaw(const DifferenceSystem& sys, const ConservationLaw& cl,
                                    const VerifySettings& settings) {
    const int p = sys.p;
    bool needV = false;
    std::set<std::string> paramNames;
    auto scan = [&](const Expr& e) {
        for (const auto& a : e.atoms()) {
            if (a.isDep(VarClass::V)) needV = true;
            if (a.kind == Atom::Kind::Param) paramNames.insert(a.name);
        }
    };
    for (const auto& P : cl.fluxes) scan(P);
    for (const auto& eq : sys.equations) scan(eq.lhs);

    // Margin wide enough that every equation instance entering the local
    // divergence identity at a box point has its whole stencil in the window.
    std::vector<int> mlo(static_cast<size_t>(p), 0), mhi(static_cast<size_t>(p), 0);
    for (const auto& P : cl.fluxes) shiftRange(P.atoms(), mlo, mhi);
    std::vector<int> slo(static_cast<size_t>(p), 0), shi(static_cast<size_t>(p), 0);
    for (const auto& eq : sys.equations) shiftRange(eq.lhs.atoms(), slo, shi);
    if (needV)
        for (const auto& eq : adjointSystem(forwardNormalize(sys)).equations)
            shiftRange(eq.lhs.atoms(), slo, shi);

    std::vector<int> lo(static_cast<size_t>(p)), hi(static_cast<size_t>(p));
    std::vector<int> boxLo(static_cast<size_t>(p)), boxHi(static_cast<size_t>(p));
    for (int i = 0; i < p; ++i) {
        size_t s = static_cast<size_t>(i);
        int margin = std::max(-mlo[s], mhi[s]) + 2 * std::max(-slo[s], shi[s]) + 2;
        lo[s] = 0;
        hi[s] = static_cast<int>(settings.steps) + 2 * margin;
        boxLo[s] = margin;
        boxHi[s] = hi[s] - margin - 1;
    }

    VerifyOutcome out;
    std::mt19937 master(settings.seed * 2654435761u + 0x6b43a9b5u);
    int orbitsWanted = std::max(1, settings.orbits);
    for (int orbit = 0; orbit < orbitsWanted; ++orbit) {
        bool done = false;
        for (int attempt = 0; attempt < 8 && !done; ++attempt) {
            unsigned s = master();
            std::mt19937 prng(s ^ 0x7f4a7c15u);
            EvalEnv env;
            env.funcSeed = s;
            for (const auto& name : paramNames) env.params[name] = drawNonzero(prng, settings.magnitude);
            auto data = [s, mag = settings.magnitude](int comp, const std::vector<int>& x) {
                std::mt19937 rng(fnvPoint(x, fnv("d", s ^ static_cast<unsigned>(comp * 2654435761u))));
                rng.discard(2);
                return drawNonzero(rng, mag);
            };
            try {
                SolutionGrid ug = iterateSolution(sys, env, data, lo, hi);
                env.u = &ug;
                SolutionGrid vg;
                if (needV) {
                    vg = iterateAdjoint(sys, env, data, lo, hi);
                    env.v = &vg;
                }
                LawCheck lc = checkDivergence(cl.fluxes, env, boxLo, boxHi);
                if (lc.skipped > 0 || lc.points < settings.steps)
                    throw SingularOrbitError("flux singular along the sampled orbit");
                ++out.orbits;
                out.points += lc.points;
                if (!lc.exact()) {
                    out.exact = false;
                    if (out.detail.empty())
                        out.detail = "nonzero residual at " + lc.firstBad + " (orbit " +
                                     std::to_string(orbit) + ")";
                }
                done = true;
            } catch (const SingularOrbitError& e) {
                ++out.retries;
                if (attempt == 7) {
                    out.inconclusive = true;
                    if (out.detail.empty())
                        out.detail = std::string("orbit sampling kept hitting singularities: ") +
                                     e.what();
                }
            }
        }
    }
    return out;
}

}  // namespace dadj
