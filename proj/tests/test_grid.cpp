#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "corpus.hpp"
#include "dadj/calculus.hpp"
#include "dadj/error.hpp"
#include "dadj/grid.hpp"
#include "dadj/noether.hpp"
#include "dadj/symmetry.hpp"
#include "testutil.hpp"

using namespace dadj;
using namespace tu;
using namespace corpus;

namespace {

ExtendedCharacteristic extend(const DifferenceSystem& sys, const Characteristic& x) {
    auto v = checkSymmetry(sys, x);
    REQUIRE(v.witness);
    return extendCharacteristic(sys, x, *v.witness);
}

InitialData constant(long v) {
    return [v](int, const std::vector<int>&) { return mpq_class(v); };
}

// Deterministic pseudo-random rationals, distinct enough to dodge the corpus
// singular sets.
InitialData scattered(unsigned seed) {
    return [seed](int comp, const std::vector<int>& x) {
        unsigned h = seed * 2654435761u + static_cast<unsigned>(comp) * 40503u;
        for (int c : x) h = (h ^ static_cast<unsigned>(c + 1000)) * 2654435761u;
        long num = 1 + static_cast<long>(h % 7);
        long den = 1 + static_cast<long>((h >> 8) % 3);
        mpq_class v(num, den);
        v.canonicalize();
        return (h >> 16) % 2 ? v : mpq_class(-v);
    };
}

DifferenceSystem waveSolved() {
    DifferenceSystem s = forwardNormalize(wave());
    s.equations[0].solvedAtom = Atom::dep(VarClass::U, 0, MultiIndex{2, 1});
    return s;
}

// All window points, lexicographic.
std::vector<std::vector<int>> box(const std::vector<int>& lo, const std::vector<int>& hi) {
    std::vector<std::vector<int>> out;
    std::vector<int> x = lo;
    while (true) {
        out.push_back(x);
        int i = static_cast<int>(x.size()) - 1;
        for (; i >= 0; --i) {
            if (++x[static_cast<size_t>(i)] <= hi[static_cast<size_t>(i)]) break;
            x[static_cast<size_t>(i)] = lo[static_cast<size_t>(i)];
        }
        if (i < 0) break;
    }
    return out;
}

}  // namespace

TEST_CASE("geometric orbit of the multiplicative equation") {
    EvalEnv env;
    auto data = [](int, const std::vector<int>& x) { return mpq_class(x[0] == 0 ? 1 : 2); };
    SolutionGrid g = iterateSolution(geometric(), env, data, {0}, {12});
    for (int n = 0; n <= 12; ++n)
        CHECK(*g.find(0, {n}) == mpq_class(mpz_class(1) << n));
    CHECK(g.freeEntries.size() == 2);
    CHECK(g.freeEntries.count({0, {0}}) == 1);
    CHECK(g.freeEntries.count({0, {1}}) == 1);
}

TEST_CASE("constant orbits") {
    EvalEnv env;
    SolutionGrid g = iterateSolution(recip(), env, constant(1), {0}, {15});
    for (int n = 0; n <= 15; ++n) CHECK(*g.find(0, {n}) == 1);

    g = iterateSolution(linear3(), env, constant(1), {0}, {15});
    for (int n = 0; n <= 15; ++n) CHECK(*g.find(0, {n}) == 1);
}

TEST_CASE("singular orbit is reported with its point") {
    EvalEnv env;
    auto data = [](int, const std::vector<int>& x) { return mpq_class(x[0] == 0 ? 1 : 2); };
    // 2 u_0 - u_1 = 0 on this data, so the first computed entry blows up.
    CHECK_THROWS_AS(iterateSolution(recip(), env, data, {0}, {10}), SingularOrbitError);
    try {
        iterateSolution(recip(), env, data, {0}, {10});
    } catch (const SingularOrbitError& e) {
        CHECK(std::string(e.what()).find("[2]") != std::string::npos);
    }
}

TEST_CASE("corner fill satisfies the quad-graph equation") {
    EvalEnv env;
    env.params["alpha"] = mpq_class(2);
    env.params["beta"] = mpq_class(1, 2);
    DifferenceSystem sys = h1();
    SolutionGrid g = iterateSolution(sys, env, scattered(3), {0, 0}, {8, 8});
    env.u = &g;
    const Expr& F = sys.equations[0].lhs;
    int checked = 0;
    for (const auto& b : box({0, 0}, {8, 8}))
        if (env.covers(F, b)) {
            CHECK(env.evalAt(F, b) == 0);
            ++checked;
        }
    CHECK(checked == 64);  // bases with the whole square in the window
    // free data on the cross m = 0 or n = 0
    CHECK(g.freeEntries.size() == 17);
    for (const auto& [comp, x] : g.freeEntries) CHECK((x[0] == 0 || x[1] == 0));
}

TEST_CASE("staircase fill satisfies the forward-normalized wave scheme") {
    EvalEnv env;
    env.params["alpha"] = mpq_class(3);
    env.params["beta"] = mpq_class(5, 2);
    DifferenceSystem sys = waveSolved();
    SolutionGrid g = iterateSolution(sys, env, scattered(4), {0, 0}, {8, 8});
    env.u = &g;
    const Expr& F = sys.equations[0].lhs;
    int checked = 0;
    for (const auto& b : box({0, 0}, {8, 8}))
        if (env.covers(F, b)) {
            CHECK(env.evalAt(F, b) == 0);
            ++checked;
        }
    CHECK(checked == 7 * 7);  // stencil spans 0..2 in both directions
    for (const auto& [comp, x] : g.freeEntries)
        CHECK((x[0] <= 1 || x[1] == 0 || x[1] == 8));
    CHECK(g.freeEntries.size() == 2 * 9 + 2 * 7);
}

TEST_CASE("adjoint of the three-point linear equation has constant orbits") {
    EvalEnv env;
    SolutionGrid ug = iterateSolution(linear3(), env, constant(1), {0}, {14});
    env.u = &ug;
    SolutionGrid vg = iterateAdjoint(linear3(), env, constant(3), {0}, {14});
    for (int n = 0; n <= 14; ++n) CHECK(*vg.find(0, {n}) == 3);
}

TEST_CASE("adjoint continuation reproduces v = 1/u^2") {
    EvalEnv env;
    auto data = [](int, const std::vector<int>& x) { return mpq_class(x[0] == 0 ? 1 : 2); };
    SolutionGrid ug = iterateSolution(geometric(), env, data, {0}, {14});
    env.u = &ug;
    auto vdata = [&ug](int, const std::vector<int>& x) -> mpq_class {
        mpq_class u = *ug.find(0, x);
        return mpq_class(1) / (u * u);
    };
    SolutionGrid vg = iterateAdjoint(geometric(), env, vdata, {0}, {14});
    int computed = 0;
    for (int n = 0; n <= 14; ++n) {
        mpq_class u = *ug.find(0, {n});
        CHECK(*vg.find(0, {n}) == mpq_class(1) / (u * u));
        if (!vg.freeEntries.count({0, {n}})) ++computed;
    }
    CHECK(computed >= 10);
}

TEST_CASE("function atoms evaluate deterministically and nonzero") {
    EvalEnv a, b;
    a.funcSeed = b.funcSeed = 99;
    CHECK(a.funcValue("a1", {3}) == b.funcValue("a1", {3}));
    CHECK(a.funcValue("a1", {3}) != 0);
    a.funcSeed = 100;
    bool differsSomewhere = false;
    for (int n = 0; n < 16 && !differsSomewhere; ++n)
        differsSomewhere = a.funcValue("a1", {n}) != b.funcValue("a1", {n});
    CHECK(differsSomewhere);
}

TEST_CASE("random-orbit verification accepts constructed laws") {
    VerifySettings vs;
    vs.steps = 20;
    vs.orbits = 5;
    vs.seed = 11;

    auto law = noetherFlux(geometric(), extend(geometric(), charac("Q1", U(0))));
    auto out = verifyConservationLaw(geometric(), law, vs);
    CHECK(out.verified());
    CHECK(out.orbits == 5);
    CHECK(out.points >= 100);

    law = noetherFlux(recip(), extend(recip(), charac("Q1", U(0))));
    out = verifyConservationLaw(recip(), law, vs);
    CHECK(out.verified());

    Substitution inv2 = vSubstitution("inv2", 1, {Q(1) / U(0).pow(2)});
    auto transferred = transfer(geometric(), noetherFlux(geometric(), extend(geometric(), charac("Q2", N() * U(0)))), inv2);
    CHECK(transferred.certifies == Certifies::Original);
    out = verifyConservationLaw(geometric(), transferred, vs);
    CHECK(out.verified());
}

TEST_CASE("random-orbit verification of a two-dimensional law") {
    DifferenceSystem sys = waveSolved();
    auto law = directFlux(wave(), extend(wave(), charac("X1", U2(0, 0))));
    VerifySettings vs;
    vs.steps = 12;
    vs.orbits = 2;
    vs.seed = 5;
    auto out = verifyConservationLaw(sys, law, vs);
    CHECK(out.verified());
    CHECK(out.points >= 2 * 12 * 12);
}

TEST_CASE("verification is deterministic in the seed") {
    auto law = noetherFlux(geometric(), extend(geometric(), charac("Q1", U(0))));
    VerifySettings vs;
    vs.steps = 20;
    vs.orbits = 3;
    vs.seed = 42;
    auto a = verifyConservationLaw(geometric(), law, vs);
    auto b = verifyConservationLaw(geometric(), law, vs);
    CHECK(a.orbits == b.orbits);
    CHECK(a.points == b.points);
    CHECK(a.retries == b.retries);
    CHECK(a.exact == b.exact);
}

TEST_CASE("corrupted flux fails verification with a witness point") {
    auto law = noetherFlux(geometric(), extend(geometric(), charac("Q1", U(0))));
    law.fluxes[0] = law.fluxes[0] + U(0);
    VerifySettings vs;
    vs.steps = 20;
    vs.orbits = 2;
    vs.seed = 1;
    auto out = verifyConservationLaw(geometric(), law, vs);
    CHECK(!out.exact);
    CHECK(!out.verified());
    CHECK(out.detail.find("nonzero residual at") == 0);
}

TEST_CASE("iteration preconditions are enforced") {
    EvalEnv env;
    CHECK_THROWS_AS(iterateSolution(wave(), env, constant(1), {0, 0}, {4, 4}), Error);
    CHECK_THROWS_AS(iterateSolution(geometric(), env, constant(1), {0}, {-1}), Error);
    CHECK_THROWS_AS(iterateAdjoint(geometric(), env, constant(1), {0}, {5}), Error);  // no u-grid

    // Solved form that reaches forward cannot be marched.
    DifferenceSystem bad;
    bad.p = 1;
    bad.q = 1;
    bad.equations.push_back({U(1) - U(0) - U(2), Ua(1), U(0) + U(2)});
    CHECK_THROWS_AS(iterateSolution(bad, env, constant(1), {0}, {5}), Error);
}
