#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dadj/expr.hpp"
#include "testutil.hpp"

using namespace dadj;
using namespace tu;

TEST_CASE("canonical form is stable") {
    Expr e = U(2) * U(0) - U(1).pow(2);
    CHECK(normalize(e) == e);
    CHECK(e.den().isConstant());
}

TEST_CASE("parity-sign square collapses to one") {
    Expr s = SigN();
    CHECK((s * s).isOne());
    CHECK(isZero(s * s - Q(1)));
}

TEST_CASE("parity-sign product combines masks") {
    // (-1)^m * (-1)^n == (-1)^(m+n)
    Expr sm = Expr::sign(1u), sn = Expr::sign(2u);
    CHECK(sm * sn == Expr::sign(3u));
}

TEST_CASE("common-denominator identity") {
    Expr e = U(1) / U(0) + U(0) / U(1);
    Expr want = (U(1).pow(2) + U(0).pow(2)) / (U(0) * U(1));
    CHECK(e == want);
}

TEST_CASE("quotient reduction cancels polynomial factors") {
    Expr a = (U(0).pow(2) - U(1).pow(2)) / (U(0) - U(1));
    CHECK(a == U(0) + U(1));
    Expr b = (U(0) * U(1) + U(1).pow(2)) / U(1);
    CHECK(b == U(0) + U(1));
}

TEST_CASE("zero denominators are rejected") {
    CHECK_THROWS_AS(U(0) / (U(1) - U(1)), MalformedExpressionError);
    // 1 + (-1)^n is a zero divisor of the parity algebra
    CHECK_THROWS_AS(Q(1) / (Q(1) + SigN()), MalformedExpressionError);
}

TEST_CASE("is_zero") {
    CHECK(isZero(U(1) - U(1)));
    CHECK(isZero(SigN() * SigN() - Q(1)));
    CHECK_FALSE(isZero(U(2) * U(0) - U(1).pow(2)));
}

TEST_CASE("diff basic") {
    Expr F = U(2) * U(0) - U(1).pow(2);
    CHECK(F.diff(Ua(0)) == U(2));
    Expr L = V(0) * F;
    CHECK(L.diff(Va(0)) == F);
}

TEST_CASE("diff quotient rule against central differences") {
    Expr f = U(0) * U(1) / (Q(2) * U(0) - U(1));
    Expr d = f.diff(Ua(1));
    Expr want = Q(2) * U(0).pow(2) / (Q(2) * U(0) - U(1)).pow(2);
    CHECK(isZero(d - want));

    // Independent numeric oracle: second-order central differences, two step
    // sizes; the error must shrink like h^2.
    auto evalAt = [&](const Expr& e, const mpq_class& u0, const mpq_class& u1) {
        Assignment at;
        at.set(Ua(0), u0);
        at.set(Ua(1), u1);
        return e.eval(at);
    };
    mpq_class u0(7, 3), u1(5, 2);
    auto fd = [&](const mpq_class& h) -> mpq_class {
        return (evalAt(f, u0, u1 + h) - evalAt(f, u0, u1 - h)) / (2 * h);
    };
    mpq_class exact = evalAt(d, u0, u1);
    mpq_class h1(1, 100), h2(1, 200);
    mpq_class e1 = abs(fd(h1) - exact), e2 = abs(fd(h2) - exact);
    CHECK(e1 > 0);
    CHECK(e2 * 3 < e1);  // ratio should be about 1/4
}

TEST_CASE("substitute v -> u") {
    std::map<Atom, Expr> b{{Va(0), U(0)}};
    CHECK(substitute(V(-2) - V(0), b) == U(-2) - U(0));
}

TEST_CASE("substitute v -> 1/u^2 propagates through shifts") {
    std::map<Atom, Expr> b{{Va(0), Q(1) / U(0).pow(2)}};
    Expr adj = V(0) * U(2) - Q(2) * V(-1) * U(0) + V(-2) * U(-2);
    Expr want = U(2) / U(0).pow(2) - Q(2) * U(0) / U(-1).pow(2) + Q(1) / U(-2);
    CHECK(isZero(substitute(adj, b) - want));
}

TEST_CASE("empty substitution is identity") {
    CHECK(substitute(U(0), {}) == U(0));
}

TEST_CASE("substitution singularities are reported") {
    std::map<Atom, Expr> b{{Va(0), U(0) - U(0)}};
    CHECK_THROWS_AS(substitute(Q(1) / V(0), b), SubstitutionSingularError);
}

TEST_CASE("eval") {
    Assignment at;
    at.set(Ua(0), 1);
    at.set(Ua(1), 2);
    at.set(Ua(2), 4);
    CHECK((U(2) * U(0) - U(1).pow(2)).eval(at) == 0);

    Assignment at2;
    at2.setLattice(0, 3);
    at2.setLattice(1, 4);
    CHECK(SigMN().eval(at2) == -1);

    Assignment at3;
    at3.set(Ua(0), 0);
    CHECK_THROWS_AS((Q(1) / U(0)).eval(at3), EvaluationSingularError);
}

TEST_CASE("shift acts on atoms, lattice symbols and parity signs") {
    CHECK((U(0) * V(-1)).shifted(MultiIndex{1}) == U(1) * V(0));
    CHECK((N() * U(0)).shifted(MultiIndex{-1}) == (N() - Q(1)) * U(-1));
    // p = 2: shifting (-1)^(m+n) by (1,0) flips the sign
    Expr e = SigMN() * U2(0, 0);
    CHECK(e.shifted(MultiIndex{1, 0}) == -(SigMN() * U2(1, 0)));
    // composition S_J S_K = S_{J+K}
    Expr g = (U2(0, 0) + M2()) / (U2(1, 1) - N2());
    CHECK(g.shifted(MultiIndex{1, 0}).shifted(MultiIndex{0, 1}) ==
          g.shifted(MultiIndex{1, 1}));
}

TEST_CASE("property: normalize is idempotent on random expressions") {
    for (unsigned seed = 0; seed < 60; ++seed) {
        ExprGen gen(seed);
        try {
            Expr e = gen.expr();
            CHECK(normalize(e) == e);
        } catch (const MalformedExpressionError&) {
            // random generator produced a genuine zero divide; fine
        }
    }
}

TEST_CASE("property: product rule") {
    for (unsigned seed = 100; seed < 140; ++seed) {
        ExprGen gen(seed);
        try {
            Expr a = gen.expr(2), b = gen.expr(2);
            Atom x = Ua(0);
            CHECK(isZero((a * b).diff(x) - a * b.diff(x) - b * a.diff(x), seed));
        } catch (const MalformedExpressionError&) {
        }
    }
}

TEST_CASE("property: field axioms at random points vs symbolic arithmetic") {
    for (unsigned seed = 200; seed < 230; ++seed) {
        ExprGen gen(seed);
        try {
            Expr a = gen.expr(2), b = gen.expr(2), c = gen.expr(2);
            CHECK(isZero((a + b) * c - (a * c + b * c), seed));
        } catch (const MalformedExpressionError&) {
        }
    }
}

TEST_CASE("property: substitute commutes with eval") {
    std::mt19937 rng(7);
    for (unsigned seed = 300; seed < 320; ++seed) {
        ExprGen gen(seed);
        try {
            Expr e = gen.expr(2);
            ExprGen uGen(seed + 5000, 1, /*useV=*/false);
            Expr g = uGen.expr(2);
            std::map<Atom, Expr> b{{Va(0), g}};
            Expr se = substitute(e, b);

            Assignment at;
            for (int k = -10; k <= 10; ++k) {
                at.set(Ua(k), mpq_class(static_cast<long>(rng() % 19) + 1, 3));
            }
            at.setLattice(0, static_cast<long>(rng() % 11) - 5);
            at.set(Atom::param("alpha"), mpq_class(2, 7));
            // bindings first: v_k = eval(shift(g, k))
            Assignment full = at;
            for (int k = -8; k <= 8; ++k) full.set(Va(k), g.shifted(MultiIndex{k}).eval(at));
            CHECK(se.eval(at) == e.eval(full));
        } catch (const MalformedExpressionError&) {
        } catch (const EvaluationSingularError&) {
        } catch (const SubstitutionSingularError&) {
        }
    }
}
