#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "dadj/parser.hpp"
#include "dadj/render.hpp"
#include "corpus.hpp"

using namespace dadj;
using namespace tu;

namespace {

SymbolTable syms1() {
    SymbolTable s = SymbolTable::defaults(1);
    s.parameters = {"alpha", "C"};
    s.functions = {"a1"};
    return s;
}

SymbolTable syms2() {
    SymbolTable s = SymbolTable::defaults(2);
    s.parameters = {"alpha", "beta"};
    return s;
}

}  // namespace

TEST_CASE("expression grammar basics") {
    SymbolTable s = syms1();
    CHECK(parseExpr("u[2]*u[0] - u[1]^2", s) == U(2) * U(0) - U(1).pow(2));
    CHECK(parseExpr("n*u[0]^2", s) == N() * U(0).pow(2));
    CHECK(parseExpr("3/2", s) == Q(3, 2));
    CHECK(parseExpr("-u[0]^2", s) == -U(0).pow(2));
    CHECK(parseExpr("(1/2 - n)*u[2]", s) == (Q(1, 2) - N()) * U(2));
    CHECK(parseExpr("u[0]/(2*u[0]-u[1])", s) == U(0) / (Q(2) * U(0) - U(1)));
    CHECK(parseExpr("v[-2] - v[0]", s) == V(-2) - V(0));
    CHECK(parseExpr("alpha*C", s) == Expr::param("alpha") * Expr::param("C"));
    CHECK(parseExpr("a1[0]*u[2] + a1*u[1]", s) ==
          Expr::func("a1", MultiIndex{0}) * (U(2) + U(1)));
    CHECK(parseExpr("u[0]^-2", s) == Q(1) / U(0).pow(2));
}

TEST_CASE("parity signs parse from (-1)^ notation") {
    CHECK(parseExpr("(-1)^(n)", syms1()) == SigN());
    CHECK(parseExpr("(-1)^(n+1)", syms1()) == -SigN());
    CHECK(parseExpr("(-1)^(2*n)", syms1()) == Q(1));
    CHECK(parseExpr("(-1)^(m+n)", syms2()) == SigMN());
    CHECK(parseExpr("(-1)^(m+n)*u[0,0]", syms2()) == SigMN() * U2(0, 0));
    CHECK(parseExpr("(-1)^2", syms1()) == Q(1));
    CHECK(parseExpr("(-1)^3", syms1()) == Q(-1));
}

TEST_CASE("expression grammar rejections carry positions") {
    SymbolTable s = syms1();
    CHECK_THROWS_AS(parseExpr("u[0]^(1/2)", s), ParseError);
    CHECK_THROWS_AS(parseExpr("w[0]", s), ParseError);
    CHECK_THROWS_AS(parseExpr("u[0,0]", s), ParseError);  // arity mismatch at p=1
    CHECK_THROWS_AS(parseExpr("u[0] +", s), ParseError);
    CHECK_THROWS_AS(parseExpr("u[0]/0", s), ParseError);
    CHECK_THROWS_AS(parseExpr("u(0)", s), ParseError);
    try {
        parseExpr("u[0] + w[1]", s);
        CHECK(false);
    } catch (const ParseError& e) {
        CHECK(e.line == 1);
        CHECK(e.column == 8);
    }
}

TEST_CASE("render round-trips through the parser") {
    SymbolTable s1 = syms1();
    std::vector<Expr> cases = {
        U(2) * U(0) - U(1).pow(2),
        U(0) * U(1) / (Q(2) * U(0) - U(1)),
        SigN() * U(0) + Q(3, 2),
        (Q(1, 2) - N()) * U(2) + (Q(2) * N() - Q(1, 2)) * U(1) - N() * U(0),
        Expr::func("a1", MultiIndex{-1}) * V(-1),
    };
    for (const auto& e : cases) {
        CAPTURE(e.str());
        CHECK(parseExpr(renderExpr(e, s1.names()), s1) == e);
    }
    SymbolTable s2 = syms2();
    std::vector<Expr> cases2 = {
        (U2(0, 0) - U2(1, 1)) * (U2(1, 0) - U2(0, 1)) + Expr::param("beta") - Expr::param("alpha"),
        SigMN() * U2(-1, 0) * V2(0, -1),
    };
    for (const auto& e : cases2) {
        CAPTURE(e.str());
        CHECK(parseExpr(renderExpr(e, s2.names()), s2) == e);
    }
}

TEST_CASE("random expressions round-trip") {
    for (unsigned seed = 0; seed < 40; ++seed) {
        ExprGen gen(seed, seed % 2 ? 2 : 1);
        SymbolTable s = SymbolTable::defaults(seed % 2 ? 2 : 1);
        s.parameters = {"alpha"};
        Expr e = gen.expr(3);
        CAPTURE(seed);
        CHECK(parseExpr(renderExpr(e, s.names()), s) == e);
    }
}

TEST_CASE("problem file for a one-dimensional equation") {
    ProblemFile pf = parseProblem(R"(
# geometric-progression equation
[system]
u[2]*u[0] - u[1]^2 = 0   solve u[2]

[symmetries]
Q1 = u[0]
Q2 = n*u[0]

[substitutions]
inv2 = 1/u[0]^2

[verify]
steps = 24
orbits = 3
seed = 7
)");
    CHECK(pf.system.p == 1);
    CHECK(pf.system.q == 1);
    REQUIRE(pf.system.equations.size() == 1);
    CHECK(pf.system.equations[0].lhs == corpus::geometric().equations[0].lhs);
    REQUIRE(pf.system.equations[0].solvedAtom.has_value());
    CHECK(*pf.system.equations[0].solvedAtom == Ua(2));
    CHECK(*pf.system.equations[0].solvedRhs == U(1).pow(2) / U(0));
    REQUIRE(pf.symmetries.size() == 2);
    CHECK(pf.symmetries[0].name == "Q1");
    CHECK(pf.symmetries[1].q[0] == N() * U(0));
    REQUIRE(pf.substitutions.size() == 1);
    CHECK(pf.substitutions[0].bindings.at(Va(0)) == Q(1) / U(0).pow(2));
    CHECK(pf.verify.steps == 24);
    CHECK(pf.verify.orbits == 3);
    CHECK(pf.verify.seed == 7);
}

TEST_CASE("problem file for the quad-graph equation") {
    ProblemFile pf = parseProblem(R"(
[system]
dimension = 2
parameters = alpha, beta
(u[0,0]-u[1,1])*(u[1,0]-u[0,1]) + beta - alpha = 0  solve u[1,1]

[symmetries]
X1 = 1
X4 = u[0,0] with alpha = 2*alpha, beta = 2*beta
)");
    CHECK(pf.system.p == 2);
    CHECK(pf.system.equations[0].lhs == corpus::h1().equations[0].lhs);
    CHECK(*pf.system.equations[0].solvedAtom == U2a(1, 1));
    REQUIRE(pf.symmetries.size() == 2);
    CHECK(pf.symmetries[1].paramComps.size() == 2);
    CHECK(pf.symmetries[1].paramComps[0].first == "alpha");
    CHECK(pf.symmetries[1].paramComps[0].second == Q(2) * Expr::param("alpha"));
}

TEST_CASE("solved form inferred from explicit writing") {
    ProblemFile pf = parseProblem(R"(
[system]
u[2] = u[1]^2/u[0]
)");
    REQUIRE(pf.system.equations[0].solvedAtom.has_value());
    CHECK(*pf.system.equations[0].solvedAtom == Ua(2));
    CHECK(*pf.system.equations[0].solvedRhs == U(1).pow(2) / U(0));
    CHECK(isZero(pf.system.equations[0].lhs - (U(2) - U(1).pow(2) / U(0))));
}

TEST_CASE("problem file diagnostics") {
    CHECK_THROWS_AS(parseProblem("[system]\n"), ParseError);  // no equations
    CHECK_THROWS_AS(parseProblem("u[2] = u[0]\n"), ParseError);  // before any section
    CHECK_THROWS_AS(parseProblem("[nonsense]\nx = 1\n"), ParseError);
    CHECK_THROWS_AS(parseProblem("[system]\nu[2] - w[0] = 0\n"), ParseError);
    CHECK_THROWS_AS(parseProblem("[system]\nu[2]-u[0] = 0\n[symmetries]\nQ = u[0]\nQ = 1\n"),
                    ParseError);
    CHECK_THROWS_AS(parseProblem("[system]\nu[2]-u[0] = 0\n[symmetries]\nQ = v[0]\n"), ParseError);
    CHECK_THROWS_AS(parseProblem("[system]\nu[2]-u[0] = 0\n[verify]\nsteps = lots\n"), ParseError);
    CHECK_THROWS_AS(parseProblem("[system]\ndimension = 2\nu[0,0] - u[0,0] = 0\n"), ParseError);
    try {
        parseProblem("[system]\nu[2]*u[0] - u[1]^2 = 0 solve u[1]\n");
        CHECK(false);
    } catch (const ParseError& e) {
        CHECK(e.line == 2);
    }
}

TEST_CASE("parser rejects rather than crashes on fuzzed input") {
    std::mt19937 rng(20240817u);
    const std::string alphabet = "un[]()+-*/^=,.#_ \t\nabz019";
    int parsed = 0;
    for (int iter = 0; iter < 500; ++iter) {
        std::string s;
        size_t len = rng() % 60;
        for (size_t i = 0; i < len; ++i) s += alphabet[rng() % alphabet.size()];
        try {
            parseProblem("[system]\n" + s + "\n");
            ++parsed;
        } catch (const Error&) {
            // any dadj error is acceptable; crashes are not
        }
    }
    CHECK(parsed >= 0);  // reaching here means no crash
}
