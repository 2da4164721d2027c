#include "dadj/parser.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

#include "dadj/calculus.hpp"
#include "dadj/error.hpp"

namespace dadj {

SymbolTable SymbolTable::defaults(int p, int q) {
    SymbolTable s;
    s.p = p;
    NameTable nt = NameTable::defaults(p, q);
    s.lattice = nt.latticeNames;
    s.components = nt.componentNames;
    return s;
}

NameTable SymbolTable::names() const {
    NameTable nt;
    nt.latticeNames = lattice;
    nt.componentNames = components;
    return nt;
}

const Characteristic* ProblemFile::symmetry(const std::string& name) const {
    for (const auto& s : symmetries)
        if (s.name == name) return &s;
    return nullptr;
}

const Substitution* ProblemFile::substitution(const std::string& name) const {
    for (const auto& s : substitutions)
        if (s.name == name) return &s;
    return nullptr;
}

namespace {

struct Token {
    enum class Kind { Ident, Int, Punct, End } kind = Kind::End;
    std::string text;
    int line = 0;
    int column = 0;
};

std::vector<Token> tokenize(const std::string& text, int line) {
    std::vector<Token> out;
    size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (c == '#') break;
        int col = static_cast<int>(i) + 1;
        if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t j = i;
            while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
            out.push_back({Token::Kind::Int, text.substr(i, j - i), line, col});
            i = j;
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t j = i;
            while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_')) ++j;
            out.push_back({Token::Kind::Ident, text.substr(i, j - i), line, col});
            i = j;
            continue;
        }
        if (std::string("+-*/^()[],=").find(c) != std::string::npos) {
            out.push_back({Token::Kind::Punct, std::string(1, c), line, col});
            ++i;
            continue;
        }
        throw ParseError("unexpected character '" + std::string(1, c) + "'", line, col);
    }
    out.push_back({Token::Kind::End, "", line, static_cast<int>(text.size()) + 1});
    return out;
}

class ExprParser {
  public:
    ExprParser(std::vector<Token> toks, const SymbolTable& syms)
        : toks_(std::move(toks)), syms_(syms) {}

    Expr parseFull() {
        Expr e = expr();
        expectEnd();
        return e;
    }

    Expr expr() {
        Expr e = term();
        while (isPunct("+") || isPunct("-")) {
            bool plus = cur().text == "+";
            advance();
            Expr t = term();
            e = plus ? e + t : e - t;
        }
        return e;
    }

    const Token& cur() const { return toks_[pos_]; }
    bool atEnd() const { return cur().kind == Token::Kind::End; }
    bool isPunct(const char* s) const {
        return cur().kind == Token::Kind::Punct && cur().text == s;
    }
    bool isIdent(const char* s) const {
        return cur().kind == Token::Kind::Ident && cur().text == s;
    }
    void advance() { ++pos_; }
    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError(what, cur().line, cur().column);
    }
    void expect(const char* s) {
        if (!isPunct(s)) fail(std::string("expected '") + s + "'");
        advance();
    }
    void expectEnd() {
        if (!atEnd()) fail("unexpected trailing input '" + cur().text + "'");
    }

    // Reference to a dependent atom, e.g. u[1,0].
    Atom atomRef() {
        if (cur().kind != Token::Kind::Ident) fail("expected a variable reference");
        std::string name = cur().text;
        auto dep = depClassOf(name);
        if (!dep) fail("'" + name + "' is not a declared component");
        advance();
        return Atom::dep(dep->first, dep->second, shiftSuffix());
    }

  private:
    std::vector<Token> toks_;
    const SymbolTable& syms_;
    size_t pos_ = 0;

    long intLit() {
        bool neg = false;
        if (isPunct("-")) {
            neg = true;
            advance();
        }
        if (cur().kind != Token::Kind::Int) fail("expected an integer");
        long v = std::stol(cur().text);
        advance();
        return neg ? -v : v;
    }

    MultiIndex shiftSuffix() {
        expect("[");
        std::vector<int> c;
        c.push_back(static_cast<int>(intLit()));
        while (isPunct(",")) {
            advance();
            c.push_back(static_cast<int>(intLit()));
        }
        expect("]");
        if (static_cast<int>(c.size()) != syms_.p)
            fail("shift arity " + std::to_string(c.size()) + " does not match lattice dimension " +
                 std::to_string(syms_.p));
        return MultiIndex(c);
    }

    std::optional<std::pair<VarClass, int>> depClassOf(const std::string& name) const {
        for (size_t i = 0; i < syms_.components.size(); ++i)
            if (syms_.components[i] == name) return {{VarClass::U, static_cast<int>(i)}};
        if (syms_.components.size() == 1) {
            if (name == "v") return {{VarClass::V, 0}};
        } else {
            for (size_t i = 0; i < syms_.components.size(); ++i)
                if (name == "v" + std::to_string(i + 1)) return {{VarClass::V, static_cast<int>(i)}};
        }
        return std::nullopt;
    }

    Expr primary() {
        if (isPunct("(")) {
            advance();
            Expr e = expr();
            expect(")");
            return e;
        }
        if (cur().kind == Token::Kind::Int) {
            mpz_class v(cur().text);
            advance();
            return Expr::rational(mpq_class(v));
        }
        if (cur().kind != Token::Kind::Ident) fail("expected an expression");
        std::string name = cur().text;
        for (size_t i = 0; i < syms_.lattice.size(); ++i)
            if (syms_.lattice[i] == name) {
                advance();
                return Expr::lattice(static_cast<int>(i));
            }
        if (auto dep = depClassOf(name)) {
            advance();
            return Expr::atom(Atom::dep(dep->first, dep->second, shiftSuffix()));
        }
        if (std::find(syms_.parameters.begin(), syms_.parameters.end(), name) != syms_.parameters.end()) {
            advance();
            return Expr::param(name);
        }
        if (std::find(syms_.functions.begin(), syms_.functions.end(), name) != syms_.functions.end()) {
            advance();
            MultiIndex j = isPunct("[") ? shiftSuffix() : MultiIndex::zero(syms_.p);
            return Expr::func(name, j);
        }
        fail("unknown symbol '" + name + "'");
    }

    // The exponent of a parity sign must be an integer-coefficient affine
    // function of the lattice symbols.
    Expr signFromExponent(const Expr& g, const Token& at) {
        if (!(g.den().isConstant() && g.den().constantValue() == 1))
            throw ParseError("parity-sign exponent must be a polynomial", at.line, at.column);
        std::uint32_t mask = 0;
        bool odd = false;
        for (const auto& [m, c] : g.num().terms()) {
            if (m.sigma != 0 || c.get_den() != 1)
                throw ParseError("parity-sign exponent must have integer coefficients", at.line,
                                 at.column);
            bool coeffOdd = mpz_class(c.get_num() % 2) != 0;
            if (m.factors.empty()) {
                odd ^= coeffOdd;
                continue;
            }
            if (m.factors.size() != 1 || m.factors[0].second != 1 ||
                m.factors[0].first.kind != Atom::Kind::Lattice)
                throw ParseError("parity-sign exponent must be affine in the lattice symbols",
                                 at.line, at.column);
            if (coeffOdd) mask ^= 1u << m.factors[0].first.index;
        }
        return Expr::sign(mask, odd);
    }

    Expr power() {
        Expr base = primary();
        if (!isPunct("^")) return base;
        Token caret = cur();
        advance();
        if (isPunct("(")) {
            Token open = cur();
            advance();
            Expr g = expr();
            expect(")");
            if (base.isRationalConstant() && base.rationalValue() == -1)
                return signFromExponent(g, open);
            if (g.isRationalConstant() && g.rationalValue().get_den() == 1) {
                long e = static_cast<long>(g.rationalValue().get_num().get_si());
                return e >= 0 ? base.pow(static_cast<int>(e))
                              : Expr::integer(1) / base.pow(static_cast<int>(-e));
            }
            throw ParseError("non-integer exponent", open.line, open.column);
        }
        bool neg = false;
        if (isPunct("-")) {
            neg = true;
            advance();
        }
        if (cur().kind != Token::Kind::Int)
            throw ParseError("expected an integer exponent", caret.line, caret.column);
        int e = std::stoi(cur().text);
        advance();
        return neg ? Expr::integer(1) / base.pow(e) : base.pow(e);
    }

    Expr unary() {
        if (isPunct("-")) {
            advance();
            return -unary();
        }
        return power();
    }

    Expr term() {
        Expr e = unary();
        while (isPunct("*") || isPunct("/")) {
            bool mul = cur().text == "*";
            Token op = cur();
            advance();
            Expr f = unary();
            if (!mul && isZero(f)) throw ParseError("division by zero", op.line, op.column);
            e = mul ? e * f : e / f;
        }
        return e;
    }
};

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::string stripComment(const std::string& s) {
    size_t h = s.find('#');
    return h == std::string::npos ? s : s.substr(0, h);
}

// Comma split ignoring commas nested in brackets or parentheses.
std::vector<std::string> splitTopLevel(const std::string& s) {
    std::vector<std::string> out;
    int depth = 0;
    std::string curpart;
    for (char c : s) {
        if (c == '(' || c == '[') ++depth;
        if (c == ')' || c == ']') --depth;
        if (c == ',' && depth == 0) {
            out.push_back(trim(curpart));
            curpart.clear();
        } else {
            curpart += c;
        }
    }
    out.push_back(trim(curpart));
    return out;
}

std::vector<std::string> nameList(const std::string& value, int line) {
    std::vector<std::string> out;
    for (const auto& part : splitTopLevel(value)) {
        if (part.empty()) throw ParseError("empty name in list", line, 1);
        for (char c : part)
            if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_')
                throw ParseError("invalid name '" + part + "'", line, 1);
        out.push_back(part);
    }
    return out;
}

long intValue(const std::string& value, int line) {
    try {
        size_t used = 0;
        long v = std::stol(value, &used);
        if (used != value.size()) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        throw ParseError("expected an integer, got '" + value + "'", line, 1);
    }
}

struct Line {
    int number;
    std::string text;
};

}  // namespace

Expr parseExpr(const std::string& text, const SymbolTable& symbols) {
    return ExprParser(tokenize(text, 1), symbols).parseFull();
}

ProblemFile parseProblem(const std::string& text) {
    ProblemFile pf;
    std::map<std::string, std::vector<Line>> sections;
    std::string section;
    std::istringstream in(text);
    std::string raw;
    int lineNo = 0;
    while (std::getline(in, raw)) {
        ++lineNo;
        std::string s = trim(stripComment(raw));
        if (s.empty()) continue;
        if (s.front() == '[' && s.back() == ']') {
            section = trim(s.substr(1, s.size() - 2));
            if (section != "system" && section != "symmetries" && section != "substitutions" &&
                section != "verify")
                throw ParseError("unknown section '" + section + "'", lineNo, 1);
            continue;
        }
        if (section.empty()) throw ParseError("content before any section header", lineNo, 1);
        sections[section].push_back({lineNo, s});
    }

    // [system] header keys, then equations.
    pf.symbols = SymbolTable::defaults(1);
    std::vector<Line> equationLines;
    bool sawEquation = false;
    bool sawComponents = false, sawLattice = false;
    for (const auto& ln : sections["system"]) {
        size_t eq = ln.text.find('=');
        std::string key = eq == std::string::npos ? "" : trim(ln.text.substr(0, eq));
        std::string value = eq == std::string::npos ? "" : trim(ln.text.substr(eq + 1));
        bool isHeader = key == "dimension" || key == "lattice" || key == "components" ||
                        key == "parameters" || key == "functions";
        if (isHeader) {
            if (sawEquation)
                throw ParseError("header line after the first equation", ln.number, 1);
            if (key == "dimension") {
                long p = intValue(value, ln.number);
                if (p < 1 || p > 8)
                    throw ParseError("lattice dimension out of range", ln.number, 1);
                pf.symbols.p = static_cast<int>(p);
                if (!sawLattice)
                    pf.symbols.lattice = NameTable::defaults(pf.symbols.p).latticeNames;
            } else if (key == "lattice") {
                pf.symbols.lattice = nameList(value, ln.number);
                sawLattice = true;
            } else if (key == "components") {
                pf.symbols.components = nameList(value, ln.number);
                sawComponents = true;
            } else if (key == "parameters") {
                pf.symbols.parameters = nameList(value, ln.number);
            } else {
                pf.symbols.functions = nameList(value, ln.number);
            }
            continue;
        }
        sawEquation = true;
        equationLines.push_back(ln);
    }
    (void)sawComponents;
    if (static_cast<int>(pf.symbols.lattice.size()) != pf.symbols.p)
        throw ParseError("lattice name count does not match dimension", 1, 1);
    if (equationLines.empty()) throw ParseError("no equations", lineNo, 1);

    pf.system.p = pf.symbols.p;
    pf.system.q = static_cast<int>(pf.symbols.components.size());
    for (const auto& ln : equationLines) {
        ExprParser ep(tokenize(ln.text, ln.number), pf.symbols);
        Expr lhs = ep.expr();
        ep.expect("=");
        Expr rhs = ep.expr();
        Equation equation;
        equation.lhs = lhs - rhs;
        if (ep.isIdent("solve")) {
            ep.advance();
            Atom a = ep.atomRef();
            equation.solvedAtom = a;
            try {
                equation.solvedRhs = solveFor(equation.lhs, a);
            } catch (const Error& e) {
                throw ParseError(std::string("cannot solve for the declared atom: ") + e.what(),
                                 ln.number, 1);
            }
        }
        ep.expectEnd();
        if (equation.lhs.isZeroFast())
            throw ParseError("equation is identically zero", ln.number, 1);
        // `u[2] = rhs` declares its own solved form.
        if (!equation.solvedAtom) {
            const auto& n = lhs.num();
            if (lhs.den().isConstant() && n.size() == 1 && n.terms().begin()->second == 1) {
                const Monomial& m = n.terms().begin()->first;
                if (m.sigma == 0 && m.factors.size() == 1 && m.factors[0].second == 1 &&
                    m.factors[0].first.isDep() && !rhs.dependsOn(m.factors[0].first)) {
                    equation.solvedAtom = m.factors[0].first;
                    equation.solvedRhs = rhs * Expr::rational(lhs.den().constantValue());
                }
            }
        }
        pf.system.equations.push_back(std::move(equation));
    }

    const int q = pf.system.q;
    for (const auto& ln : sections["symmetries"]) {
        size_t eq = ln.text.find('=');
        if (eq == std::string::npos)
            throw ParseError("expected 'NAME = expression'", ln.number, 1);
        std::string name = trim(ln.text.substr(0, eq));
        if (pf.symmetry(name))
            throw ParseError("duplicate symmetry name '" + name + "'", ln.number, 1);
        std::string body = trim(ln.text.substr(eq + 1));
        std::string withPart;
        size_t w = body.find(" with ");
        if (w != std::string::npos) {
            withPart = trim(body.substr(w + 6));
            body = trim(body.substr(0, w));
        }
        Characteristic c;
        c.name = name;
        for (const auto& part : splitTopLevel(body)) {
            Expr e = parseExpr(part, pf.symbols);
            for (const auto& a : e.atoms())
                if (a.isDep(VarClass::V))
                    throw ParseError("characteristic references an adjoint variable", ln.number, 1);
            c.q.push_back(e);
        }
        if (static_cast<int>(c.q.size()) != q)
            throw ParseError("expected " + std::to_string(q) + " component expression(s)",
                             ln.number, 1);
        if (!withPart.empty())
            for (const auto& part : splitTopLevel(withPart)) {
                size_t peq = part.find('=');
                if (peq == std::string::npos)
                    throw ParseError("expected 'parameter = expression' after 'with'", ln.number, 1);
                std::string pname = trim(part.substr(0, peq));
                if (std::find(pf.symbols.parameters.begin(), pf.symbols.parameters.end(), pname) ==
                    pf.symbols.parameters.end())
                    throw ParseError("unknown parameter '" + pname + "'", ln.number, 1);
                Expr rho = parseExpr(trim(part.substr(peq + 1)), pf.symbols);
                for (const auto& a : rho.atoms())
                    if (a.kind != Atom::Kind::Param)
                        throw ParseError("parameter component must reference only parameters",
                                         ln.number, 1);
                c.paramComps.emplace_back(pname, rho);
            }
        pf.symmetries.push_back(std::move(c));
    }

    for (const auto& ln : sections["substitutions"]) {
        size_t eq = ln.text.find('=');
        if (eq == std::string::npos)
            throw ParseError("expected 'NAME = expression'", ln.number, 1);
        std::string name = trim(ln.text.substr(0, eq));
        if (pf.substitution(name))
            throw ParseError("duplicate substitution name '" + name + "'", ln.number, 1);
        std::vector<Expr> f;
        for (const auto& part : splitTopLevel(trim(ln.text.substr(eq + 1))))
            f.push_back(parseExpr(part, pf.symbols));
        if (static_cast<int>(f.size()) != q)
            throw ParseError("expected " + std::to_string(q) + " component expression(s)",
                             ln.number, 1);
        pf.substitutions.push_back(vSubstitution(name, pf.symbols.p, f));
    }

    for (const auto& ln : sections["verify"]) {
        size_t eq = ln.text.find('=');
        if (eq == std::string::npos) throw ParseError("expected 'key = value'", ln.number, 1);
        std::string key = trim(ln.text.substr(0, eq));
        long value = intValue(trim(ln.text.substr(eq + 1)), ln.number);
        if (key == "steps")
            pf.verify.steps = value;
        else if (key == "orbits")
            pf.verify.orbits = static_cast<int>(value);
        else if (key == "seed")
            pf.verify.seed = static_cast<unsigned>(value);
        else if (key == "magnitude")
            pf.verify.magnitude = value;
        else
            throw ParseError("unknown verify key '" + key + "'", ln.number, 1);
    }

    return pf;
}

}  // namespace dadj
