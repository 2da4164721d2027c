#pragma once

#include <string>
#include <vector>

#include "dadj/grid.hpp"
#include "dadj/noether.hpp"
#include "dadj/render.hpp"
#include "dadj/system.hpp"

namespace dadj {

// Declared names an expression may reference.  v-component names are derived
// from the u-component names ("v" for a single component, "v1", "v2", ...
// otherwise).
struct SymbolTable {
    int p = 1;
    std::vector<std::string> lattice;     // size p
    std::vector<std::string> components;  // u-component names
    std::vector<std::string> parameters;
    std::vector<std::string> functions;  // named coefficient functions of n

    static SymbolTable defaults(int p, int q = 1);
    NameTable names() const;
};

// Parsed equation file: [system] header and equations, [symmetries],
// [substitutions], [verify].
struct ProblemFile {
    SymbolTable symbols;
    DifferenceSystem system;
    std::vector<Characteristic> symmetries;
    std::vector<Substitution> substitutions;
    VerifySettings verify;

    const Characteristic* symmetry(const std::string& name) const;
    const Substitution* substitution(const std::string& name) const;
};

// Parse a single expression in the equation-file grammar.  Throws ParseError
// with line/column on failure.
Expr parseExpr(const std::string& text, const SymbolTable& symbols);

// Parse a whole problem file.  Throws ParseError.
ProblemFile parseProblem(const std::string& text);

}  // namespace dadj
