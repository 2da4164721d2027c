#include "dadj/render.hpp"

#include <sstream>

namespace dadj {

NameTable NameTable::defaults(int p, int q) {
    NameTable nt;
    if (p == 2)
        nt.latticeNames = {"m", "n"};
    else {
        nt.latticeNames.resize(static_cast<size_t>(p));
        for (int i = 0; i < p; ++i) nt.latticeNames[static_cast<size_t>(i)] = p == 1 ? "n" : "n" + std::to_string(i + 1);
    }
    for (int a = 0; a < q; ++a)
        nt.componentNames.push_back(q == 1 ? "u" : "u" + std::to_string(a + 1));
    return nt;
}

std::string NameTable::lattice(int direction) const {
    if (direction < static_cast<int>(latticeNames.size())) return latticeNames[static_cast<size_t>(direction)];
    return "n" + std::to_string(direction + 1);
}

std::string NameTable::component(VarClass cls, int comp) const {
    if (cls == VarClass::U && comp < static_cast<int>(componentNames.size()))
        return componentNames[static_cast<size_t>(comp)];
    if (cls == VarClass::V) return componentNames.size() > 1 ? "v" + std::to_string(comp + 1) : "v";
    return "u" + std::to_string(comp + 1);
}

namespace {

std::string renderShift(const MultiIndex& j) {
    std::string s = "[";
    for (int i = 0; i < j.dim(); ++i) {
        if (i) s += ",";
        s += std::to_string(j[i]);
    }
    return s + "]";
}

std::string renderAtom(const Atom& a, const NameTable& names) {
    switch (a.kind) {
        case Atom::Kind::Lattice:
            return names.lattice(a.index);
        case Atom::Kind::Param:
            return a.name;
        case Atom::Kind::Func:
            return a.name + renderShift(a.shift);
        case Atom::Kind::Dep:
            return names.component(a.cls, a.comp) + renderShift(a.shift);
    }
    return "?";
}

std::string renderSigma(std::uint32_t mask, const NameTable& names) {
    std::string s = "(-1)^(";
    bool first = true;
    for (int i = 0; i < 32; ++i) {
        if (mask & (1u << i)) {
            if (!first) s += "+";
            s += names.lattice(i);
            first = false;
        }
    }
    return s + ")";
}

std::string renderRational(const mpq_class& q) {
    std::ostringstream os;
    os << q.get_num();
    if (q.get_den() != 1) os << "/" << q.get_den();
    return os.str();
}

}  // namespace

std::string renderPoly(const Polynomial& p, const NameTable& names) {
    if (p.isZero()) return "0";
    std::string out;
    // Leading term first.
    for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
        const auto& [m, c] = *it;
        mpq_class coeff = c;
        if (out.empty()) {
            if (coeff < 0) {
                out += "-";
                coeff = -coeff;
            }
        } else {
            out += coeff < 0 ? " - " : " + ";
            if (coeff < 0) coeff = -coeff;
        }
        std::vector<std::string> pieces;
        if (coeff != 1 || (m.factors.empty() && m.sigma == 0)) pieces.push_back(renderRational(coeff));
        if (m.sigma != 0) pieces.push_back(renderSigma(m.sigma, names));
        for (const auto& [a, e] : m.factors) {
            std::string f = renderAtom(a, names);
            if (e != 1) f += "^" + std::to_string(e);
            pieces.push_back(f);
        }
        for (size_t i = 0; i < pieces.size(); ++i) {
            if (i) out += "*";
            out += pieces[i];
        }
    }
    return out;
}

std::string renderExpr(const Expr& e, const NameTable& names) {
    std::string n = renderPoly(e.num(), names);
    if (e.den().isConstant() && e.den().constantValue() == 1) return n;
    std::string d = renderPoly(e.den(), names);
    return "(" + n + ")/(" + d + ")";
}

std::string Expr::str() const {
    int p = 1;
    for (const auto& a : atoms()) {
        if (a.kind == Atom::Kind::Lattice) p = std::max(p, a.index + 1);
        if (a.kind == Atom::Kind::Dep || a.kind == Atom::Kind::Func) p = std::max(p, a.shift.dim());
    }
    return renderExpr(*this, NameTable::defaults(p));
}

}  // namespace dadj
