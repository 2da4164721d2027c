#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "dadj/error.hpp"
#include "dadj/grid.hpp"
#include "dadj/noether.hpp"
#include "dadj/parser.hpp"
#include "dadj/render.hpp"
#include "dadj/symmetry.hpp"

using json = nlohmann::ordered_json;
using namespace dadj;

namespace {

constexpr const char* kSchema = "dadj-report/1";

std::string readFile(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string digest(const std::string& text) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : text) h = (h ^ c) * 1099511628211ull;
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

struct Ctx {
    std::string path;
    ProblemFile pf;
    NameTable nt;
    std::string inputDigest;
};

Ctx load(const std::string& path) {
    Ctx c;
    c.path = path;
    std::string text = readFile(path);
    c.pf = parseProblem(text);
    c.nt = c.pf.symbols.names();
    c.inputDigest = digest(text);
    return c;
}

json exprList(const std::vector<Expr>& es, const NameTable& nt) {
    json a = json::array();
    for (const auto& e : es) a.push_back(renderExpr(e, nt));
    return a;
}

json systemJson(const DifferenceSystem& sys, const NameTable& nt) {
    json eqs = json::array();
    for (const auto& eq : sys.equations) {
        json j;
        j["lhs"] = renderExpr(eq.lhs, nt);
        if (eq.solvedAtom)
            j["solved"] = nt.component(eq.solvedAtom->cls, eq.solvedAtom->comp) +
                          eq.solvedAtom->shift.str();
        eqs.push_back(j);
    }
    return {{"dimension", sys.p}, {"components", sys.q}, {"equations", eqs}};
}

json operatorJson(const OperatorMatrix& B, const NameTable& nt) {
    json rows = json::array();
    for (int r = 0; r < B.q; ++r)
        for (int c = 0; c < B.q; ++c) {
            const auto& op = B.at(r, c);
            if (op.isZero()) continue;
            json terms = json::array();
            for (const auto& [coeff, J] : op.terms)
                terms.push_back({{"coefficient", renderExpr(coeff, nt)}, {"shift", J.components()}});
            rows.push_back({{"row", r}, {"column", c}, {"terms", terms}});
        }
    return rows;
}

json verdictJson(const SymmetryVerdict& v, const NameTable& nt) {
    json j;
    switch (v.status) {
        case SymmetryVerdict::Status::Witness: j["status"] = "witness"; break;
        case SymmetryVerdict::Status::Reduced: j["status"] = "reduced"; break;
        case SymmetryVerdict::Status::NotSymmetric: j["status"] = "not-a-symmetry"; break;
        case SymmetryVerdict::Status::Inconclusive: j["status"] = "inconclusive"; break;
    }
    j["symmetric"] = v.symmetric();
    if (v.witness) j["operator"] = operatorJson(*v.witness, nt);
    if (!v.counterexample.empty()) j["counterexample"] = v.counterexample;
    if (!v.detail.empty()) j["detail"] = v.detail;
    return j;
}

json lawJson(const ConservationLaw& cl, const NameTable& nt) {
    json j;
    j["id"] = cl.id;
    j["certifies"] = cl.certifies == Certifies::Original ? "original" : "combined";
    j["characteristic"] = cl.characteristicName;
    if (!cl.substitutionName.empty()) j["substitution"] = cl.substitutionName;
    j["fluxes"] = exprList(cl.fluxes, nt);
    j["remainder"] = exprList(cl.remainder, nt);
    return j;
}

json outcomeJson(const VerifyOutcome& o) {
    json j;
    j["orbits"] = o.orbits;
    j["points"] = o.points;
    j["retries"] = o.retries;
    j["exact"] = o.exact;
    j["inconclusive"] = o.inconclusive;
    if (!o.detail.empty()) j["detail"] = o.detail;
    j["verdict"] = o.verified() ? "verified" : (o.inconclusive ? "inconclusive" : "failed");
    return j;
}

// Symmetry check -> operator -> extension -> flux -> optional transfer.
struct Pipeline {
    json steps;
    std::optional<ConservationLaw> law;
};

Pipeline buildLaw(const Ctx& ctx, const std::string& symName, const std::string& substName) {
    Pipeline out;
    const Characteristic* Q = ctx.pf.symmetry(symName);
    if (!Q) throw Error("no symmetry named '" + symName + "' in " + ctx.path);
    out.steps["characteristic"] = exprList(Q->q, ctx.nt);
    SymmetryVerdict v = checkSymmetry(ctx.pf.system, *Q);
    out.steps["symmetry"] = verdictJson(v, ctx.nt);
    if (!v.symmetric()) return out;
    if (!v.witness) {
        out.steps["symmetry"]["detail"] = "no operator witness; cannot extend";
        return out;
    }
    ExtendedCharacteristic Y = extendCharacteristic(ctx.pf.system, *Q, *v.witness);
    out.steps["extended"] = exprList(Y.qstar, ctx.nt);
    ConservationLaw cl = noetherFlux(ctx.pf.system, Y);
    cl.id = "cl-" + symName;
    if (!substName.empty()) {
        const Substitution* f = ctx.pf.substitution(substName);
        if (!f) throw Error("no substitution named '" + substName + "' in " + ctx.path);
        cl = transfer(ctx.pf.system, cl, *f);
        cl.id = "fi-" + symName + "-" + substName;
    }
    out.steps["trivial"] = isTrivial(ctx.pf.system, cl);
    out.law = cl;
    return out;
}

bool useColor() {
    const char* c = std::getenv("DADJ_COLOR");
    return c && *c && std::string(c) != "0";
}

std::string bold(const std::string& s) {
    return useColor() ? "\033[1m" + s + "\033[0m" : s;
}

// JSON to stdout, or to --out with a short human summary on stdout.
int emit(const json& report, const std::string& outPath,
         const std::vector<std::string>& summary) {
    if (outPath.empty()) {
        std::cout << report.dump(2) << "\n";
    } else {
        std::ofstream f(outPath, std::ios::binary);
        if (!f) throw Error("cannot write " + outPath);
        f << report.dump(2) << "\n";
        std::cout << bold("dadj " + report["command"].get<std::string>()) << ": report written to "
                  << outPath << "\n";
        for (const auto& line : summary) std::cout << "  " << line << "\n";
    }
    std::string status = report["status"].get<std::string>();
    return status == "inconclusive" ? 2 : 0;
}

json baseReport(const char* command, const Ctx& ctx) {
    json r;
    r["schema"] = kSchema;
    r["command"] = command;
    r["input"] = {{"path", ctx.path}, {"digest", ctx.inputDigest}};
    r["warnings"] = json::array();
    return r;
}

int cmdAdjoint(const std::string& file, const std::string& outPath) {
    Ctx ctx = load(file);
    json r = baseReport("adjoint", ctx);
    DifferenceSystem sys = ctx.pf.system;
    if (!sys.forwardNormalized()) {
        sys = forwardNormalize(sys);
        r["warnings"].push_back("system was forward-normalized before taking the adjoint");
    }
    r["system"] = systemJson(sys, ctx.nt);
    r["lagrangian"] = renderExpr(lagrangian(sys), ctx.nt);
    r["adjoint"] = systemJson(adjointSystem(sys), ctx.nt);
    r["status"] = "ok";
    std::vector<std::string> summary;
    for (const auto& eq : r["adjoint"]["equations"])
        summary.push_back(eq["lhs"].get<std::string>() + " = 0");
    return emit(r, outPath, summary);
}

int cmdNoether(const std::string& file, const std::vector<std::string>& syms,
               const std::string& subst, const std::string& outPath) {
    Ctx ctx = load(file);
    json r = baseReport("noether", ctx);
    json laws = json::array();
    std::vector<std::string> summary;
    bool allVerified = true;
    bool anyLaw = false;
    for (const auto& name : syms) {
        Pipeline pl = buildLaw(ctx, name, subst);
        json entry;
        entry["symmetry"] = name;
        entry["pipeline"] = pl.steps;
        if (!pl.law) {
            entry["rejected"] = true;
            allVerified = false;
            summary.push_back(name + ": rejected (not a symmetry)");
            laws.push_back(entry);
            continue;
        }
        anyLaw = true;
        entry["law"] = lawJson(*pl.law, ctx.nt);
        VerifyOutcome o = verifyConservationLaw(ctx.pf.system, *pl.law, ctx.pf.verify);
        entry["verification"] = outcomeJson(o);
        if (!o.verified()) allVerified = false;
        summary.push_back(pl.law->id + ": " + entry["verification"]["verdict"].get<std::string>() +
                          (pl.steps["trivial"].get<bool>() ? " (trivial)" : ""));
        laws.push_back(entry);
    }
    r["laws"] = laws;
    r["status"] = anyLaw && allVerified ? "verified" : "inconclusive";
    return emit(r, outPath, summary);
}

int cmdSelfadjoint(const std::string& file, const std::string& outPath) {
    Ctx ctx = load(file);
    json r = baseReport("selfadjoint", ctx);
    SelfAdjointness sa = classifySelfAdjointness(ctx.pf.system, ctx.pf.substitutions);
    switch (sa.kind) {
        case SelfAdjointKind::Strict: r["kind"] = "strict"; break;
        case SelfAdjointKind::Quasi: r["kind"] = "quasi"; break;
        case SelfAdjointKind::Weak: r["kind"] = "weak"; break;
        case SelfAdjointKind::NoneFound: r["kind"] = "none-found"; break;
    }
    if (!sa.witnessName.empty()) r["witness"] = sa.witnessName;
    json bindings = json::object();
    for (const auto& [a, e] : sa.witness)
        bindings[ctx.nt.component(a.cls, a.comp)] = renderExpr(e, ctx.nt);
    r["bindings"] = bindings;
    r["status"] = "ok";
    return emit(r, outPath, {"classification: " + r["kind"].get<std::string>() +
                             (sa.witnessName.empty() ? "" : " with " + sa.witnessName)});
}

int cmdApply(const std::string& file, const std::string& lawSym, const std::string& subst,
             const std::string& symName, int repeat, const std::string& outPath) {
    Ctx ctx = load(file);
    json r = baseReport("apply", ctx);
    Pipeline pl = buildLaw(ctx, lawSym, subst);
    if (!pl.law) throw Error("law source '" + lawSym + "' is not a symmetry");
    const Characteristic* Q = ctx.pf.symmetry(symName);
    if (!Q) throw Error("no symmetry named '" + symName + "' in " + ctx.path);
    SymmetryVerdict v = checkSymmetry(ctx.pf.system, *Q);
    r["symmetry"] = verdictJson(v, ctx.nt);
    if (!v.symmetric()) {
        r["status"] = "inconclusive";
        return emit(r, outPath, {symName + ": rejected (not a symmetry)"});
    }
    std::vector<ConservationLaw> family = {*pl.law};
    json derived = json::array();
    derived.push_back(lawJson(*pl.law, ctx.nt));
    for (int k = 1; k <= repeat; ++k) {
        ConservationLaw next = applySymmetryToLaw(ctx.pf.system, *Q, family.back());
        next.id = pl.law->id + "+" + symName + "x" + std::to_string(k);
        json entry = lawJson(next, ctx.nt);
        entry["trivial"] = isTrivial(ctx.pf.system, next);
        for (const auto& prev : family)
            if (lawsEquivalent(ctx.pf.system, next, prev)) {
                entry["equivalentTo"] = prev.id;
                break;
            }
        family.push_back(next);
        derived.push_back(entry);
    }
    r["laws"] = derived;
    r["status"] = "ok";
    std::vector<std::string> summary;
    for (const auto& e : derived) summary.push_back(e["id"].get<std::string>());
    return emit(r, outPath, summary);
}

int cmdVerify(const std::string& file, const std::string& lawSym, const std::string& subst,
              long steps, int orbits, long seed, const std::string& outPath) {
    Ctx ctx = load(file);
    json r = baseReport("verify", ctx);
    VerifySettings vs = ctx.pf.verify;
    if (steps > 0) vs.steps = steps;
    if (orbits > 0) vs.orbits = orbits;
    if (seed >= 0) vs.seed = static_cast<unsigned>(seed);
    r["settings"] = {{"steps", vs.steps}, {"orbits", vs.orbits}, {"seed", vs.seed}};
    Pipeline pl = buildLaw(ctx, lawSym, subst);
    if (!pl.law) {
        r["pipeline"] = pl.steps;
        r["status"] = "inconclusive";
        return emit(r, outPath, {lawSym + ": rejected (not a symmetry)"});
    }
    r["law"] = lawJson(*pl.law, ctx.nt);
    VerifyOutcome o = verifyConservationLaw(ctx.pf.system, *pl.law, vs);
    r["verification"] = outcomeJson(o);
    r["status"] = o.verified() ? "verified" : "inconclusive";
    return emit(r, outPath,
                {pl.law->id + ": " + r["verification"]["verdict"].get<std::string>() + " over " +
                 std::to_string(o.points) + " points on " + std::to_string(o.orbits) + " orbits"});
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"adjoint systems, symmetries and conservation laws of difference equations"};
    app.require_subcommand(1);

    std::string file, outPath, subst, lawSym, symName;
    std::vector<std::string> syms;
    int repeat = 1, orbits = 0;
    long steps = 0, seed = -1;

    auto addCommon = [&](CLI::App* c) {
        c->add_option("file", file, "problem file")->required();
        c->add_option("--out", outPath, "write the JSON report here; print a summary instead");
    };

    CLI::App* adjoint = app.add_subcommand("adjoint", "print the adjoint system and Lagrangian");
    addCommon(adjoint);

    CLI::App* noether = app.add_subcommand("noether", "conservation laws from named symmetries");
    addCommon(noether);
    noether->add_option("--sym", syms, "symmetry names")->required()->expected(-1);
    noether->add_option("--subst", subst, "eliminate v through this substitution");

    CLI::App* selfadj = app.add_subcommand("selfadjoint", "classify self-adjointness");
    addCommon(selfadj);

    CLI::App* apply = app.add_subcommand("apply", "apply a symmetry to a conservation law");
    addCommon(apply);
    apply->add_option("--law", lawSym, "symmetry whose law is the starting point")->required();
    apply->add_option("--sym", symName, "symmetry to apply")->required();
    apply->add_option("--subst", subst, "transfer the starting law first");
    apply->add_option("--repeat", repeat, "how many times to apply")->check(CLI::PositiveNumber);

    CLI::App* verify = app.add_subcommand("verify", "verify a law on random exact orbits");
    addCommon(verify);
    verify->add_option("--law", lawSym, "symmetry whose law is verified")->required();
    verify->add_option("--subst", subst, "verify the transferred law");
    verify->add_option("--steps", steps, "points per lattice direction");
    verify->add_option("--orbits", orbits, "number of random orbits");
    verify->add_option("--seed", seed, "random seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (adjoint->parsed()) return cmdAdjoint(file, outPath);
        if (noether->parsed()) return cmdNoether(file, syms, subst, outPath);
        if (selfadj->parsed()) return cmdSelfadjoint(file, outPath);
        if (apply->parsed()) return cmdApply(file, lawSym, subst, symName, repeat, outPath);
        if (verify->parsed()) return cmdVerify(file, lawSym, subst, steps, orbits, seed, outPath);
    } catch (const ParseError& e) {
        std::cerr << "dadj: parse error: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "dadj: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
