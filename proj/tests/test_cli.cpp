#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

using json = nlohmann::ordered_json;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct RunResult {
    int exit = -1;
    std::string out, err;
};

RunResult run(const std::string& args, const std::string& env = "") {
    std::string outFile = "/tmp/dadj_cli_out.txt", errFile = "/tmp/dadj_cli_err.txt";
    std::string cmd = "env " + (env.empty() ? std::string("-u DADJ_COLOR") : env) + " " +
                      std::string(DADJ_CLI_PATH) + " " + args + " >" + outFile + " 2>" + errFile;
    int rc = std::system(cmd.c_str());
    RunResult r;
    r.exit = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    r.out = slurp(outFile);
    r.err = slurp(errFile);
    return r;
}

std::string problem(const char* name) { return std::string(DADJ_PROBLEM_DIR) + "/" + name; }

}  // namespace

TEST_CASE("adjoint command reports the adjoint system as JSON") {
    auto r = run("adjoint " + problem("shift2.dadj"));
    REQUIRE(r.exit == 0);
    json j = json::parse(r.out);
    CHECK(j["schema"] == "dadj-report/1");
    CHECK(j["command"] == "adjoint");
    CHECK(j["adjoint"]["equations"][0]["lhs"] == "-v[0] + v[-2]");
    CHECK(j["lagrangian"] == "u[2]*v[0] - u[0]*v[0]");
    CHECK(j["status"] == "ok");
}

TEST_CASE("reports are byte-identical across runs") {
    std::string args = "noether " + problem("geometric.dadj") + " --sym Q1 Q2 --subst inv2";
    auto a = run(args);
    auto b = run(args);
    REQUIRE(a.exit == 0);
    CHECK(a.out == b.out);
}

TEST_CASE("noether pipeline produces verified laws") {
    auto r = run("noether " + problem("recip.dadj") + " --sym Q1 Q2 Q3");
    REQUIRE(r.exit == 0);
    json j = json::parse(r.out);
    CHECK(j["status"] == "verified");
    REQUIRE(j["laws"].size() == 3);
    for (const auto& entry : j["laws"]) {
        CHECK(entry["pipeline"]["symmetry"]["symmetric"] == true);
        CHECK(entry["verification"]["verdict"] == "verified");
        CHECK(entry["verification"]["exact"] == true);
    }
}

TEST_CASE("selfadjoint classification with a file-supplied witness") {
    auto r = run("selfadjoint " + problem("geometric.dadj"));
    REQUIRE(r.exit == 0);
    json j = json::parse(r.out);
    CHECK(j["kind"] == "quasi");
    CHECK(j["bindings"]["v"] == "(1)/(u[0]^2)");

    r = run("selfadjoint " + problem("shift2.dadj"));
    CHECK(json::parse(r.out)["kind"] == "strict");

    r = run("selfadjoint " + problem("parity3.dadj"));
    CHECK(json::parse(r.out)["kind"] == "weak");
}

TEST_CASE("verify command honors flags and reports the orbit count") {
    auto r = run("verify " + problem("geometric.dadj") +
                 " --law Q2 --subst inv2 --steps 25 --orbits 4 --seed 9");
    REQUIRE(r.exit == 0);
    json j = json::parse(r.out);
    CHECK(j["settings"]["steps"] == 25);
    CHECK(j["settings"]["orbits"] == 4);
    CHECK(j["settings"]["seed"] == 9);
    CHECK(j["verification"]["orbits"] == 4);
    CHECK(j["verification"]["points"] >= 100);
    CHECK(j["law"]["certifies"] == "original");
    CHECK(j["status"] == "verified");
}

TEST_CASE("apply command derives and deduplicates a law family") {
    auto r = run("apply " + problem("wave.dadj") + " --law X1 --sym X2 --repeat 2");
    REQUIRE(r.exit == 0);
    json j = json::parse(r.out);
    REQUIRE(j["laws"].size() == 3);
    CHECK(!j["laws"][1].contains("equivalentTo"));
    CHECK(j["laws"][2]["equivalentTo"] == "cl-X1");
}

TEST_CASE("a non-symmetry is rejected with a counterexample and exit code 2") {
    std::string path = "/tmp/dadj_cli_bad.dadj";
    {
        std::ofstream f(path);
        f << "[system]\nu[2]*u[0] - u[1]^2 = 0 solve u[2]\n\n[symmetries]\nQbad = u[0]^2\n";
    }
    auto r = run("verify " + path + " --law Qbad");
    CHECK(r.exit == 2);
    json j = json::parse(r.out);
    CHECK(j["status"] == "inconclusive");
    CHECK(j["pipeline"]["symmetry"]["status"] == "not-a-symmetry");
    CHECK(j["pipeline"]["symmetry"].contains("counterexample"));
    std::remove(path.c_str());
}

TEST_CASE("--out writes the report and prints a summary") {
    std::string rep = "/tmp/dadj_cli_report.json";
    auto r = run("adjoint " + problem("linear3.dadj") + " --out " + rep);
    REQUIRE(r.exit == 0);
    CHECK(r.out.find("report written to") != std::string::npos);
    CHECK(r.out.find("\"schema\"") == std::string::npos);
    json j = json::parse(slurp(rep));
    CHECK(j["command"] == "adjoint");

    // DADJ_COLOR styles the terminal summary only; the report is unchanged.
    auto colored = run("adjoint " + problem("linear3.dadj") + " --out " + rep, "DADJ_COLOR=1");
    CHECK(colored.out.find("\033[1m") != std::string::npos);
    CHECK(slurp(rep) == j.dump(2) + "\n");
    std::remove(rep.c_str());
}

TEST_CASE("errors exit with code 1 and a diagnostic") {
    auto r = run("adjoint /tmp/does_not_exist.dadj");
    CHECK(r.exit == 1);
    CHECK(r.err.find("dadj:") != std::string::npos);

    std::string path = "/tmp/dadj_cli_syntax.dadj";
    {
        std::ofstream f(path);
        f << "[system]\nu[2] - w[0] = 0\n";
    }
    r = run("adjoint " + path);
    CHECK(r.exit == 1);
    CHECK(r.err.find("parse error") != std::string::npos);
    CHECK(r.err.find("line") != std::string::npos);
    std::remove(path.c_str());

    r = run("noether " + problem("geometric.dadj") + " --sym NoSuch");
    CHECK(r.exit == 1);
}
