#include "rvp/pipeline.hpp"

#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <sys/wait.h>

using namespace rvp;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    auto p = fs::temp_directory_path() / ("rvp_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

struct Cli {
    int code;
    std::string out, err;
};

Cli cli(const std::string& args) {
    const char* exe = std::getenv("RVP_CLI");
    if (!exe) SKIP("RVP_CLI not set");
    auto dir = fs::temp_directory_path();
    auto o = dir / "rvp_cli_out.txt", e = dir / "rvp_cli_err.txt";
    int st = std::system((std::string(exe) + " " + args + " >" + o.string() + " 2>" + e.string()).c_str());
    return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, slurp(o), slurp(e)};
}

RunConfig quiet(const std::string& instance, std::vector<int> depths, const fs::path& out) {
    RunConfig c;
    c.instance = instance;
    c.depths = std::move(depths);
    c.out = out.string();
    return c;
}

} // namespace

TEST_CASE("catalog contents", "[pipeline]") {
    auto cat = example_catalog();
    CHECK(cat.size() >= 4);
    std::set<std::string> names;
    for (const auto& e : cat) {
        names.insert(e.name);
        CHECK_NOTHROW(validate_pair(e.pair));
    }
    for (const char* n : {"p2-simplex", "p3-simplex", "p1xp1", "p2xp1", "hexagon-eps-0.25", "hexagon-eps-0.4", "hexagon-eps-0.5", "hexagon-eps-1"})
        CHECK(names.count(n) == 1);
    CHECK(pairing_condition(*find_example("p1xp1")).holds);
    CHECK(pairing_condition(*find_example("p2xp1")).holds);
    CHECK_FALSE(pairing_condition(*find_example("hexagon-eps-0.5")).holds);
    CHECK(decimal_name(Rational(2, 5)) == "0.4");
    CHECK(decimal_name(Rational(1, 3)) == "1/3");
    CHECK(decimal_name(Rational(1)) == "1");
}

TEST_CASE("bundled instance files match the catalog", "[pipeline]") {
    fs::path dir = fs::path(RVP_SOURCE_DIR) / "data" / "instances";
    for (const auto& e : example_catalog()) {
        auto p = load_instance((dir / (e.name + ".txt")).string());
        CHECK(p.delta_vertices == e.pair.delta_vertices);
        CHECK(p.lambda == e.pair.lambda);
        CHECK(p.mu == e.pair.mu);
    }
}

TEST_CASE("run config parsing", "[pipeline]") {
    auto c = parse_run_config("instance = p2-simplex\ndepths = [1, 2, 3]\nmethod = entropic\ntol = 1e-7\ndelta_factor = 0.1\nconvexity = off\n");
    CHECK(c.instance == "p2-simplex");
    CHECK(c.depths == std::vector<int>{1, 2, 3});
    CHECK(c.solver.method == "entropic");
    CHECK(c.solver.tol == 1e-7);
    CHECK(c.analysis.delta_factor == 0.1);
    CHECK_FALSE(c.analysis.convexity);
    try {
        parse_run_config("instance = p2-simplex\n\ndepths = 1, x\n", "cfg.txt");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
        CHECK(e.field() == "depths");
    }
    CHECK_THROWS_AS(parse_run_config("colour = red\n"), ParseError);
    CHECK_THROWS_AS(parse_run_config("method = simplex\n"), ParseError);
    RunConfig bad = c;
    bad.depths = {2, 1};
    CHECK_THROWS_AS(validate_config(bad), Error);
    bad.depths = {};
    CHECK_THROWS_AS(validate_config(bad), Error);
}

TEST_CASE("P^2 run over depths 1,2,3", "[pipeline]") {
    auto dir = scratch("p2");
    std::ostringstream log;
    auto res = run(quiet("p2-simplex", {1, 2, 3}, dir), log);
    CHECK(res.exit_code == 0);
    REQUIRE(res.table.size() == 3);
    for (const auto& row : res.table) CHECK(row.bad_mass == 0);
    CHECK(res.warnings.empty());
    for (const char* f : {"complex.txt", "convergence.csv", "summary.txt", "cloud_dual_d1.csv", "phi_d3.csv", "phi_star_d2.csv", "plan_d3.csv",
                          "report_d3.txt", "classification_d2.csv", "audit_d1.csv", "residuals_d3.csv"})
        CHECK(fs::exists(dir / f));
    CHECK(slurp(dir / "complex.txt").find("total_lattice_measure = 9") != std::string::npos);
}

TEST_CASE("hexagon run warns and reports a bad set", "[pipeline]") {
    auto dir = scratch("hex");
    std::ostringstream log;
    auto res = run(quiet("hexagon-eps-0.25", {2, 3, 4}, dir), log);
    CHECK(res.exit_code == 0);
    CHECK(res.warnings.size() == 1);
    CHECK(log.str().find("pairing condition violated") != std::string::npos);
    CHECK(res.table.back().bad_mass > 0);
}

TEST_CASE("runs are byte-for-byte deterministic", "[pipeline]") {
    for (const char* method : {"oracle", "entropic"}) {
        auto d1 = scratch(std::string("det1_") + method), d2 = scratch(std::string("det2_") + method);
        std::ostringstream log;
        auto c1 = quiet("hexagon-eps-0.5", {1, 2}, d1), c2 = quiet("hexagon-eps-0.5", {1, 2}, d2);
        c1.solver.method = c2.solver.method = method;
        run(c1, log);
        run(c2, log);
        std::size_t files = 0;
        for (const auto& e : fs::directory_iterator(d1)) {
            CHECK(slurp(e.path()) == slurp(d2 / e.path().filename()));
            ++files;
        }
        CHECK(files > 10);
    }
}

TEST_CASE("audit violations beyond tolerance give exit 2", "[pipeline]") {
    auto dir = scratch("strict");
    std::ostringstream log;
    auto c = quiet("p2-simplex", {3}, dir);
    c.audit_slope_max = 1e-6;
    auto res = run(c, log);
    CHECK(res.exit_code == 2);
    CHECK_FALSE(res.violations.empty());
    CHECK(slurp(dir / "summary.txt").find("exit_status = 2") != std::string::npos);
}

TEST_CASE("degree check", "[pipeline]") {
    auto rows = degree_check(projective_space(2), 6);
    std::vector<long> dual, primal;
    for (const auto& r : rows) {
        (r.side == Side::Dual ? dual : primal).push_back(r.count);
        CHECK(r.ratio == r.target);
        if (r.side == Side::Dual) CHECK(r.degree == 9);
    }
    CHECK(primal == std::vector<long>{3, 6, 9, 12, 15, 18});
    CHECK(dual == std::vector<long>{9, 18, 27, 36, 45, 54});
    // D = 3: count(k) = S k^2 + 2, so the ratio approaches S with error 2/k^2
    auto p3 = degree_check(projective_space(3), 20);
    for (const auto& r : p3) {
        CHECK(Rational(r.count) == r.target * r.k * r.k + 2);
        CHECK(r.ratio - r.target <= Rational(2, r.k));
    }
    CHECK(p3.front().degree == 64);
    CHECK_THROWS_AS(degree_check(hexagon(Rational(1, 4)), 3), Error);
}

TEST_CASE("CLI exit codes and subcommands", "[pipeline][cli]") {
    auto dir = scratch("cli");
    auto r = cli("run --instance p2-simplex --depth 1,2,3 --out " + (dir / "p2").string());
    CHECK(r.code == 0);
    CHECK(r.out.rfind("depth,h_dual", 0) == 0);
    r = cli("run --instance hexagon-eps-0.25 --depth 2,3 --out " + (dir / "hex").string());
    CHECK(r.code == 0);
    CHECK(r.err.find("pairing condition violated") != std::string::npos);

    // missing mu weight names the vertex index
    auto text = serialize_instance(projective_space(2));
    auto pos = text.find("mu.1 =");
    REQUIRE(pos != std::string::npos);
    text.erase(pos, text.find('\n', pos) - pos + 1);
    write_file(dir / "missing.txt", text);
    r = cli("run --instance " + (dir / "missing.txt").string() + " --out " + (dir / "m").string());
    CHECK(r.code == 1);
    CHECK(r.err.find("vertex index 1") != std::string::npos);

    r = cli("run --instance no-such-instance --out " + (dir / "x").string());
    CHECK(r.code == 1);
    r = cli("solve --instance p2-simplex --method bogus");
    CHECK(r.code == 1);

    r = cli("dual --instance hexagon-eps-0.25");
    CHECK(r.code == 0);
    CHECK(r.out.find("involution = holds") != std::string::npos);
    r = cli("check --instance hexagon-eps-0.25");
    CHECK(r.out.find("pairing_condition = violated") != std::string::npos);
    r = cli("mesh --instance p2-simplex --depth 1 --side dual");
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 7);
    r = cli("solve --instance p2-simplex --depth 2 --method both");
    CHECK(r.code == 0);
    CHECK(r.out.find("method = both") != std::string::npos);
    r = cli("analyze --instance p2-simplex --depth 2");
    CHECK(r.out.find("bad_mass = 0") != std::string::npos);
    r = cli("examples");
    CHECK(r.out.find("hexagon-eps-0.4") != std::string::npos);
    r = cli("degree --instance p2-simplex --kmax 3");
    CHECK(r.out.find("dual,3,27,9,9,9") != std::string::npos);

    // analyze a stored potential
    r = cli("solve --instance p2-simplex --depth 2 --out " + (dir / "sol").string());
    REQUIRE(r.code == 0);
    r = cli("analyze --instance p2-simplex --depth 2 --phi " + (dir / "sol" / "phi.csv").string());
    CHECK(r.code == 0);
    CHECK(r.out.find("bad_mass = 0") != std::string::npos);

    write_file(dir / "cfg.txt", "instance = p2-simplex\ndepths = 1,2\nout = " + (dir / "cfgout").string() + "\n");
    r = cli("run --config " + (dir / "cfg.txt").string());
    CHECK(r.code == 0);
    CHECK(fs::exists(dir / "cfgout" / "convergence.csv"));
}
