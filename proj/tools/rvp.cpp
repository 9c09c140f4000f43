#include "rvp/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace rvp;

namespace {

void emit(const std::string& out, const std::string& file, const std::string& text) {
    if (out.empty()) {
        std::cout << text;
        return;
    }
    std::filesystem::create_directories(out);
    write_file(std::filesystem::path(out) / file, text);
}

std::string vertex_lines(const std::vector<LatticeVector>& vs) {
    std::string s;
    for (const auto& v : vs) s += "  " + format_vector(v) + "\n";
    return s;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Real variational problem on reflexive polytope boundaries"};
    app.require_subcommand(1);

    std::string instance, out, method = "oracle", config, phi_path, side = "both", write_dir;
    int depth = 2, k_max = 6;
    std::vector<int> depths;
    double tol = 1e-8;
    std::uint64_t seed = 1;

    auto add_instance = [&](CLI::App* c) { c->add_option("--instance", instance, "bundled example name or instance file")->required(); };
    auto add_solver = [&](CLI::App* c) {
        c->add_option("--method", method, "oracle, entropic or both")->check(CLI::IsMember({"oracle", "entropic", "both"}));
        c->add_option("--tol", tol, "solver tolerance");
        c->add_option("--seed", seed, "entropic initialization seed");
    };

    auto* dual = app.add_subcommand("dual", "print Delta and its dual polytope");
    add_instance(dual);
    auto* check = app.add_subcommand("check", "validate an instance and report the pairing condition");
    add_instance(check);
    auto* mesh = app.add_subcommand("mesh", "sample the boundaries at a refinement depth");
    add_instance(mesh);
    mesh->add_option("--depth", depth, "refinement depth");
    mesh->add_option("--side", side, "dual, primal or both")->check(CLI::IsMember({"dual", "primal", "both"}));
    mesh->add_option("--out", out, "output directory (stdout if omitted)");
    auto* solve_cmd = app.add_subcommand("solve", "minimize the functional on one mesh");
    add_instance(solve_cmd);
    solve_cmd->add_option("--depth", depth, "refinement depth");
    add_solver(solve_cmd);
    solve_cmd->add_option("--out", out, "output directory for potentials and plan");
    auto* analyze_cmd = app.add_subcommand("analyze", "solve (or load phi) and analyze the minimizer");
    add_instance(analyze_cmd);
    analyze_cmd->add_option("--depth", depth, "refinement depth");
    add_solver(analyze_cmd);
    analyze_cmd->add_option("--phi", phi_path, "potential CSV on the dual side instead of solving");
    analyze_cmd->add_option("--out", out, "output directory (report to stdout if omitted)");
    auto* run_cmd = app.add_subcommand("run", "full pipeline over several depths");
    run_cmd->add_option("--config", config, "config file");
    run_cmd->add_option("--instance", instance, "bundled example name or instance file");
    run_cmd->add_option("--depth", depths, "depths, e.g. 1,2,3")->delimiter(',');
    add_solver(run_cmd);
    run_cmd->add_option("--out", out, "output directory");
    auto* examples = app.add_subcommand("examples", "list bundled instances");
    examples->add_option("--write", write_dir, "also write each instance file into this directory");
    auto* degree = app.add_subcommand("degree", "boundary lattice point counts of k-dilates");
    add_instance(degree);
    degree->add_option("--kmax", k_max, "largest dilation");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        SolverConfig scfg;
        scfg.method = method;
        scfg.tol = tol;
        scfg.seed = seed;

        if (*dual) {
            auto pair = resolve_instance(instance);
            auto back = dual_polytope(pair.dual_vertices);
            std::cout << "delta =\n" << vertex_lines(pair.delta_vertices) << "dual =\n" << vertex_lines(pair.dual_vertices);
            auto a = pair.delta_vertices;
            std::sort(a.begin(), a.end());
            std::cout << "involution = " << (a == back ? "holds" : "fails") << "\n";
        } else if (*check) {
            auto pair = resolve_instance(instance);
            validate_pair(pair);
            auto pr = pairing_condition(pair);
            std::cout << "valid reflexive pair, dimension " << pair.dim << "\npairing matrix (rows: Delta vertices, columns: dual vertices)\n";
            for (const auto& row : pr.matrix) std::cout << "  " << format_vector(row) << "\n";
            std::cout << "pairing_condition = " << (pr.holds ? "holds" : "violated") << "\n";
            for (const auto& [m, n] : pr.violations) std::cout << "  <" << format_vector(m) << ", " << format_vector(n) << "> = 0\n";
        } else if (*mesh) {
            auto pair = resolve_instance(instance);
            if (side != "primal") emit(out, "cloud_dual_d" + std::to_string(depth) + ".csv", cloud_to_csv(triangulate_refine(dual_side_complex(pair), depth)));
            if (side != "dual") emit(out, "cloud_primal_d" + std::to_string(depth) + ".csv", cloud_to_csv(triangulate_refine(primal_side_complex(pair), depth)));
        } else if (*solve_cmd) {
            auto pair = resolve_instance(instance);
            auto a = triangulate_refine(dual_side_complex(pair), depth);
            auto b = triangulate_refine(primal_side_complex(pair), depth);
            auto r = solve(a, b, scfg);
            std::cout << "method = " << r.method << "\n|A| = " << a.size() << "\n|B| = " << b.size() << "\nfunctional_value = " << format_real(r.functional_value)
                      << "\nduality_gap = " << format_real(r.duality_gap) << "\niterations = " << r.iterations << "\n";
            if (!out.empty()) {
                emit(out, "phi.csv", potential_to_csv(r.phi));
                emit(out, "phi_star.csv", potential_to_csv(r.phi_star));
                if (r.plan) emit(out, "plan.csv", plan_to_csv(*r.plan));
            }
        } else if (*analyze_cmd) {
            auto pair = resolve_instance(instance);
            Problem p = make_problem(pair, depth);
            SolveResult r;
            if (!phi_path.empty()) {
                std::ifstream f(phi_path);
                if (!f) throw Error(Errc::Io, "cannot read " + phi_path);
                std::stringstream ss;
                ss << f.rdbuf();
                r.phi = project_to_class(potential_from_csv(ss.str(), p.a, phi_path), p.a, p.b);
                r.phi_star = c_transform(r.phi, p.a, p.b);
                r.functional_value = functional_value(r.phi, p.a, p.b);
                r.method = "loaded";
            } else {
                r = solve(p.a, p.b, scfg);
            }
            auto rep = analyze(p, r);
            if (!p.pairing.holds) std::cerr << "warning: pairing condition violated\n";
            emit(out, "report.txt", report_text(rep));
            if (!out.empty()) {
                emit(out, "classification.csv", classification_csv(p, rep));
                emit(out, "audit.csv", audit_csv(rep));
                emit(out, "residuals.csv", residual_csv(rep));
            }
        } else if (*run_cmd) {
            RunConfig rc;
            if (!config.empty()) {
                std::ifstream f(config);
                if (!f) throw Error(Errc::Io, "cannot read " + config);
                std::stringstream ss;
                ss << f.rdbuf();
                rc = parse_run_config(ss.str(), config);
            }
            if (!instance.empty()) rc.instance = instance;
            if (!depths.empty()) rc.depths = depths;
            if (run_cmd->count("--method")) rc.solver.method = method;
            if (run_cmd->count("--tol")) rc.solver.tol = tol;
            if (run_cmd->count("--seed")) rc.solver.seed = seed;
            if (!out.empty()) rc.out = out;
            auto res = run(rc);
            std::cout << convergence_csv(res.table);
            return res.exit_code;
        } else if (*examples) {
            for (const auto& e : example_catalog()) {
                std::cout << e.name << "  " << e.description << "\n";
                if (!write_dir.empty()) emit(write_dir, e.name + ".txt", serialize_instance(e.pair));
            }
        } else if (*degree) {
            std::cout << degree_csv(degree_check(resolve_instance(instance), k_max));
        }
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
    return 0;
}
