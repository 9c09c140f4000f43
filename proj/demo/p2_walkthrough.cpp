// Walk through the P^2 pair: geometry, samples, minimizer, structure.
#include "rvp/pipeline.hpp"

#include <iostream>

using namespace rvp;

int main(int argc, char** argv) {
    int depth = argc > 1 ? std::atoi(argv[1]) : 4;
    auto pair = projective_space(2);

    std::cout << complex_summary(pair) << "\n";
    auto pr = pairing_condition(pair);
    std::cout << "pairing matrix:\n";
    for (const auto& row : pr.matrix) std::cout << "  " << format_vector(row) << "\n";

    Problem p = make_problem(pair, depth);
    std::cout << "\ndepth " << depth << ": " << p.a.size() << " dual-side samples (h = " << p.a.h << "), " << p.b.size()
              << " primal-side samples (h = " << p.b.h << ")\n";

    SolverConfig cfg;
    cfg.method = "both";
    auto r = solve(p.a, p.b, cfg);
    std::cout << "F(phi) = " << format_real(r.functional_value) << " (oracle), " << format_real(*r.entropic_value) << " (entropic)\n";
    std::cout << "duality gap = " << r.duality_gap << ", potentials differ by " << *r.entropic_phi_diff << "\n\n";

    auto rep = analyze(p, r);
    std::cout << report_text(rep) << "\n";

    std::cout << "degree check:\n" << degree_csv(degree_check(pair, 4));
}
