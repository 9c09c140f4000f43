#include "rvp/catalog.hpp"
#include "rvp/solver.hpp"

#include <catch_amalgamated.hpp>

#include <numeric>
#include <random>

using namespace rvp;

namespace {

SampleCloud manual_cloud(Side side, const std::vector<RealVector>& xs, const std::vector<double>& w) {
    SampleCloud c;
    c.side = side;
    c.dim = static_cast<int>(xs.at(0).size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        SamplePoint p;
        p.x = xs[i];
        p.weight = w[i];
        c.points.push_back(p);
    }
    return c;
}

struct Clouds {
    SampleCloud a, b;
};

Clouds clouds_for(const WeightedPolytopePair& p, int depth) {
    return {triangulate_refine(dual_side_complex(p), depth), triangulate_refine(primal_side_complex(p), depth)};
}

void check_dual_feasible(const SolveResult& r, const SampleCloud& a, const SampleCloud& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            REQUIRE(r.phi.values[i] + r.phi_star.values[j] - dot(a.points[i].x, b.points[j].x) >= -1e-12);
}

} // namespace

TEST_CASE("functional value basics") {
    auto a = manual_cloud(Side::Dual, {{1, 2}}, {1});
    auto b = manual_cloud(Side::Primal, {{3, -1}}, {1});
    CHECK(functional_value(Potential{Side::Dual, {0.0}, false}, a, b) == Catch::Approx(1.0));
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1, 1);
    auto [ca, cb] = clouds_for(projective_space(2), 2);
    for (int t = 0; t < 50; ++t) {
        Potential f{Side::Dual, {}, false};
        for (std::size_t i = 0; i < ca.size(); ++i) f.values.push_back(u(rng));
        double v = functional_value(f, ca, cb);
        auto g = f;
        for (auto& x : g.values) x += 3;
        CHECK(functional_value(g, ca, cb) == Catch::Approx(v).margin(1e-12));
        CHECK(functional_value(project_to_class(f, ca, cb), ca, cb) <= v + 1e-12);
    }
    CHECK_THROWS_AS(functional_value(Potential{Side::Primal, {0.0}, false}, a, b), Error);
}

TEST_CASE("2x2 identity instance") {
    auto a = manual_cloud(Side::Dual, {{1, 0}, {0, 1}}, {0.5, 0.5});
    auto b = manual_cloud(Side::Primal, {{1, 0}, {0, 1}}, {0.5, 0.5});
    auto r = solve_lp_oracle(a, b);
    REQUIRE(r.plan);
    CHECK(r.plan->objective == Catch::Approx(1.0).margin(1e-15));
    for (const auto& e : r.plan->entries) CHECK((e.i == e.j || e.mass == 0));
    CHECK(r.phi.values[0] == Catch::Approx(0.0).margin(1e-12));
    CHECK(r.phi.values[1] == Catch::Approx(0.0).margin(1e-12));
    CHECK(r.duality_gap <= 1e-12);
    auto e = solve_entropic(a, b);
    for (std::size_t i = 0; i < 2; ++i) CHECK(std::abs(e.phi.values[i] - r.phi.values[i]) <= 1e-8);
}

TEST_CASE("oracle matches brute force over permutations") {
    // Uniform weights with |A| = |B|: optimal couplings include a permutation (Birkhoff).
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int trial = 0; trial < 40; ++trial) {
        std::size_t n = 2 + static_cast<std::size_t>(trial % 5);
        std::vector<RealVector> xs, ps;
        for (std::size_t i = 0; i < n; ++i) {
            xs.push_back({u(rng), u(rng)});
            ps.push_back({u(rng), u(rng)});
        }
        std::vector<double> w(n, 1.0 / static_cast<double>(n));
        auto a = manual_cloud(Side::Dual, xs, w), b = manual_cloud(Side::Primal, ps, w);
        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        double best = -1e300;
        do {
            double s = 0;
            for (std::size_t i = 0; i < n; ++i) s += dot(xs[i], ps[perm[i]]) / static_cast<double>(n);
            best = std::max(best, s);
        } while (std::next_permutation(perm.begin(), perm.end()));
        auto r = solve_lp_oracle(a, b);
        CHECK(r.plan->objective == Catch::Approx(best).margin(1e-12));
        CHECK(r.functional_value == Catch::Approx(best).margin(1e-12));
    }
}

TEST_CASE("oracle on bundled instances: feasibility, gap, dual feasibility") {
    for (const auto& e : example_catalog()) {
        int depth = e.pair.dim == 2 ? 3 : 1;
        auto [a, b] = clouds_for(e.pair, depth);
        INFO(e.name);
        auto r = solve_lp_oracle(a, b);
        CHECK(r.marginal_residual <= 1e-9);
        CHECK(std::abs(r.duality_gap) <= 1e-8);
        CHECK(r.phi.max() == 0);
        check_dual_feasible(r, a, b);
        CHECK(is_c_closed(r.phi, a, b));
        // weak duality against the trivial product coupling
        double indep = 0;
        for (const auto& x : a.points)
            for (const auto& p : b.points) indep += x.weight * p.weight * dot(x.x, p.x);
        CHECK(indep <= r.functional_value + 1e-12);
        // sides exchanged
        auto s = solve_lp_oracle(b, a);
        CHECK(s.functional_value == Catch::Approx(r.functional_value).margin(2e-8));
    }
}

TEST_CASE("entropic agrees with the oracle on P^2 depth 2") {
    auto [a, b] = clouds_for(projective_space(2), 2);
    auto o = solve_lp_oracle(a, b);
    auto e = solve_entropic(a, b);
    CHECK(std::abs(e.functional_value - o.functional_value) <= 1e-6);
    REQUIRE(e.raw_functional_value);
    CHECK(std::abs(*e.raw_functional_value - o.functional_value) <= 1e-6);
    CHECK(e.canonical);
    CHECK(e.phi.max() == 0);
    check_dual_feasible(e, a, b);
}

TEST_CASE("short schedule on P^2 depth 3") {
    auto [a, b] = clouds_for(projective_space(2), 3);
    SolverConfig cfg;
    cfg.epsilon_schedule = {0.5, 0.1, 0.02, 0.004};
    auto e = solve_entropic(a, b, cfg);
    auto o = solve_lp_oracle(a, b);
    CHECK(e.functional_value - o.functional_value <= 1e-6);
    CHECK(e.functional_value - o.functional_value >= -1e-12);
}

TEST_CASE("entropic: initialization does not matter") {
    for (const auto& p : {projective_space(2), hexagon(Rational(1, 4))}) {
        auto [a, b] = clouds_for(p, 3);
        SolverConfig c1, c2;
        c1.seed = 1;
        c2.seed = 99;
        auto r1 = solve_entropic(a, b, c1), r2 = solve_entropic(a, b, c2);
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(r1.phi.values[i] - r2.phi.values[i]) <= 1e-6);
        auto o = solve_lp_oracle(a, b);
        CHECK(std::abs(r1.functional_value - o.functional_value) <= 1e-6);
        CHECK(std::abs(*r2.raw_functional_value - o.functional_value) <= 1e-6);
        CHECK(r1.marginal_residual <= 1e-9);
    }
}

TEST_CASE("normalize") {
    auto [a, b] = clouds_for(projective_space(2), 1);
    SolveResult r;
    r.phi = Potential{Side::Dual, std::vector<double>(a.size(), 5.0), true};
    r.phi_star = c_transform(r.phi, a, b);
    auto before = r.phi_star;
    double f0 = functional_value(r.phi, a, b);
    auto n1 = normalize(r);
    for (double v : n1.phi.values) CHECK(v == 0);
    for (std::size_t j = 0; j < b.size(); ++j) CHECK(n1.phi_star.values[j] == Catch::Approx(before.values[j] + 5).margin(1e-12));
    auto n2 = normalize(n1);
    CHECK(n2.phi.values == n1.phi.values);
    CHECK(n2.phi_star.values == n1.phi_star.values);
    CHECK(functional_value(n1.phi, a, b) == Catch::Approx(f0).margin(1e-12));
}

TEST_CASE("solver errors") {
    auto [a, b] = clouds_for(projective_space(2), 2);
    SolverConfig small;
    small.size_limit = 10;
    CHECK_THROWS_AS(solve_lp_oracle(a, b, small), Error);
    auto bad = b;
    bad.points[0].weight *= 2;
    try {
        solve_lp_oracle(a, bad);
        FAIL("expected Infeasible");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::Infeasible);
    }
    SolverConfig cap;
    cap.max_iterations = 1;
    CHECK_THROWS_AS(solve_entropic(a, b, cap), NonConvergence);
    SolverConfig sched;
    sched.epsilon_schedule = {0.1, 0.5};
    CHECK_THROWS_AS(solve_entropic(a, b, sched), Error);
    sched.method = "bogus";
    CHECK_THROWS_AS(solve(a, b, sched), Error);
}
