#include "rvp/catalog.hpp"

#include <catch_amalgamated.hpp>

#include <random>

using namespace rvp;

namespace {

std::vector<LatticeVector> sorted(std::vector<LatticeVector> v) {
    std::sort(v.begin(), v.end());
    return v;
}

const Facet& facet_labeled(const BoundaryComplex& cx, const LatticeVector& label) {
    return cx.facets.at(*cx.facet_index(label));
}

std::vector<LatticeVector> labels(const BoundaryComplex& cx, const std::vector<std::size_t>& ids) {
    std::vector<LatticeVector> out;
    for (auto i : ids) out.push_back(cx.facets[i].label);
    return sorted(out);
}

} // namespace

TEST_CASE("dual polytope: P^2 triangle") {
    CHECK(dual_polytope({{1, 0}, {0, 1}, {-1, -1}}) == sorted({{1, 1}, {1, -2}, {-2, 1}}));
}

TEST_CASE("dual polytope: hexagon") {
    std::vector<LatticeVector> hex{{1, 0}, {0, 1}, {-1, 1}, {-1, 0}, {0, -1}, {1, -1}};
    auto d = dual_polytope(hex);
    CHECK(d == sorted({{1, 0}, {-1, 0}, {1, 1}, {-1, -1}, {0, 1}, {0, -1}}));
    CHECK(dual_polytope(d) == sorted(hex));
}

TEST_CASE("duality is an involution on every bundled example") {
    for (const auto& e : example_catalog()) {
        INFO(e.name);
        CHECK(dual_polytope(e.pair.dual_vertices) == sorted(e.pair.delta_vertices));
        CHECK(dual_polytope(e.pair.delta_vertices) == sorted(e.pair.dual_vertices));
        CHECK_NOTHROW(validate_pair(e.pair));
    }
}

TEST_CASE("dual polytope errors") {
    auto code = [](auto&& fn) {
        try {
            fn();
        } catch (const Error& e) {
            return e.code();
        }
        return Errc::InvalidArgument;
    };
    CHECK(code([] { dual_polytope({{1, 0}, {2, 0}, {-1, 0}}); }) == Errc::NotFullDimensional);
    CHECK(code([] { dual_polytope({{1, 0}, {0, 1}, {1, 1}}); }) == Errc::OriginNotInterior);
    CHECK(code([] { dual_polytope({{2, 0}, {0, 2}, {-2, -2}}); }) == Errc::NotReflexive);
}

TEST_CASE("pairing condition") {
    auto p2 = projective_space(2);
    auto r = pairing_condition(p2);
    CHECK(r.holds);
    for (const auto& row : r.matrix) {
        CHECK(std::count(row.begin(), row.end(), -2) == 1);
        CHECK(std::count(row.begin(), row.end(), 1) == 2);
    }
    auto hex = hexagon(Rational(1, 4));
    auto h = pairing_condition(hex);
    CHECK_FALSE(h.holds);
    CHECK(std::find(h.violations.begin(), h.violations.end(), std::make_pair(LatticeVector{1, -1}, LatticeVector{1, 1})) != h.violations.end());
    CHECK(pairing_condition(*find_example("p1xp1")).holds);
    CHECK(pairing_condition(*find_example("p2xp1")).holds);
    CHECK(pairing_condition(projective_space(3)).holds);
}

TEST_CASE("pairing values are integers bounded by one") {
    for (const auto& e : example_catalog())
        for (const auto& row : pairing_condition(e.pair).matrix)
            for (auto v : row) CHECK(v <= 1);
}

TEST_CASE("weighted boundary: P^2 dual side, lambda = -1") {
    auto cx = dual_side_complex(projective_space(2));
    REQUIRE(cx.facets.size() == 3);
    for (const auto& f : cx.facets) CHECK(f.lattice_area == 3);
    CHECK(cx.total_lattice_measure == 9);
    CHECK(cx.side == Side::Dual);
}

TEST_CASE("weighted boundary: hexagon Delta_mu with eps = 1/4") {
    auto cx = primal_side_complex(hexagon(Rational(1, 4)));
    CHECK(cx.total_lattice_measure == Rational(9, 2));
    CHECK(facet_labeled(cx, {1, 1}).lattice_area == Rational(7, 4));
    CHECK(facet_labeled(cx, {1, 0}).lattice_area == Rational(1, 4));
    for (const auto& f : cx.facets)
        for (const auto& v : f.vertex_list) CHECK(dot(v, f.label) == f.offset);
}

TEST_CASE("weighted boundary: hexagon dual side, lambda = -1") {
    auto cx = dual_side_complex(hexagon(Rational(1, 4)));
    REQUIRE(cx.facets.size() == 6);
    for (const auto& f : cx.facets) CHECK(f.lattice_area == 1);
    CHECK(cx.total_lattice_measure == 6);
}

TEST_CASE("weighted boundary keeps empty facets with zero measure") {
    // x <= 1, y <= 1, x + y >= -1 and x + y <= 2: the last face is the point (1,1).
    auto cx = weighted_boundary({{1, 0}, {0, 1}, {-1, -1}, {1, 1}}, {-1, -1, -1, -2}, Side::Primal);
    REQUIRE(cx.facets.size() == 4);
    CHECK(cx.facets[3].dimension == 0);
    CHECK(cx.facets[3].lattice_area == 0);
    CHECK(cx.total_lattice_measure == 9);
}

TEST_CASE("weighted boundary errors") {
    CHECK_THROWS_AS(weighted_boundary({{1, 0}, {0, 1}, {-1, -1}}, {-1, 0, -1}, Side::Dual), Error);
    CHECK_THROWS_AS(weighted_boundary({{1, 0}, {0, 1}}, {-1, -1}, Side::Dual), Error);
}

TEST_CASE("lattice measure of segments") {
    CHECK(simplex_lattice_measure({{1, 1}, {1, -2}}, {1, 0}) == 3);
    Rational e(1, 4);
    CHECK(simplex_lattice_measure({{e - 1, 1}, {1, e - 1}}, {1, 1}) == Rational(7, 4));
    Facet point;
    point.label = {1, 1};
    point.dimension = 0;
    CHECK(lattice_measure(point) == 0);
    CHECK_THROWS_AS(simplex_lattice_measure({{1, 1}, {1, -2}}, {2, 0}), Error);
}

TEST_CASE("facet area equals the sum of its simplices") {
    for (const auto& e : example_catalog()) {
        for (const auto& cx : {dual_side_complex(e.pair), primal_side_complex(e.pair)}) {
            Rational total = 0;
            for (const auto& f : cx.facets) {
                Rational s = 0;
                for (const auto& t : f.triangulation) s += simplex_lattice_measure(t, f.label);
                CHECK(s == f.lattice_area);
                total += f.lattice_area;
            }
            CHECK(total == cx.total_lattice_measure);
        }
    }
}

TEST_CASE("lattice measure does not depend on the auxiliary vector or the lattice basis") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> coef(-3, 3);
    for (const auto& e : example_catalog()) {
        auto cx = dual_side_complex(e.pair);
        const std::size_t d = static_cast<std::size_t>(cx.dim);
        for (const auto& f : cx.facets) {
            for (const auto& s : f.triangulation) {
                Rational base = simplex_lattice_measure(s, f.label);
                LatticeVector v = f.transversal;
                for (const auto& t : f.tangent_lattice_basis) {
                    int c = coef(rng);
                    for (std::size_t i = 0; i < d; ++i) v[i] += c * t[i];
                }
                CHECK(simplex_lattice_measure(s, f.label, v) == base);
                // Change of basis: points by a unimodular T, normals by T^{-T}.
                // A reducer of a random primitive vector is a random unimodular matrix.
                LatticeVector r(d);
                do {
                    for (auto& x : r) x = coef(rng);
                } while (gcd_of(r) != 1);
                IntMatrix tm = unimodular_reducer(r);
                Simplex ts;
                for (const auto& p : s) ts.push_back(mat_vec(tm, p));
                // n' with <T p, n'> = <p, n> solves T^T n' = n.
                RationalMatrix tt(d, RationalVector(d));
                for (std::size_t i = 0; i < d; ++i)
                    for (std::size_t j = 0; j < d; ++j) tt[i][j] = tm[j][i];
                auto np = solve_linear(tt, to_rational(f.label));
                REQUIRE(np);
                LatticeVector ni;
                for (const auto& c : *np) {
                    REQUIRE(boost::multiprecision::denominator(c) == 1);
                    ni.push_back(static_cast<std::int64_t>(boost::multiprecision::numerator(c)));
                }
                CHECK(simplex_lattice_measure(ts, ni) == base);
            }
        }
    }
}

TEST_CASE("h split: hexagon with m0 = (1,-1)") {
    auto cx = primal_side_complex(hexagon(Rational(1, 4)));
    auto s = h_split(cx, {1, -1});
    CHECK(labels(cx, s.plus_facets) == sorted({{1, 0}, {0, -1}}));
    CHECK(labels(cx, s.zero_facets) == sorted({{1, 1}, {-1, -1}}));
    CHECK(labels(cx, s.minus_facets) == sorted({{-1, 0}, {0, 1}}));
    for (auto [k, j] : s.projection_jacobians) CHECK(j == 1);
}

TEST_CASE("h split: P^2 with m = (1,0)") {
    auto cx = primal_side_complex(projective_space(2));
    auto s = h_split(cx, {1, 0});
    CHECK(labels(cx, s.plus_facets) == sorted({{1, 1}, {1, -2}}));
    CHECK(labels(cx, s.minus_facets) == sorted({{-2, 1}}));
    CHECK(s.zero_facets.empty());
    CHECK(s.projection_jacobians.at(*cx.facet_index({-2, 1})) == 2);
    CHECK_THROWS_AS(h_split(cx, {2, 0}), Error);
}

TEST_CASE("h split fibers meet H+ and H- exactly once") {
    std::mt19937_64 rng(3);
    for (const auto& e : example_catalog()) {
        auto cx = primal_side_complex(e.pair);
        for (const auto& m : e.pair.delta_vertices) {
            auto s = h_split(cx, m);
            for (int trial = 0; trial < 100; ++trial) {
                // random interior point of Delta_mu as a convex combination of its vertices
                std::vector<long> w;
                long tot = 0;
                for (std::size_t i = 0; i < cx.vertices.size(); ++i) {
                    w.push_back(1 + static_cast<long>(rng() % 50));
                    tot += w.back();
                }
                RationalVector q(static_cast<std::size_t>(cx.dim), Rational(0));
                for (std::size_t i = 0; i < cx.vertices.size(); ++i)
                    for (std::size_t c = 0; c < q.size(); ++c) q[c] += cx.vertices[i][c] * Rational(w[i], tot);
                auto plus = s.plus_section(q);
                auto minus = s.minus_section(q);
                REQUIRE(plus);
                REQUIRE(minus);
                CHECK(cx.contains(*plus));
                CHECK(cx.contains(*minus));
                auto ap = cx.active_facets(*plus);
                auto am = cx.active_facets(*minus);
                REQUIRE_FALSE(ap.empty());
                REQUIRE_FALSE(am.empty());
                // every facet through the H+ point is a plus facet, and likewise for H-
                for (auto k : ap) CHECK(s.is_plus(k));
                for (auto k : am) CHECK(s.is_minus(k));
                CHECK(*plus != *minus);
            }
        }
    }
}

TEST_CASE("projection to M/Rm scales lattice measure by |<n,m>|") {
    for (const auto& e : example_catalog()) {
        auto cx = primal_side_complex(e.pair);
        for (const auto& m : e.pair.delta_vertices) {
            auto s = h_split(cx, m);
            for (std::size_t k = 0; k < cx.facets.size(); ++k) {
                std::int64_t jac = -dot(cx.facets[k].label, m);
                if (s.is_plus(k)) jac = 1;
                if (s.is_zero(k)) jac = 0;
                for (const auto& t : cx.facets[k].triangulation)
                    CHECK(quotient_measure(t, m) == simplex_lattice_measure(t, cx.facets[k].label) * jac);
            }
        }
    }
}

TEST_CASE("boundary lattice points of dilates") {
    CHECK(count_boundary_lattice_points({{1, 0}, {0, 1}, {-1, -1}}, 4) == 12);
    CHECK(count_boundary_lattice_points({{1, 1}, {1, -2}, {-2, 1}}, 2) == 18);
    for (const auto& e : example_catalog()) {
        if (e.pair.dim != 2) continue;
        for (const auto& poly : {e.pair.delta_vertices, e.pair.dual_vertices}) {
            auto cx = weighted_boundary(dual_polytope(poly), std::vector<Rational>(dual_polytope(poly).size(), Rational(-1)), Side::Primal);
            for (long k = 1; k <= 6; ++k) CHECK(count_boundary_lattice_points(poly, k) == k * cx.total_lattice_measure);
        }
    }
}

TEST_CASE("boundary lattice points in D=3 follow S k^2 + 2") {
    // Ehrhart: L(k) - L_interior(k) = S k^2 + 2 for a lattice 3-polytope with
    // relative surface area S.
    for (const char* name : {"p3-simplex", "p2xp1"}) {
        auto p = *find_example(name);
        for (const auto& poly : {p.delta_vertices, p.dual_vertices}) {
            auto dual = dual_polytope(poly);
            auto cx = weighted_boundary(dual, std::vector<Rational>(dual.size(), Rational(-1)), Side::Primal);
            for (long k = 1; k <= 4; ++k) CHECK(Rational(count_boundary_lattice_points(poly, k)) == cx.total_lattice_measure * k * k + 2);
        }
    }
}

TEST_CASE("incidence lists every facet through each vertex") {
    auto cx = primal_side_complex(projective_space(3));
    for (const auto& face : cx.incidence) {
        if (face.dimension == 0) CHECK(face.facets.size() == 3);
        if (face.dimension == 1) CHECK(face.facets.size() == 2);
    }
}
