#include "rvp/catalog.hpp"
#include "rvp/mesh.hpp"

#include <catch_amalgamated.hpp>

using namespace rvp;

TEST_CASE("P^2 dual side, depth 0: one sample per edge") {
    auto c = triangulate_refine(dual_side_complex(projective_space(2)), 0);
    REQUIRE(c.size() == 3);
    for (const auto& p : c.points) CHECK(p.exact_weight == Rational(1, 3));
}

TEST_CASE("P^2 dual side, depth 3: 24 samples, 1/3 per edge") {
    auto c = triangulate_refine(dual_side_complex(projective_space(2)), 3);
    REQUIRE(c.size() == 24);
    for (std::size_t k = 0; k < 3; ++k) {
        Rational s = 0;
        for (std::size_t i = c.facet_begin[k]; i < c.facet_end[k]; ++i) s += c.points[i].exact_weight;
        CHECK(s == Rational(1, 3));
    }
}

TEST_CASE("hexagon dual side, depth 1: 12 equal samples") {
    auto c = triangulate_refine(dual_side_complex(hexagon(Rational(1, 4))), 1);
    REQUIRE(c.size() == 12);
    for (const auto& p : c.points) CHECK(p.exact_weight == Rational(1, 12));
}

TEST_CASE("weights: exact totals, per-facet sums, interior positions") {
    for (const auto& e : example_catalog()) {
        for (const auto& cx : {dual_side_complex(e.pair), primal_side_complex(e.pair)}) {
            int max_depth = cx.dim == 2 ? 4 : 2;
            std::vector<Rational> facet_mass0;
            for (int depth = 0; depth <= max_depth; ++depth) {
                INFO(e.name << " side " << side_name(cx.side) << " depth " << depth);
                auto c = triangulate_refine(cx, depth);
                Rational exact = 0;
                double total = 0;
                for (const auto& p : c.points) {
                    exact += p.exact_weight;
                    total += p.weight;
                    CHECK(p.weight > 0);
                    CHECK(cx.slack(p.position, p.facet) == 0);
                    for (std::size_t k = 0; k < cx.normals.size(); ++k)
                        if (k != p.facet) CHECK(cx.slack(p.position, k) < 0);
                }
                CHECK(exact == 1);
                CHECK(std::abs(total - 1) <= 1e-12);
                std::vector<Rational> mass;
                for (std::size_t k = 0; k < cx.facets.size(); ++k) {
                    Rational s = 0;
                    double sd = 0;
                    for (std::size_t i = c.facet_begin[k]; i < c.facet_end[k]; ++i) {
                        s += c.points[i].exact_weight;
                        sd += c.points[i].weight;
                    }
                    CHECK(s == cx.facets[k].lattice_area / cx.total_lattice_measure);
                    CHECK(std::abs(sd - to_double(s)) <= 1e-12);
                    mass.push_back(s);
                }
                if (depth == 0) facet_mass0 = mass;
                CHECK(mass == facet_mass0);
            }
        }
    }
}

TEST_CASE("mesh parameter shrinks with depth") {
    for (const auto& e : example_catalog()) {
        auto cx = dual_side_complex(e.pair);
        double prev = triangulate_refine(cx, 0).h;
        for (int depth = 1; depth <= (cx.dim == 2 ? 4 : 2); ++depth) {
            double h = triangulate_refine(cx, depth).h;
            if (cx.dim == 2) CHECK(std::abs(h - prev / 2) <= 1e-12);
            else CHECK(prev / h >= 1.5);
            prev = h;
        }
    }
}

TEST_CASE("D=4 refinement: equal-volume children, shrinking diameters") {
    auto p = product(projective_space(2), projective_space(2), "p2xp2");
    auto cx = primal_side_complex(p);
    auto c1 = triangulate_refine(cx, 1);
    auto c2 = triangulate_refine(cx, 2);
    CHECK(c2.size() == 8 * c1.size());
    Rational s = 0;
    for (const auto& q : c2.points) s += q.exact_weight;
    CHECK(s == 1);
    for (std::size_t i = 0; i < c1.size(); ++i) {
        // all 8 children of a leaf carry exactly 1/8 of its weight
        for (std::size_t j = 8 * i; j < 8 * i + 8; ++j) CHECK(c2.points[j].exact_weight * 8 == c1.points[i].exact_weight);
    }
    for (const auto& side : {dual_side_complex(p), primal_side_complex(p)}) {
        double h0 = triangulate_refine(side, 0).h, h1 = triangulate_refine(side, 1).h, h2 = triangulate_refine(side, 2).h;
        CHECK(h0 / h1 >= 1.5);
        CHECK(h1 / h2 >= 1.5);
    }
}

TEST_CASE("cloud CSV dump is deterministic") {
    auto cx = primal_side_complex(hexagon(Rational(1, 4)));
    auto a = cloud_to_csv(triangulate_refine(cx, 2));
    auto b = cloud_to_csv(triangulate_refine(cx, 2));
    CHECK(a == b);
    CHECK(a.rfind("side,facet_label,x0,x1,weight\n", 0) == 0);
    CHECK(std::count(a.begin(), a.end(), '\n') == 1 + static_cast<long>(triangulate_refine(cx, 2).size()));
}

TEST_CASE("zero measure boundary is rejected") {
    BoundaryComplex cx;
    CHECK_THROWS_AS(triangulate_refine(cx, 0), Error);
}
