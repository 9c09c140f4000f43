#pragma once

// Bundled instances.

#include "rvp/instance_io.hpp"

namespace rvp {

struct CatalogEntry {
    std::string name;
    std::string description;
    WeightedPolytopePair pair;
};

inline WeightedPolytopePair make_pair_uniform(std::string name, std::vector<LatticeVector> delta) {
    WeightedPolytopePair p;
    p.name = std::move(name);
    p.dim = static_cast<int>(delta.at(0).size());
    p.delta_vertices = std::move(delta);
    p.dual_vertices = dual_polytope(p.delta_vertices);
    p.lambda.assign(p.delta_vertices.size(), Rational(-1));
    p.mu.assign(p.dual_vertices.size(), Rational(-1));
    return p;
}

// Standard simplex of P^D: e_1..e_D and -(e_1+...+e_D).
inline WeightedPolytopePair projective_space(int d) {
    std::vector<LatticeVector> v;
    for (int i = 0; i < d; ++i) {
        LatticeVector e(static_cast<std::size_t>(d), 0);
        e[static_cast<std::size_t>(i)] = 1;
        v.push_back(e);
    }
    v.push_back(LatticeVector(static_cast<std::size_t>(d), -1));
    return make_pair_uniform("p" + std::to_string(d) + "-simplex", v);
}

// Delta = Delta_1 x Delta_2, Delta^vee = hull of (n_1, 0) and (0, n_2).
inline WeightedPolytopePair product(const WeightedPolytopePair& a, const WeightedPolytopePair& b, std::string name) {
    std::vector<LatticeVector> delta;
    for (const auto& m1 : a.delta_vertices)
        for (const auto& m2 : b.delta_vertices) {
            LatticeVector v = m1;
            v.insert(v.end(), m2.begin(), m2.end());
            delta.push_back(v);
        }
    return make_pair_uniform(std::move(name), delta);
}

inline WeightedPolytopePair projective_line() {
    WeightedPolytopePair p;
    p.name = "p1";
    p.dim = 1;
    p.delta_vertices = {{1}, {-1}};
    p.dual_vertices = {{-1}, {1}};
    p.lambda = {-1, -1};
    p.mu = {-1, -1};
    return p;
}

// Terminating decimal when one exists (1/4 -> 0.25), p/q otherwise.
inline std::string decimal_name(const Rational& q) {
    Rational x = q;
    int k = 0;
    while (denominator(x) != 1 && k < 12) {
        x *= 10;
        ++k;
    }
    if (denominator(x) != 1) return format_rational(q);
    std::string digits = numerator(x).str();
    bool neg = !digits.empty() && digits[0] == '-';
    if (neg) digits.erase(0, 1);
    if (k > 0) {
        if (static_cast<int>(digits.size()) <= k) digits.insert(0, static_cast<std::size_t>(k) + 1 - digits.size(), '0');
        digits.insert(digits.size() - static_cast<std::size_t>(k), ".");
    }
    return (neg ? "-" : "") + digits;
}

// Delta^vee = hull of +-(1,0), +-(1,1), +-(0,1); mu cuts Delta_mu down to
// |x| <= 1, |y| <= 1, |x+y| <= eps.
inline WeightedPolytopePair hexagon(const Rational& eps) {
    auto p = make_pair_uniform("hexagon-eps-" + decimal_name(eps), {{1, 0}, {0, 1}, {-1, 1}, {-1, 0}, {0, -1}, {1, -1}});
    for (std::size_t j = 0; j < p.dual_vertices.size(); ++j) {
        const auto& n = p.dual_vertices[j];
        p.mu[j] = (n[0] != 0 && n[1] != 0) ? Rational(-eps) : Rational(-1);
    }
    return p;
}

inline std::vector<CatalogEntry> example_catalog() {
    std::vector<CatalogEntry> c;
    c.push_back({"p2-simplex", "P^2 triangle pair, lambda = mu = -1", projective_space(2)});
    c.push_back({"p3-simplex", "P^3 simplex pair (D=3), lambda = mu = -1", projective_space(3)});
    c.push_back({"p1xp1", "product P^1 x P^1: square and diamond", product(projective_line(), projective_line(), "p1xp1")});
    c.push_back({"p2xp1", "product P^2 x P^1 (D=3)", product(projective_space(2), projective_line(), "p2xp1")});
    for (const auto& e : {Rational(1, 4), Rational(2, 5), Rational(1, 2), Rational(1)}) {
        auto h = hexagon(e);
        c.push_back({h.name, "hexagon pair violating the pairing condition, eps = " + format_rational(e), h});
    }
    return c;
}

inline std::optional<WeightedPolytopePair> find_example(const std::string& name) {
    for (auto& e : example_catalog())
        if (e.name == name) return e.pair;
    return std::nullopt;
}

// Bundled name or path to an instance file.
inline WeightedPolytopePair resolve_instance(const std::string& ref) {
    if (auto p = find_example(ref)) return *p;
    return load_instance(ref);
}

} // namespace rvp
