#pragma once

// Weighted barycenter samples approximating the normalized boundary measures.

#include "rvp/polytope.hpp"

#include <cstdio>
#include <memory>

namespace rvp {

struct SamplePoint {
    RationalVector position;
    RealVector x; // position as floats
    std::size_t facet = 0;
    LatticeVector facet_label;
    Rational exact_weight;
    double weight = 0;
    std::size_t fan_simplex = 0; // index within the facet's fan triangulation
    std::size_t leaf = 0;        // depth-first leaf index inside that fan simplex
};

struct SampleCloud {
    Side side = Side::Dual;
    int dim = 0;
    int depth = 0;
    double h = 0; // max Euclidean diameter of the leaf simplices
    std::shared_ptr<const BoundaryComplex> complex;
    std::vector<SamplePoint> points;
    std::vector<std::size_t> facet_begin, facet_end; // sample ranges per facet

    std::size_t size() const { return points.size(); }
    std::size_t children_per_split() const { return std::size_t{1} << (dim - 1); }
    double max_norm() const {
        double r = 0;
        for (const auto& p : points) r = std::max(r, norm(p.x));
        return r;
    }

    // Cell containing sample i at refinement level `level` (0 = fan simplex).
    std::size_t cell_of(std::size_t i, int level) const {
        const auto& p = points[i];
        std::size_t block = 1;
        for (int l = level; l < depth; ++l) block *= children_per_split();
        return p.leaf / block;
    }
};

namespace detail {

inline double diameter(const Simplex& s) {
    double d = 0;
    for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t j = i + 1; j < s.size(); ++j) d = std::max(d, distance(to_real(s[i]), to_real(s[j])));
    return d;
}

// Uniform red refinement: 2 children for segments, 4 for triangles,
// 8 for tetrahedra (corner cuts plus the octahedron split along its
// shortest diagonal).
inline std::vector<Simplex> subdivide(const Simplex& s) {
    const auto& a = s[0];
    if (s.size() == 2) {
        auto m = midpoint(s[0], s[1]);
        return {{a, m}, {m, s[1]}};
    }
    if (s.size() == 3) {
        auto ab = midpoint(s[0], s[1]), bc = midpoint(s[1], s[2]), ac = midpoint(s[0], s[2]);
        return {{a, ab, ac}, {ab, s[1], bc}, {ac, bc, s[2]}, {ab, bc, ac}};
    }
    auto m = [&](int i, int j) { return midpoint(s[static_cast<std::size_t>(i)], s[static_cast<std::size_t>(j)]); };
    auto x01 = m(0, 1), x02 = m(0, 2), x03 = m(0, 3), x12 = m(1, 2), x13 = m(1, 3), x23 = m(2, 3);
    std::vector<Simplex> out{{s[0], x01, x02, x03}, {x01, s[1], x12, x13}, {x02, x12, s[2], x23}, {x03, x13, x23, s[3]}};
    // opposite pairs of the inner octahedron
    std::vector<std::pair<RationalVector, RationalVector>> diag{{x01, x23}, {x02, x13}, {x03, x12}};
    std::size_t best = 0;
    double best_len = 0;
    for (std::size_t k = 0; k < 3; ++k) {
        double len = distance(to_real(diag[k].first), to_real(diag[k].second));
        if (k == 0 || len < best_len - 1e-15) {
            best = k;
            best_len = len;
        }
    }
    const auto& p = diag[best];
    const auto& e1 = diag[(best + 1) % 3];
    const auto& e2 = diag[(best + 2) % 3];
    std::vector<RationalVector> ring{e1.first, e2.first, e1.second, e2.second};
    for (std::size_t k = 0; k < 4; ++k) out.push_back({p.first, p.second, ring[k], ring[(k + 1) % 4]});
    return out;
}

inline void refine_into(const Simplex& s, int depth, std::vector<Simplex>& out) {
    if (depth == 0) {
        out.push_back(s);
        return;
    }
    for (const auto& c : subdivide(s)) refine_into(c, depth - 1, out);
}

} // namespace detail

inline SampleCloud triangulate_refine(const BoundaryComplex& complex, int depth) {
    if (depth < 0) throw Error(Errc::InvalidArgument, "depth must be >= 0");
    if (complex.total_lattice_measure == 0) throw Error(Errc::ZeroMeasureBoundary, "boundary has zero lattice measure");
    SampleCloud cloud;
    cloud.side = complex.side;
    cloud.dim = complex.dim;
    cloud.depth = depth;
    cloud.complex = std::make_shared<const BoundaryComplex>(complex);
    for (std::size_t k = 0; k < complex.facets.size(); ++k) {
        const auto& f = complex.facets[k];
        cloud.facet_begin.push_back(cloud.points.size());
        for (std::size_t t = 0; t < f.triangulation.size(); ++t) {
            std::vector<Simplex> leaves;
            detail::refine_into(f.triangulation[t], depth, leaves);
            for (std::size_t l = 0; l < leaves.size(); ++l) {
                Rational w = simplex_lattice_measure(leaves[l], f.label);
                if (w == 0) continue;
                SamplePoint sp;
                sp.position = centroid(leaves[l]);
                sp.x = to_real(sp.position);
                sp.facet = k;
                sp.facet_label = f.label;
                sp.exact_weight = w / complex.total_lattice_measure;
                sp.weight = to_double(sp.exact_weight);
                sp.fan_simplex = t;
                sp.leaf = l;
                cloud.h = std::max(cloud.h, detail::diameter(leaves[l]));
                cloud.points.push_back(std::move(sp));
            }
        }
        cloud.facet_end.push_back(cloud.points.size());
    }
    return cloud;
}

inline std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string format_label(const LatticeVector& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ';';
        s += std::to_string(v[i]);
    }
    return s;
}

// CSV: side,facet_label,x0..x{D-1},weight (labels use ';' between coordinates).
inline std::string cloud_to_csv(const SampleCloud& c) {
    std::string out = "side,facet_label";
    for (int i = 0; i < c.dim; ++i) out += ",x" + std::to_string(i);
    out += ",weight\n";
    for (const auto& p : c.points) {
        out += side_name(c.side);
        out += "," + format_label(p.facet_label);
        for (double v : p.x) out += "," + format_real(v);
        out += "," + format_real(p.weight) + "\n";
    }
    return out;
}

} // namespace rvp
