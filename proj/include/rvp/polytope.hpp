#pragma once

// Exact geometry of weighted reflexive polytope pairs.

#include "rvp/rational.hpp"

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace rvp {

// DualSide: boundary of Delta_lambda^vee in N_R, facets labeled by vertices m
// of Delta. PrimalSide: boundary of Delta_mu in M_R, labeled by vertices n.
enum class Side { Dual, Primal };

inline const char* side_name(Side s) { return s == Side::Dual ? "dual" : "primal"; }

using Simplex = std::vector<RationalVector>;

struct WeightedPolytopePair {
    std::string name;
    int dim = 0;
    std::vector<LatticeVector> delta_vertices;
    std::vector<LatticeVector> dual_vertices;
    std::vector<Rational> lambda; // indexed like delta_vertices
    std::vector<Rational> mu;     // indexed like dual_vertices
};

struct Facet {
    LatticeVector label;
    std::size_t label_index = 0;
    Rational offset; // facet lies on <y, label> = offset
    std::vector<std::size_t> vertex_ids;
    std::vector<RationalVector> vertex_list;
    int dimension = -1; // affine dimension of the face, D-1 unless degenerate
    IntMatrix tangent_lattice_basis;
    LatticeVector transversal; // <transversal, label> = 1
    std::vector<Simplex> triangulation;
    Rational lattice_area = 0;
};

// A lower-dimensional face with the facets containing it.
struct Face {
    std::vector<std::size_t> vertex_ids;
    std::vector<std::size_t> facets;
    int dimension = 0;
};

struct BoundaryComplex {
    Side side = Side::Dual;
    int dim = 0;
    std::vector<LatticeVector> normals;
    std::vector<Rational> weights;
    std::vector<RationalVector> vertices;
    std::vector<Facet> facets; // facets[k] is labeled by normals[k]
    std::vector<Face> incidence;
    Rational total_lattice_measure = 0;

    // <y, n_k> + w_k; zero on facet k, negative strictly inside.
    Rational slack(const RationalVector& y, std::size_t k) const { return dot(y, normals[k]) + weights[k]; }

    bool contains(const RationalVector& y) const {
        for (std::size_t k = 0; k < normals.size(); ++k)
            if (slack(y, k) > 0) return false;
        return true;
    }

    std::vector<std::size_t> active_facets(const RationalVector& y) const {
        std::vector<std::size_t> r;
        for (std::size_t k = 0; k < normals.size(); ++k)
            if (slack(y, k) == 0) r.push_back(k);
        return r;
    }

    std::optional<std::size_t> facet_index(const LatticeVector& label) const {
        for (std::size_t k = 0; k < normals.size(); ++k)
            if (normals[k] == label) return k;
        return std::nullopt;
    }
};

namespace detail {

inline void for_each_subset(std::size_t n, std::size_t k, const std::function<void(const std::vector<std::size_t>&)>& fn) {
    if (k > n) return;
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    while (true) {
        fn(idx);
        std::size_t i = k;
        while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
        if (i == 0) return;
        ++idx[i - 1];
        for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

// Normal of the hyperplane through D affinely independent points
// (generalized cross product of the D-1 difference vectors).
inline std::optional<RationalVector> hyperplane_normal(const std::vector<RationalVector>& pts) {
    const std::size_t d = pts[0].size();
    RationalMatrix diffs;
    for (std::size_t i = 1; i < pts.size(); ++i) diffs.push_back(sub(pts[i], pts[0]));
    RationalVector n(d);
    bool nonzero = false;
    for (std::size_t c = 0; c < d; ++c) {
        RationalMatrix minor;
        for (const auto& row : diffs) {
            RationalVector r;
            for (std::size_t j = 0; j < d; ++j)
                if (j != c) r.push_back(row[j]);
            minor.push_back(r);
        }
        n[c] = determinant(minor) * ((c % 2) ? -1 : 1);
        if (n[c] != 0) nonzero = true;
    }
    if (!nonzero) return std::nullopt;
    return n;
}

// Scales a rational direction to the primitive integer vector on its ray.
inline LatticeVector primitive_direction(const RationalVector& v) {
    BigInt l = 1;
    for (const auto& x : v) l = boost::multiprecision::lcm(l, boost::multiprecision::denominator(x));
    std::vector<BigInt> z;
    BigInt g = 0;
    for (const auto& x : v) {
        BigInt zi = boost::multiprecision::numerator(x) * (l / boost::multiprecision::denominator(x));
        z.push_back(zi);
        g = boost::multiprecision::gcd(g, zi < 0 ? BigInt(-zi) : zi);
    }
    LatticeVector out;
    for (auto& zi : z) out.push_back(static_cast<std::int64_t>(zi / g));
    return out;
}

inline bool lex_less(const RationalVector& a, const RationalVector& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

} // namespace detail

// Vertices of {y : <y, n_k> <= b_k}, sorted lexicographically.
inline std::vector<RationalVector> halfspace_vertices(const std::vector<LatticeVector>& normals,
                                                      const std::vector<Rational>& bounds) {
    const std::size_t d = normals.at(0).size();
    std::vector<RationalVector> out;
    detail::for_each_subset(normals.size(), d, [&](const std::vector<std::size_t>& s) {
        RationalMatrix a;
        RationalVector b;
        for (auto k : s) {
            a.push_back(to_rational(normals[k]));
            b.push_back(bounds[k]);
        }
        auto y = solve_linear(a, b);
        if (!y) return;
        for (std::size_t k = 0; k < normals.size(); ++k)
            if (dot(*y, normals[k]) > bounds[k]) return;
        out.push_back(*y);
    });
    std::sort(out.begin(), out.end(), detail::lex_less);
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

struct Halfspace {
    LatticeVector normal; // primitive, outward
    Rational offset;      // <y, normal> <= offset
};

// Facet inequalities of conv(points) by brute force over D-subsets.
inline std::vector<Halfspace> hull_facets(const std::vector<RationalVector>& pts) {
    const std::size_t d = pts.at(0).size();
    std::vector<Halfspace> out;
    detail::for_each_subset(pts.size(), d, [&](const std::vector<std::size_t>& s) {
        std::vector<RationalVector> sel;
        for (auto i : s) sel.push_back(pts[i]);
        auto n = detail::hyperplane_normal(sel);
        if (!n) return;
        LatticeVector pn = detail::primitive_direction(*n);
        Rational c = dot(sel[0], pn);
        bool pos = false, neg = false;
        for (const auto& p : pts) {
            Rational v = dot(p, pn) - c;
            if (v > 0) pos = true;
            if (v < 0) neg = true;
        }
        if (pos && neg) return;
        if (pos) {
            for (auto& x : pn) x = -x;
            c = -c;
        }
        for (const auto& h : out)
            if (h.normal == pn) return;
        out.push_back({pn, c});
    });
    std::sort(out.begin(), out.end(), [](const Halfspace& a, const Halfspace& b) { return a.normal < b.normal; });
    return out;
}

inline std::vector<RationalVector> to_rational(const std::vector<LatticeVector>& vs) {
    std::vector<RationalVector> r;
    for (const auto& v : vs) r.push_back(to_rational(v));
    return r;
}

// Vertices of {x : <m, x> <= 1 for all m}, sorted lexicographically.
inline std::vector<LatticeVector> dual_polytope(const std::vector<LatticeVector>& vertices) {
    if (vertices.empty()) throw Error(Errc::NotFullDimensional, "no vertices");
    const std::size_t d = vertices[0].size();
    if (d < 2 || d > 4) throw Error(Errc::InvalidArgument, "ambient dimension must be 2..4");
    for (const auto& v : vertices)
        if (v.size() != d) throw Error(Errc::InvalidArgument, "vertices of mixed dimension");
    auto rv = to_rational(vertices);
    if (affine_dimension(rv) != static_cast<int>(d))
        throw Error(Errc::NotFullDimensional, "vertices do not span R^" + std::to_string(d));
    for (const auto& h : hull_facets(rv))
        if (h.offset <= 0)
            throw Error(Errc::OriginNotInterior, "origin not strictly inside facet with normal " + format_vector(h.normal));
    auto dv = halfspace_vertices(vertices, std::vector<Rational>(vertices.size(), Rational(1)));
    std::vector<LatticeVector> out;
    for (const auto& x : dv) {
        LatticeVector z;
        for (const auto& c : x) {
            if (boost::multiprecision::denominator(c) != 1)
                throw Error(Errc::NotReflexive, "dual vertex " + format_vector(x) + " is not integral");
            z.push_back(static_cast<std::int64_t>(boost::multiprecision::numerator(c)));
        }
        out.push_back(z);
    }
    return out;
}

struct PairingReport {
    bool holds = true;
    std::vector<std::pair<LatticeVector, LatticeVector>> violations; // (m, n) with <m,n> = 0
    IntMatrix matrix; // matrix[i][j] = <m_i, n_j>
};

inline PairingReport pairing_condition(const WeightedPolytopePair& pair) {
    PairingReport r;
    for (const auto& m : pair.delta_vertices) {
        LatticeVector row;
        for (const auto& n : pair.dual_vertices) {
            auto v = dot(m, n);
            row.push_back(v);
            if (v == 0) r.violations.push_back({m, n});
        }
        r.matrix.push_back(row);
    }
    r.holds = r.violations.empty();
    return r;
}

// Validates the pair invariants; throws on the first violation.
inline void validate_pair(const WeightedPolytopePair& pair) {
    const std::size_t d = static_cast<std::size_t>(pair.dim);
    for (const auto& v : pair.delta_vertices)
        if (v.size() != d) throw Error(Errc::InvalidArgument, "delta vertex " + format_vector(v) + " has wrong dimension");
    for (const auto& v : pair.delta_vertices)
        if (!is_primitive(v)) throw Error(Errc::NotReflexive, "delta vertex " + format_vector(v) + " is not primitive");
    auto dual = dual_polytope(pair.delta_vertices);
    auto given = pair.dual_vertices;
    std::sort(given.begin(), given.end());
    if (given != dual) throw Error(Errc::InvalidArgument, "dual_vertices differ from the computed dual of delta_vertices");
    auto back = dual_polytope(pair.dual_vertices);
    auto dv = pair.delta_vertices;
    std::sort(dv.begin(), dv.end());
    if (back != dv) throw Error(Errc::NotReflexive, "delta_vertices are not the vertex set of the bidual");
    if (pair.lambda.size() != pair.delta_vertices.size() || pair.mu.size() != pair.dual_vertices.size())
        throw Error(Errc::InvalidArgument, "weight vector length mismatch");
    for (std::size_t i = 0; i < pair.lambda.size(); ++i)
        if (pair.lambda[i] >= 0) throw Error(Errc::InvalidArgument, "lambda[" + std::to_string(i) + "] must be negative");
    for (std::size_t i = 0; i < pair.mu.size(); ++i)
        if (pair.mu[i] >= 0) throw Error(Errc::InvalidArgument, "mu[" + std::to_string(i) + "] must be negative");
}

// Lattice measure of a (D-1)-simplex lying on a hyperplane with normal n.
inline Rational simplex_lattice_measure(const Simplex& s, const LatticeVector& n) {
    if (!is_primitive(n)) throw Error(Errc::NonPrimitiveNormal, "normal " + format_vector(n) + " is not primitive");
    const std::size_t d = n.size();
    if (s.size() != d) return 0;
    LatticeVector v = unit_pairing_vector(n);
    RationalMatrix m;
    for (std::size_t i = 1; i < s.size(); ++i) m.push_back(sub(s[i], s[0]));
    m.push_back(to_rational(v));
    Rational det = abs(determinant(m));
    for (std::size_t k = 2; k < d; ++k) det /= static_cast<long>(k);
    return det;
}

// Same quantity with an explicit auxiliary vector (for invariance checks).
inline Rational simplex_lattice_measure(const Simplex& s, const LatticeVector& n, const LatticeVector& v) {
    if (dot(v, n) != 1) throw Error(Errc::InvalidArgument, "auxiliary vector must pair to 1 with the normal");
    const std::size_t d = n.size();
    RationalMatrix m;
    for (std::size_t i = 1; i < s.size(); ++i) m.push_back(sub(s[i], s[0]));
    m.push_back(to_rational(v));
    Rational det = abs(determinant(m));
    for (std::size_t k = 2; k < d; ++k) det /= static_cast<long>(k);
    return det;
}

inline Rational lattice_measure(const Facet& f) {
    if (!is_primitive(f.label)) throw Error(Errc::NonPrimitiveNormal, "facet label " + format_vector(f.label) + " is not primitive");
    Rational total = 0;
    if (f.dimension < static_cast<int>(f.label.size()) - 1) return total;
    for (const auto& s : f.triangulation) total += simplex_lattice_measure(s, f.label);
    return total;
}

namespace detail {

// Faces of codimension one inside the face spanned by ids (of dimension dim),
// found as maximal sets of vertices sharing an extra tight constraint.
inline std::vector<std::vector<std::size_t>> subfaces(const BoundaryComplex& cx, const std::vector<std::size_t>& ids, int dim) {
    std::vector<std::vector<std::size_t>> out;
    for (std::size_t k = 0; k < cx.normals.size(); ++k) {
        std::vector<std::size_t> sub;
        for (auto i : ids)
            if (cx.slack(cx.vertices[i], k) == 0) sub.push_back(i);
        if (sub.size() == ids.size()) continue;
        std::vector<RationalVector> pts;
        for (auto i : sub) pts.push_back(cx.vertices[i]);
        if (affine_dimension(pts) != dim - 1) continue;
        if (std::find(out.begin(), out.end(), sub) == out.end()) out.push_back(sub);
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Simplices stay whole; anything else is coned from its centroid over the
// triangulations of its subfaces.
inline std::vector<Simplex> fan_triangulate(const BoundaryComplex& cx, const std::vector<std::size_t>& ids, int dim) {
    std::vector<RationalVector> pts;
    for (auto i : ids) pts.push_back(cx.vertices[i]);
    if (static_cast<int>(ids.size()) == dim + 1) return {pts};
    RationalVector c = centroid(pts);
    std::vector<Simplex> out;
    for (const auto& sf : subfaces(cx, ids, dim))
        for (auto s : fan_triangulate(cx, sf, dim - 1)) {
            s.push_back(c);
            out.push_back(std::move(s));
        }
    return out;
}

} // namespace detail

// Facet complex of {y : max_k <y, n_k> + w_k <= 0}.
inline BoundaryComplex weighted_boundary(const std::vector<LatticeVector>& normals, const std::vector<Rational>& weights, Side side) {
    if (normals.empty() || normals.size() != weights.size()) throw Error(Errc::InvalidArgument, "normals/weights size mismatch");
    const std::size_t d = normals[0].size();
    for (std::size_t k = 0; k < weights.size(); ++k)
        if (weights[k] >= 0)
            throw Error(Errc::EmptyPolytope, "weight " + std::to_string(k) + " is not negative; origin would not be interior");
    {
        // Bounded iff the normals positively span, i.e. 0 is interior to their hull.
        auto rn = to_rational(normals);
        if (affine_dimension(rn) != static_cast<int>(d)) throw Error(Errc::EmptyPolytope, "normals do not span; region unbounded");
        for (const auto& h : hull_facets(rn))
            if (h.offset <= 0) throw Error(Errc::EmptyPolytope, "normals do not surround the origin; region unbounded");
    }
    BoundaryComplex cx;
    cx.side = side;
    cx.dim = static_cast<int>(d);
    cx.normals = normals;
    cx.weights = weights;
    std::vector<Rational> bounds;
    for (const auto& w : weights) bounds.push_back(-w);
    cx.vertices = halfspace_vertices(normals, bounds);
    for (std::size_t k = 0; k < normals.size(); ++k) {
        Facet f;
        f.label = normals[k];
        f.label_index = k;
        f.offset = -weights[k];
        for (std::size_t i = 0; i < cx.vertices.size(); ++i)
            if (cx.slack(cx.vertices[i], k) == 0) {
                f.vertex_ids.push_back(i);
                f.vertex_list.push_back(cx.vertices[i]);
            }
        f.dimension = affine_dimension(f.vertex_list);
        if (!is_primitive(f.label)) throw Error(Errc::NonPrimitiveNormal, "normal " + format_vector(f.label) + " is not primitive");
        f.tangent_lattice_basis = kernel_lattice_basis(f.label);
        f.transversal = unit_pairing_vector(f.label);
        if (f.dimension == static_cast<int>(d) - 1) f.triangulation = detail::fan_triangulate(cx, f.vertex_ids, f.dimension);
        f.lattice_area = lattice_measure(f);
        cx.total_lattice_measure += f.lattice_area;
        cx.facets.push_back(std::move(f));
    }
    // Incidence of lower-dimensional faces: every vertex, plus every
    // codimension-two face (ridge) shared by a pair of facets.
    for (std::size_t i = 0; i < cx.vertices.size(); ++i) {
        Face face{{i}, cx.active_facets(cx.vertices[i]), 0};
        cx.incidence.push_back(face);
    }
    if (d >= 3) {
        std::set<std::vector<std::size_t>> seen;
        for (std::size_t a = 0; a < cx.facets.size(); ++a)
            for (std::size_t b = a + 1; b < cx.facets.size(); ++b) {
                std::vector<std::size_t> common;
                std::set_intersection(cx.facets[a].vertex_ids.begin(), cx.facets[a].vertex_ids.end(),
                                      cx.facets[b].vertex_ids.begin(), cx.facets[b].vertex_ids.end(), std::back_inserter(common));
                std::vector<RationalVector> pts;
                for (auto i : common) pts.push_back(cx.vertices[i]);
                if (affine_dimension(pts) != static_cast<int>(d) - 2 || !seen.insert(common).second) continue;
                Face face;
                face.vertex_ids = common;
                face.dimension = static_cast<int>(d) - 2;
                for (std::size_t k = 0; k < cx.facets.size(); ++k)
                    if (std::includes(cx.facets[k].vertex_ids.begin(), cx.facets[k].vertex_ids.end(), common.begin(), common.end()))
                        face.facets.push_back(k);
                cx.incidence.push_back(face);
            }
    }
    return cx;
}

// A-side complex (boundary of Delta_lambda^vee) and B-side complex (boundary of Delta_mu).
inline BoundaryComplex dual_side_complex(const WeightedPolytopePair& p) { return weighted_boundary(p.delta_vertices, p.lambda, Side::Dual); }
inline BoundaryComplex primal_side_complex(const WeightedPolytopePair& p) { return weighted_boundary(p.dual_vertices, p.mu, Side::Primal); }

struct HSplit {
    LatticeVector m;
    std::vector<std::size_t> plus_facets, minus_facets, zero_facets; // facet indices of the complex
    std::map<std::size_t, std::int64_t> projection_jacobians;         // minus facet -> |<n,m>|
    const BoundaryComplex* complex = nullptr; // must outlive the split

    // Clips the line q + t m against the complex; nullopt if it misses.
    std::optional<std::pair<Rational, Rational>> fiber(const RationalVector& q) const {
        std::optional<Rational> lo, hi;
        for (std::size_t k = 0; k < complex->normals.size(); ++k) {
            std::int64_t a = dot(complex->normals[k], m);
            Rational rhs = -complex->weights[k] - dot(q, complex->normals[k]);
            if (a == 0) {
                if (rhs < 0) return std::nullopt;
                continue;
            }
            Rational t = rhs / a;
            if (a > 0) {
                if (!hi || t < *hi) hi = t;
            } else if (!lo || t > *lo) {
                lo = t;
            }
        }
        if (!lo || !hi || *lo > *hi) return std::nullopt;
        return std::make_pair(*lo, *hi);
    }

    static RationalVector along(const RationalVector& q, const LatticeVector& m, const Rational& t) {
        RationalVector r = q;
        for (std::size_t i = 0; i < r.size(); ++i) r[i] += t * m[i];
        return r;
    }

    // Unique point of H_m^+ (resp. H_m^-) on the fiber through q.
    std::optional<RationalVector> plus_section(const RationalVector& q) const {
        auto f = fiber(q);
        if (!f) return std::nullopt;
        return along(q, m, f->second);
    }
    std::optional<RationalVector> minus_section(const RationalVector& q) const {
        auto f = fiber(q);
        if (!f) return std::nullopt;
        return along(q, m, f->first);
    }

    bool is_plus(std::size_t k) const { return std::find(plus_facets.begin(), plus_facets.end(), k) != plus_facets.end(); }
    bool is_minus(std::size_t k) const { return std::find(minus_facets.begin(), minus_facets.end(), k) != minus_facets.end(); }
    bool is_zero(std::size_t k) const { return std::find(zero_facets.begin(), zero_facets.end(), k) != zero_facets.end(); }
};

// Splits the facets of a complex by the sign of <label, m>. Written for the
// PrimalSide complex with m a vertex of Delta; the roles swap verbatim for
// the DualSide complex with a vertex n of Delta^vee.
inline HSplit h_split(const BoundaryComplex& cx, const LatticeVector& m) {
    HSplit s;
    s.m = m;
    s.complex = &cx;
    for (std::size_t k = 0; k < cx.facets.size(); ++k) {
        std::int64_t v = dot(cx.facets[k].label, m);
        if (v > 1)
            throw Error(Errc::PairingExceedsOne, "<" + format_vector(cx.facets[k].label) + "," + format_vector(m) + "> = " + std::to_string(v));
        if (v == 1) {
            s.plus_facets.push_back(k);
        } else if (v == 0) {
            s.zero_facets.push_back(k);
        } else {
            s.minus_facets.push_back(k);
            s.projection_jacobians[k] = -v;
        }
    }
    return s;
}

// Coordinates on M_R / R m in a lattice basis of the quotient: rows 1..D-1
// of a unimodular W with W m = e_1.
inline std::vector<RationalVector> quotient_coordinates(const Simplex& s, const LatticeVector& m) {
    IntMatrix w = unimodular_reducer(m);
    std::vector<RationalVector> out;
    for (const auto& p : s) {
        RationalVector c = mat_vec(w, p);
        out.emplace_back(c.begin() + 1, c.end());
    }
    return out;
}

// Lattice volume of the projection of a (D-1)-simplex to M_R / R m.
inline Rational quotient_measure(const Simplex& s, const LatticeVector& m) {
    auto q = quotient_coordinates(s, m);
    RationalMatrix mat;
    for (std::size_t i = 1; i < q.size(); ++i) mat.push_back(sub(q[i], q[0]));
    Rational det = abs(determinant(mat));
    for (std::size_t k = 2; k < m.size(); ++k) det /= static_cast<long>(k);
    return det;
}

// Z^D points on the boundary of k * conv(vertices).
inline long count_boundary_lattice_points(const std::vector<LatticeVector>& vertices, long k) {
    if (k < 1) throw Error(Errc::InvalidArgument, "dilation factor must be >= 1");
    auto pts = to_rational(vertices);
    auto facets = hull_facets(pts);
    const std::size_t d = vertices.at(0).size();
    LatticeVector lo(d), hi(d);
    for (std::size_t i = 0; i < d; ++i) {
        lo[i] = hi[i] = vertices[0][i] * k;
        for (const auto& v : vertices) {
            lo[i] = std::min(lo[i], v[i] * k);
            hi[i] = std::max(hi[i], v[i] * k);
        }
    }
    long count = 0;
    LatticeVector z = lo;
    while (true) {
        bool inside = true, on_boundary = false;
        for (const auto& h : facets) {
            Rational v = Rational(dot(z, h.normal)) - h.offset * k;
            if (v > 0) {
                inside = false;
                break;
            }
            if (v == 0) on_boundary = true;
        }
        if (inside && on_boundary) ++count;
        std::size_t i = 0;
        while (i < d && z[i] == hi[i]) {
            z[i] = lo[i];
            ++i;
        }
        if (i == d) break;
        ++z[i];
    }
    return count;
}

} // namespace rvp
