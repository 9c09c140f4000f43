#pragma once

// Structure of a computed minimizer: conjugate and gradient sets, good/bad
// classification, measure audits, Monge-Ampere residuals, Legendre
// round-trip and convexity diagnostics.

#include "rvp/solver.hpp"

#include <map>
#include <random>
#include <set>

namespace rvp {

// A weighted pair with its complexes, clouds and H splits at one depth.
struct Problem {
    WeightedPolytopePair pair;
    PairingReport pairing;
    SampleCloud a; // boundary of Delta_lambda^vee (DualSide)
    SampleCloud b; // boundary of Delta_mu (PrimalSide)
    std::vector<HSplit> splits_b; // per A facet m: split of the B complex by m
    std::vector<HSplit> splits_a; // per B facet n: split of the A complex by n
    IntMatrix facet_pairing;      // [A facet][B facet] = <m, n>
    Rational c0;                  // total B measure / total A measure
};

inline Problem make_problem(const WeightedPolytopePair& pair, int depth) {
    Problem p;
    p.pair = pair;
    p.pairing = pairing_condition(pair);
    p.a = triangulate_refine(dual_side_complex(pair), depth);
    p.b = triangulate_refine(primal_side_complex(pair), depth);
    for (const auto& f : p.a.complex->facets) p.splits_b.push_back(h_split(*p.b.complex, f.label));
    for (const auto& f : p.b.complex->facets) p.splits_a.push_back(h_split(*p.a.complex, f.label));
    for (const auto& fa : p.a.complex->facets) {
        LatticeVector row;
        for (const auto& fb : p.b.complex->facets) row.push_back(dot(fa.label, fb.label));
        p.facet_pairing.push_back(row);
    }
    p.c0 = p.b.complex->total_lattice_measure / p.a.complex->total_lattice_measure;
    return p;
}

struct AnalysisConfig {
    double delta_factor = 0.05;  // delta = factor * h_own * h_other
    double singular_factor = 2;  // Singular if gradient set diameter > factor * h_other
    int region_count = 50;
    std::uint64_t region_seed = 7;
    int cell_coarsening = 2;     // MA sub-cells: ancestors this many levels above the leaves
    int convexity_segments = 1000;
    double audit_slope = 1.0;    // rho(h) = audit_slope * h at a single depth
    bool ff_audit = true;
    bool rigidity_audit = true;
    bool convexity = true;
};

enum class Label { GoodTypeI, GoodTypeII, Bad, Singular };

inline const char* label_name(Label l) {
    switch (l) {
    case Label::GoodTypeI: return "good_I";
    case Label::GoodTypeII: return "good_II";
    case Label::Bad: return "bad";
    case Label::Singular: return "singular";
    }
    return "?";
}

struct ConjugacyRecord {
    std::size_t sample = 0;
    std::vector<std::size_t> conjugates; // samples of the other cloud within the band
    std::vector<std::size_t> gradients;  // conjugates on plus facets, or lifted representatives
    std::vector<std::size_t> anomalous;  // conjugates off the plus facets
    bool lifted = false;                 // gradients came from lifting anomalous conjugates
    bool zero_witness = false;           // anomalous conjugate on a facet with <m,n> = 0
    bool minus_witness = false;          // anomalous conjugate on a facet with <m,n> <= -1
    bool multi_gradient = false;
    std::size_t representative = 0;      // gradient of least defect
    double min_defect = 0;
};

// One side of the problem seen from its own cloud.
struct SideView {
    const SampleCloud* own;
    const SampleCloud* other;
    const Potential* f; // on own
    const Potential* g; // on other, g = f^c
    const std::vector<HSplit>* splits; // per own facet: split of the other complex
};

inline SideView view_a(const Problem& p, const SolveResult& r) { return {&p.a, &p.b, &r.phi, &r.phi_star, &p.splits_b}; }
inline SideView view_b(const Problem& p, const SolveResult& r) { return {&p.b, &p.a, &r.phi_star, &r.phi, &p.splits_a}; }

inline double default_delta(const SideView& v, const AnalysisConfig& cfg) { return cfg.delta_factor * v.own->h * v.other->h; }

namespace detail {

inline double defect(const SideView& v, std::size_t i, std::size_t j) {
    return v.f->values[i] + v.g->values[j] - dot(v.own->points[i].x, v.other->points[j].x);
}

// Nearest sample of the other cloud lying on a plus facet through the exact point q.
inline std::optional<std::size_t> nearest_on_plus(const SideView& v, const HSplit& split, const RationalVector& q) {
    const auto& cx = *v.other->complex;
    RealVector qx = to_real(q);
    std::optional<std::size_t> best;
    double bd = 0;
    auto scan = [&](std::size_t k) {
        for (std::size_t j = v.other->facet_begin[k]; j < v.other->facet_end[k]; ++j) {
            double d = distance(qx, v.other->points[j].x);
            if (!best || d < bd) {
                best = j;
                bd = d;
            }
        }
    };
    auto active = cx.active_facets(q);
    for (auto k : active)
        if (split.is_plus(k)) scan(k);
    if (!best)
        for (auto k : split.plus_facets) scan(k);
    return best;
}

inline double set_diameter(const SampleCloud& c, const std::vector<std::size_t>& ids) {
    double d = 0;
    for (std::size_t s = 0; s < ids.size(); ++s)
        for (std::size_t t = s + 1; t < ids.size(); ++t) d = std::max(d, distance(c.points[ids[s]].x, c.points[ids[t]].x));
    return d;
}

} // namespace detail

inline std::vector<ConjugacyRecord> conjugate_sets(const SideView& v, double delta, const AnalysisConfig& cfg = {}) {
    std::vector<ConjugacyRecord> out;
    const auto& own = *v.own;
    const auto& other = *v.other;
    const auto& ocx = *other.complex;
    for (std::size_t i = 0; i < own.size(); ++i) {
        ConjugacyRecord rec;
        rec.sample = i;
        const auto& m = own.points[i].facet_label;
        const auto& split = (*v.splits)[own.points[i].facet];
        double best = std::numeric_limits<double>::infinity();
        std::vector<double> dfs(other.size());
        for (std::size_t j = 0; j < other.size(); ++j) {
            dfs[j] = detail::defect(v, i, j);
            best = std::min(best, dfs[j]);
        }
        rec.min_defect = best;
        for (std::size_t j = 0; j < other.size(); ++j) {
            if (dfs[j] > delta) continue;
            rec.conjugates.push_back(j);
            std::int64_t pv = dot(m, ocx.facets[other.points[j].facet].label);
            if (pv == 1) {
                rec.gradients.push_back(j);
            } else {
                rec.anomalous.push_back(j);
                if (pv == 0) rec.zero_witness = true;
                else rec.minus_witness = true;
            }
        }
        if (rec.gradients.empty()) {
            // Lift each anomalous conjugate along +m to H_m^+; the lifted point
            // is a gradient of the extension with no larger defect.
            std::set<std::size_t> reps;
            for (auto j : rec.anomalous) {
                auto q = split.plus_section(other.points[j].position);
                if (!q) continue;
                if (auto s = detail::nearest_on_plus(v, split, *q)) reps.insert(*s);
            }
            rec.gradients.assign(reps.begin(), reps.end());
            rec.lifted = !rec.gradients.empty();
        }
        if (!rec.gradients.empty()) {
            rec.representative = rec.gradients[0];
            double bd = std::numeric_limits<double>::infinity();
            for (auto j : rec.gradients)
                if (dfs[j] < bd) {
                    bd = dfs[j];
                    rec.representative = j;
                }
        }
        rec.multi_gradient = detail::set_diameter(other, rec.gradients) > cfg.singular_factor * other.h;
        out.push_back(std::move(rec));
    }
    return out;
}

inline Label classify_record(const ConjugacyRecord& r) {
    if (r.zero_witness) return Label::Bad;
    if (r.multi_gradient) return Label::Singular;
    if (r.minus_witness) return Label::GoodTypeII;
    return Label::GoodTypeI;
}

struct Classification {
    std::vector<Label> labels;
    double bad_mass = 0, good_mass = 0, singular_mass = 0;
    double good_type1_mass = 0, good_type2_mass = 0;
    std::size_t lifted_count = 0;
    double min_defect = 0;
};

inline Classification classify(const std::vector<ConjugacyRecord>& records, const SampleCloud& own) {
    Classification c;
    c.min_defect = std::numeric_limits<double>::infinity();
    for (const auto& r : records) {
        Label l = classify_record(r);
        c.labels.push_back(l);
        double w = own.points[r.sample].weight;
        switch (l) {
        case Label::Bad: c.bad_mass += w; break;
        case Label::Singular: c.singular_mass += w; break;
        case Label::GoodTypeI: c.good_mass += w; c.good_type1_mass += w; break;
        case Label::GoodTypeII: c.good_mass += w; c.good_type2_mass += w; break;
        }
        if (r.lifted) ++c.lifted_count;
        c.min_defect = std::min(c.min_defect, r.min_defect);
    }
    return c;
}

// ---- measure audits --------------------------------------------------------

struct Region {
    std::string kind; // ball, facet, boundary, good, bad, good_facet
    std::string name;
    std::vector<std::size_t> samples;
};

struct AuditRow {
    std::string kind, name;
    double mass = 0, conj_image = 0, grad_image = 0;
    double violation = 0; // amount by which the row's inequality / identity fails
    bool flagged = false;
};

struct AuditTable {
    std::vector<AuditRow> rows;
    double h = 0;
    double rho = 0;                  // audit_slope * h
    double max_universal = 0;        // variational inequality and gradient decrease
    double max_ball_universal = 0;   // same, restricted to the random balls
    double max_good_identity = 0;    // | |grad(E)| - |E| | over good regions
    double max_bad_grad = 0;         // |grad(E)| over bad regions
    double max_additivity = 0;       // sum over cells minus union, per facet
};

inline double image_mass(const SampleCloud& other, const std::vector<ConjugacyRecord>& recs, const std::vector<std::size_t>& region, bool gradients) {
    std::vector<char> hit(other.size(), 0);
    for (auto i : region)
        for (auto j : gradients ? recs[i].gradients : recs[i].conjugates) hit[j] = 1;
    double s = 0;
    for (std::size_t j = 0; j < other.size(); ++j)
        if (hit[j]) s += other.points[j].weight;
    return s;
}

inline double region_mass(const SampleCloud& own, const std::vector<std::size_t>& region) {
    double s = 0;
    for (auto i : region) s += own.points[i].weight;
    return s;
}

// Default regions: random facet-interior balls, each facet, the whole
// boundary, and the good / bad sets.
inline std::vector<Region> default_regions(const SampleCloud& own, const Classification& cls, const AnalysisConfig& cfg) {
    std::vector<Region> out;
    std::mt19937_64 rng(cfg.region_seed);
    const auto& cx = *own.complex;
    std::vector<std::size_t> live;
    for (std::size_t k = 0; k < cx.facets.size(); ++k)
        if (own.facet_end[k] > own.facet_begin[k]) live.push_back(k);
    for (int r = 0; r < cfg.region_count; ++r) {
        std::size_t k = live[rng() % live.size()];
        std::size_t lo = own.facet_begin[k], hi = own.facet_end[k];
        std::size_t c = lo + rng() % (hi - lo);
        double fd = 0;
        for (const auto& a : cx.facets[k].vertex_list)
            for (const auto& b : cx.facets[k].vertex_list) fd = std::max(fd, distance(to_real(a), to_real(b)));
        std::uniform_real_distribution<double> rad(own.h, std::max(own.h, 0.3 * fd));
        double radius = rad(rng);
        Region reg{"ball", "ball" + std::to_string(r) + "@" + format_label(cx.facets[k].label), {}};
        for (std::size_t i = lo; i < hi; ++i)
            if (distance(own.points[i].x, own.points[c].x) <= radius) reg.samples.push_back(i);
        out.push_back(std::move(reg));
    }
    Region all{"boundary", "all", {}};
    for (std::size_t k = 0; k < cx.facets.size(); ++k) {
        Region reg{"facet", format_label(cx.facets[k].label), {}};
        Region good{"good_facet", format_label(cx.facets[k].label), {}};
        for (std::size_t i = own.facet_begin[k]; i < own.facet_end[k]; ++i) {
            reg.samples.push_back(i);
            if (cls.labels[i] == Label::GoodTypeI || cls.labels[i] == Label::GoodTypeII) good.samples.push_back(i);
        }
        if (reg.samples.empty()) continue;
        all.samples.insert(all.samples.end(), reg.samples.begin(), reg.samples.end());
        out.push_back(std::move(reg));
        if (!good.samples.empty()) out.push_back(std::move(good));
    }
    out.push_back(all);
    Region good{"good", "good", {}}, bad{"bad", "bad", {}};
    for (std::size_t i = 0; i < own.size(); ++i) {
        if (cls.labels[i] == Label::GoodTypeI || cls.labels[i] == Label::GoodTypeII) good.samples.push_back(i);
        if (cls.labels[i] == Label::Bad) bad.samples.push_back(i);
    }
    if (!good.samples.empty()) out.push_back(good);
    if (!bad.samples.empty()) out.push_back(bad);
    return out;
}

inline AuditTable inequality_audit(const SideView& v, const std::vector<ConjugacyRecord>& recs, const std::vector<Region>& regions,
                                   const AnalysisConfig& cfg = {}) {
    AuditTable t;
    t.h = std::max(v.own->h, v.other->h);
    t.rho = cfg.audit_slope * t.h;
    for (const auto& reg : regions) {
        AuditRow row{reg.kind, reg.name, region_mass(*v.own, reg.samples), 0, 0, 0, false};
        row.conj_image = image_mass(*v.other, recs, reg.samples, false);
        row.grad_image = image_mass(*v.other, recs, reg.samples, true);
        double universal = std::max({0.0, row.mass - row.conj_image, row.grad_image - row.mass});
        row.violation = universal;
        t.max_universal = std::max(t.max_universal, universal);
        if (reg.kind == "ball") t.max_ball_universal = std::max(t.max_ball_universal, universal);
        if (reg.kind == "good" || reg.kind == "good_facet") {
            double id = std::abs(row.grad_image - row.mass);
            row.violation = std::max(row.violation, id);
            t.max_good_identity = std::max(t.max_good_identity, id);
        }
        if (reg.kind == "bad") {
            row.violation = std::max(row.violation, row.grad_image);
            t.max_bad_grad = std::max(t.max_bad_grad, row.grad_image);
        }
        row.flagged = row.violation > t.rho;
        t.rows.push_back(row);
    }
    // countable additivity on the partition of each facet into cells
    const auto& own = *v.own;
    int level = std::max(0, own.depth - cfg.cell_coarsening);
    for (std::size_t k = 0; k < own.complex->facets.size(); ++k) {
        if (own.facet_end[k] == own.facet_begin[k]) continue;
        std::map<std::pair<std::size_t, std::size_t>, std::vector<std::size_t>> cells;
        std::vector<std::size_t> whole;
        for (std::size_t i = own.facet_begin[k]; i < own.facet_end[k]; ++i) {
            cells[{own.points[i].fan_simplex, own.cell_of(i, level)}].push_back(i);
            whole.push_back(i);
        }
        double sum = 0;
        for (const auto& [key, ids] : cells) sum += image_mass(*v.other, recs, ids, true);
        double un = image_mass(*v.other, recs, whole, true);
        AuditRow row{"additivity", format_label(own.complex->facets[k].label), region_mass(own, whole), 0, un, sum - un, false};
        row.flagged = row.violation > t.rho;
        t.max_additivity = std::max(t.max_additivity, row.violation);
        t.rows.push_back(row);
    }
    return t;
}

// ---- Monge-Ampere residual --------------------------------------------------

struct MAResidual {
    LatticeVector label;
    Side side = Side::Dual;
    bool applicable = true;
    Rational constant;         // C0 on the dual side, 1/C0 on the primal side
    Rational area;             // lattice measure of the facet
    double image_lattice = 0;  // gradient-image lattice measure of the full facet
    double full_residual = 0;  // relative, full facet as a single cell
    double max_cell_residual = 0, mean_cell_residual = 0;
    std::size_t cells = 0;
};

// Gradient image of Int(facet) against constant * lattice area, in lattice
// units of the quotient M / Z m; plus facets project with Jacobian 1.
inline MAResidual ma_residual(const SideView& v, const std::vector<ConjugacyRecord>& recs, std::size_t facet, const Rational& constant,
                              bool applicable, const AnalysisConfig& cfg = {}) {
    const auto& own = *v.own;
    const auto& ocx = *v.other->complex;
    const auto& f = own.complex->facets.at(facet);
    if (!is_primitive(f.label)) throw Error(Errc::NonPrimitiveM, "facet label " + format_vector(f.label) + " is not primitive");
    const auto& split = (*v.splits)[facet];
    MAResidual r;
    r.label = f.label;
    r.side = own.side;
    r.applicable = applicable;
    r.constant = constant;
    r.area = f.lattice_area;
    const double total_own = to_double(own.complex->total_lattice_measure);
    const double total_other = to_double(ocx.total_lattice_measure);
    const double c = to_double(constant);
    auto lattice_image = [&](const std::vector<std::size_t>& ids) {
        std::vector<char> hit(v.other->size(), 0);
        for (auto i : ids)
            for (auto j : recs[i].gradients) hit[j] = 1;
        double s = 0;
        for (std::size_t j = 0; j < v.other->size(); ++j) {
            if (!hit[j]) continue;
            std::size_t k = v.other->points[j].facet;
            double jac = split.is_plus(k) ? 1.0 : static_cast<double>(split.projection_jacobians.count(k) ? split.projection_jacobians.at(k) : 0);
            s += v.other->points[j].weight * total_other * jac;
        }
        return s;
    };
    std::vector<std::size_t> whole;
    std::map<std::pair<std::size_t, std::size_t>, std::vector<std::size_t>> cells;
    int level = std::max(0, own.depth - cfg.cell_coarsening);
    for (std::size_t i = own.facet_begin[facet]; i < own.facet_end[facet]; ++i) {
        whole.push_back(i);
        cells[{own.points[i].fan_simplex, own.cell_of(i, level)}].push_back(i);
    }
    if (whole.empty()) return r;
    r.image_lattice = lattice_image(whole);
    double target = c * region_mass(own, whole) * total_own;
    r.full_residual = std::abs(r.image_lattice - target) / target;
    double sum = 0;
    for (const auto& [key, ids] : cells) {
        double tg = c * region_mass(own, ids) * total_own;
        double res = std::abs(lattice_image(ids) - tg) / tg;
        r.max_cell_residual = std::max(r.max_cell_residual, res);
        sum += res;
    }
    r.cells = cells.size();
    r.mean_cell_residual = sum / static_cast<double>(cells.size());
    return r;
}

// ---- Legendre round trip ------------------------------------------------------

struct RoundtripStats {
    double good_mass = 0;       // dual side good mass (denominator)
    double within_mass = 0;     // Type I, non-singular, round trip within 2 h
    double fraction = 0;
    double max_distance = 0;
    double good_mass_dual = 0;  // |G| on the primal side
    double good_gap = 0;        // | |G| - |G^vee| |
    std::size_t plan_pairs = 0, plan_pairs_conjugate = 0;
};

inline RoundtripStats duality_roundtrip(const Problem& p, const SolveResult& r, const std::vector<ConjugacyRecord>& ra, const Classification& ca,
                                        const std::vector<ConjugacyRecord>& rb, const Classification& cb) {
    RoundtripStats s;
    s.good_mass = ca.good_mass;
    s.good_mass_dual = cb.good_mass;
    s.good_gap = std::abs(ca.good_mass - cb.good_mass);
    for (std::size_t i = 0; i < ra.size(); ++i) {
        if (ca.labels[i] != Label::GoodTypeI || ra[i].gradients.empty()) continue;
        std::size_t j = ra[i].representative;
        if (rb[j].gradients.empty()) continue;
        std::size_t back = rb[j].representative;
        double d = distance(p.a.points[i].x, p.a.points[back].x);
        s.max_distance = std::max(s.max_distance, d);
        if (d <= 2 * p.a.h) s.within_mass += p.a.points[i].weight;
    }
    s.fraction = s.good_mass > 0 ? s.within_mass / s.good_mass : 1.0;
    if (r.plan) {
        for (const auto& e : r.plan->entries) {
            if (e.mass <= 1e-12) continue;
            ++s.plan_pairs;
            bool fwd = std::find(ra[e.i].conjugates.begin(), ra[e.i].conjugates.end(), e.j) != ra[e.i].conjugates.end();
            bool bwd = std::find(rb[e.j].conjugates.begin(), rb[e.j].conjugates.end(), e.i) != rb[e.j].conjugates.end();
            if (fwd && bwd) ++s.plan_pairs_conjugate;
        }
    }
    return s;
}

// ---- convexity on open faces ---------------------------------------------------

struct ConvexityReport {
    LatticeVector label;
    double max_midpoint_defect = 0;
    std::size_t segments = 0;
    std::size_t containment_checks = 0, containment_violations = 0;
    std::size_t subgradient_checks = 0, subgradient_violations = 0;
};

inline ConvexityReport convexity_check(const SideView& v, const std::vector<ConjugacyRecord>& recs, std::size_t facet, const AnalysisConfig& cfg = {}) {
    const auto& own = *v.own;
    const auto& f = own.complex->facets.at(facet);
    ConvexityReport rep;
    rep.label = f.label;
    if (f.dimension < own.dim - 1) return rep;
    Potential closed = *v.f;
    closed.c_closed = true;
    AmbientExtension ext(closed, own, *v.other);
    std::mt19937_64 rng(cfg.region_seed + facet);
    std::uniform_real_distribution<double> u(0, 1);
    std::vector<RealVector> verts;
    for (const auto& q : f.vertex_list) verts.push_back(to_real(q));
    auto random_point = [&]() {
        RealVector y(static_cast<std::size_t>(own.dim), 0.0);
        std::vector<double> w;
        double tot = 0;
        for (std::size_t k = 0; k < verts.size(); ++k) {
            w.push_back(-std::log(1 - u(rng)));
            tot += w.back();
        }
        for (std::size_t k = 0; k < verts.size(); ++k)
            for (std::size_t c = 0; c < y.size(); ++c) y[c] += verts[k][c] * w[k] / tot;
        return y;
    };
    std::vector<RealVector> tangents;
    for (const auto& t : f.tangent_lattice_basis) tangents.push_back(to_real(t));
    // bounds of <t, p> over the other polytope's vertices
    std::vector<std::pair<double, double>> range;
    for (const auto& t : tangents) {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (const auto& q : v.other->complex->vertices) {
            double val = dot(t, to_real(q));
            lo = std::min(lo, val);
            hi = std::max(hi, val);
        }
        range.push_back({lo, hi});
    }
    const double step = 0.5 * own.h;
    for (int s = 0; s < cfg.convexity_segments; ++s) {
        RealVector a = random_point(), b = random_point(), mid(a.size());
        for (std::size_t c = 0; c < a.size(); ++c) mid[c] = 0.5 * (a[c] + b[c]);
        rep.max_midpoint_defect = std::max(rep.max_midpoint_defect, ext(mid) - 0.5 * (ext(a) + ext(b)));
        ++rep.segments;
        for (std::size_t k = 0; k < tangents.size(); ++k) {
            RealVector y2 = a;
            for (std::size_t c = 0; c < y2.size(); ++c) y2[c] += step * tangents[k][c];
            double dq = (ext(y2) - ext(a)) / step;
            ++rep.containment_checks;
            if (dq < range[k].first - 1e-9 || dq > range[k].second + 1e-9) ++rep.containment_violations;
        }
    }
    // a delta-gradient p at x satisfies, for every step s,
    //   (phi(x+st)-phi(x))/s >= <t,p> - d/s   and   (phi(x)-phi(x-st))/s <= <t,p> + d/s
    for (std::size_t i = own.facet_begin[facet]; i < own.facet_end[facet]; ++i) {
        const auto& rec = recs[i];
        if (rec.gradients.empty() || rec.lifted) continue;
        const auto& x = own.points[i].x;
        const auto& pg = v.other->points[rec.representative].x;
        double d = v.f->values[i] + v.g->values[rec.representative] - dot(x, pg);
        double fx = ext(x);
        for (const auto& t : tangents) {
            RealVector xp = x, xm = x;
            for (std::size_t c = 0; c < x.size(); ++c) {
                xp[c] += step * t[c];
                xm[c] -= step * t[c];
            }
            double fwd = (ext(xp) - fx) / step, bwd = (fx - ext(xm)) / step, tp = dot(t, pg);
            ++rep.subgradient_checks;
            if (fwd < tp - d / step - 1e-9 || bwd > tp + d / step + 1e-9) ++rep.subgradient_violations;
        }
    }
    return rep;
}

// ---- anomalous rigidity and the F / F' sets -------------------------------------

struct RigidityReport {
    std::size_t lifts = 0;            // anomalous conjugates lifted along +m
    std::size_t eta_violations = 0;   // eta < 0 would contradict phi* growth bound
    std::size_t checks = 0, violations = 0;
    std::size_t on_facet = 0;         // conjugates of the lifted point lying exactly on facet m
};

// For x on facet m with anomalous conjugate p', the lift p = p' + s m has
// phi*(p) <= phi*(p') - s lambda(m); every y conjugate to p within the band
// then satisfies  <y, m> + lambda(m) >= -(d(y,p) + eta) / s.
inline RigidityReport rigidity_audit(const SideView& v, const std::vector<ConjugacyRecord>& recs, double delta, std::size_t max_lifts = 400) {
    RigidityReport rep;
    const auto& own = *v.own;
    const auto& other = *v.other;
    Potential gc = *v.g;
    gc.c_closed = true;
    AmbientExtension g_ext(gc, other, own); // extension of f^c = g to the other ambient space
    for (const auto& rec : recs) {
        if (rep.lifts >= max_lifts) break;
        const auto& xp = own.points[rec.sample];
        const auto& split = (*v.splits)[xp.facet];
        const Rational lam = own.complex->weights[xp.facet];
        for (auto j : rec.anomalous) {
            if (rep.lifts >= max_lifts) break;
            auto fib = split.fiber(other.points[j].position);
            if (!fib || fib->second <= 0) continue;
            const double s = to_double(fib->second);
            RealVector p = to_real(HSplit::along(other.points[j].position, split.m, fib->second));
            ++rep.lifts;
            double gp = g_ext(p);
            double eta = v.g->values[j] - s * to_double(lam) - gp;
            if (eta < -1e-12) ++rep.eta_violations;
            for (std::size_t i = 0; i < own.size(); ++i) {
                double d = v.f->values[i] + gp - dot(own.points[i].x, p);
                if (d > delta) continue;
                ++rep.checks;
                double lhs = dot(own.points[i].x, xp.facet_label) + to_double(lam);
                if (lhs < -(d + std::max(eta, 0.0)) / s - 1e-12) ++rep.violations;
                if (own.points[i].facet == xp.facet) ++rep.on_facet;
            }
        }
    }
    return rep;
}

struct FFRow {
    LatticeVector label;
    double e_mass = 0;       // GoodTypeII samples of the facet
    double fprime_mass = 0;  // their conjugates on H_m^-
    double fprime_jacobian = 0; // same, each weighted by |<n,m>| (projected measure)
    double f_mass = 0;       // plus-section images of F' (represented by samples)
};

inline std::vector<FFRow> ff_audit(const SideView& v, const std::vector<ConjugacyRecord>& recs, const Classification& cls) {
    std::vector<FFRow> out;
    const auto& own = *v.own;
    const auto& other = *v.other;
    for (std::size_t k = 0; k < own.complex->facets.size(); ++k) {
        const auto& split = (*v.splits)[k];
        FFRow row;
        row.label = own.complex->facets[k].label;
        std::set<std::size_t> fprime, fset;
        for (std::size_t i = own.facet_begin[k]; i < own.facet_end[k]; ++i) {
            if (cls.labels[i] != Label::GoodTypeII) continue;
            row.e_mass += own.points[i].weight;
            for (auto j : recs[i].anomalous)
                if (split.is_minus(other.points[j].facet)) fprime.insert(j);
        }
        if (row.e_mass == 0) continue;
        for (auto j : fprime) {
            row.fprime_mass += other.points[j].weight;
            row.fprime_jacobian += other.points[j].weight * static_cast<double>(split.projection_jacobians.at(other.points[j].facet));
            if (auto q = split.plus_section(other.points[j].position))
                if (auto s = detail::nearest_on_plus(v, split, *q)) fset.insert(*s);
        }
        for (auto j : fset) row.f_mass += other.points[j].weight;
        out.push_back(row);
    }
    return out;
}

// ---- full report ------------------------------------------------------------------

struct SideReport {
    double delta = 0;
    std::vector<ConjugacyRecord> records;
    Classification cls;
    AuditTable audit;
    std::vector<MAResidual> ma;
    std::vector<ConvexityReport> convexity;
    RigidityReport rigidity;
    std::vector<FFRow> ff;
};

struct AnalysisReport {
    std::string instance;
    int depth = 0;
    double h_a = 0, h_b = 0;
    bool pairing_holds = true;
    Rational c0;
    Rational deficit_bound; // sum_m max(0, |Delta_m^vee| - |H_m^+|), normalized
    SideReport dual, primal;
    RoundtripStats roundtrip;
    double functional_value = 0;
    double duality_gap = 0;

    double bad_mass() const { return dual.cls.bad_mass; }
    double good_mass() const { return dual.cls.good_mass; }
    double singular_mass() const { return dual.cls.singular_mass; }
};

// Lower bound on the bad mass from exact measures: good points of Delta_m^vee
// have their gradients in H_m^+, and the gradient map preserves measure there.
inline Rational exact_deficit_bound(const Problem& p) {
    Rational total = 0;
    const auto& ca = *p.a.complex;
    const auto& cb = *p.b.complex;
    for (std::size_t k = 0; k < ca.facets.size(); ++k) {
        Rational plus = 0;
        for (auto l : p.splits_b[k].plus_facets) plus += cb.facets[l].lattice_area;
        Rational d = ca.facets[k].lattice_area / ca.total_lattice_measure - plus / cb.total_lattice_measure;
        if (d > 0) total += d;
    }
    return total;
}

inline SideReport analyze_side(const Problem& p, const SideView& v, const Rational& constant, const AnalysisConfig& cfg) {
    SideReport s;
    s.delta = default_delta(v, cfg);
    s.records = conjugate_sets(v, s.delta, cfg);
    s.cls = classify(s.records, *v.own);
    s.audit = inequality_audit(v, s.records, default_regions(*v.own, s.cls, cfg), cfg);
    for (std::size_t k = 0; k < v.own->complex->facets.size(); ++k) {
        if (v.own->facet_end[k] == v.own->facet_begin[k]) continue;
        s.ma.push_back(ma_residual(v, s.records, k, constant, p.pairing.holds, cfg));
        if (cfg.convexity) s.convexity.push_back(convexity_check(v, s.records, k, cfg));
    }
    if (cfg.rigidity_audit) s.rigidity = rigidity_audit(v, s.records, s.delta);
    if (cfg.ff_audit) s.ff = ff_audit(v, s.records, s.cls);
    return s;
}

inline AnalysisReport analyze(const Problem& p, const SolveResult& r, const AnalysisConfig& cfg = {}) {
    AnalysisReport rep;
    rep.instance = p.pair.name;
    rep.depth = p.a.depth;
    rep.h_a = p.a.h;
    rep.h_b = p.b.h;
    rep.pairing_holds = p.pairing.holds;
    rep.c0 = p.c0;
    rep.deficit_bound = exact_deficit_bound(p);
    rep.dual = analyze_side(p, view_a(p, r), p.c0, cfg);
    rep.primal = analyze_side(p, view_b(p, r), 1 / p.c0, cfg);
    rep.roundtrip = duality_roundtrip(p, r, rep.dual.records, rep.dual.cls, rep.primal.records, rep.primal.cls);
    rep.functional_value = r.functional_value;
    rep.duality_gap = r.duality_gap;
    return rep;
}

// ---- rendering ----------------------------------------------------------------------

inline std::string classification_csv(const Problem& p, const AnalysisReport& rep) {
    std::string out = "side,index,facet_label,weight,label,conjugates,gradients,anomalous,lifted,representative\n";
    auto emit = [&](const SampleCloud& c, const SideReport& s) {
        for (std::size_t i = 0; i < c.size(); ++i) {
            const auto& r = s.records[i];
            out += std::string(side_name(c.side)) + "," + std::to_string(i) + "," + format_label(c.points[i].facet_label) + "," +
                   format_real(c.points[i].weight) + "," + label_name(s.cls.labels[i]) + "," + std::to_string(r.conjugates.size()) + "," +
                   std::to_string(r.gradients.size()) + "," + std::to_string(r.anomalous.size()) + "," + (r.lifted ? "1" : "0") + "," +
                   std::to_string(r.representative) + "\n";
        }
    };
    emit(p.a, rep.dual);
    emit(p.b, rep.primal);
    return out;
}

inline std::string audit_csv(const AnalysisReport& rep) {
    std::string out = "side,kind,region,mass,conj_image,grad_image,violation,rho,flagged\n";
    auto emit = [&](const char* side, const AuditTable& t) {
        for (const auto& r : t.rows)
            out += std::string(side) + "," + r.kind + "," + r.name + "," + format_real(r.mass) + "," + format_real(r.conj_image) + "," +
                   format_real(r.grad_image) + "," + format_real(r.violation) + "," + format_real(t.rho) + "," + (r.flagged ? "1" : "0") + "\n";
    };
    emit("dual", rep.dual.audit);
    emit("primal", rep.primal.audit);
    return out;
}

inline std::string residual_csv(const AnalysisReport& rep) {
    std::string out = "side,facet_label,applicable,constant,area,image_lattice,full_residual,max_cell_residual,mean_cell_residual,cells\n";
    for (const auto* s : {&rep.dual, &rep.primal})
        for (const auto& m : s->ma)
            out += std::string(side_name(m.side)) + "," + format_label(m.label) + "," + (m.applicable ? "1" : "0") + "," + format_rational(m.constant) + "," +
                   format_rational(m.area) + "," + format_real(m.image_lattice) + "," + format_real(m.full_residual) + "," +
                   format_real(m.max_cell_residual) + "," + format_real(m.mean_cell_residual) + "," + std::to_string(m.cells) + "\n";
    return out;
}

inline double max_full_residual(const SideReport& s) {
    double r = 0;
    for (const auto& m : s.ma) r = std::max(r, m.full_residual);
    return r;
}

inline std::string report_text(const AnalysisReport& rep) {
    std::ostringstream os;
    auto side_block = [&](const char* title, const SideReport& s) {
        os << "[" << title << "]\n";
        os << "delta = " << format_real(s.delta) << "\n";
        os << "bad_mass = " << format_real(s.cls.bad_mass) << "\n";
        os << "good_mass = " << format_real(s.cls.good_mass) << " (type I " << format_real(s.cls.good_type1_mass) << ", type II "
           << format_real(s.cls.good_type2_mass) << ")\n";
        os << "singular_mass = " << format_real(s.cls.singular_mass) << "\n";
        os << "lifted_gradients = " << s.cls.lifted_count << "\n";
        os << "min_conjugacy_defect = " << format_real(s.cls.min_defect) << "\n";
        os << "audit.rho = " << format_real(s.audit.rho) << "\n";
        os << "audit.max_universal = " << format_real(s.audit.max_universal) << "\n";
        os << "audit.max_ball_universal = " << format_real(s.audit.max_ball_universal) << "\n";
        os << "audit.max_good_identity = " << format_real(s.audit.max_good_identity) << "\n";
        os << "audit.max_bad_grad = " << format_real(s.audit.max_bad_grad) << "\n";
        os << "audit.max_additivity = " << format_real(s.audit.max_additivity) << "\n";
        os << "ma.max_full_residual = " << format_real(max_full_residual(s)) << "\n";
        double conv = 0;
        std::size_t cv = 0, sv = 0;
        for (const auto& c : s.convexity) {
            conv = std::max(conv, c.max_midpoint_defect);
            cv += c.containment_violations;
            sv += c.subgradient_violations;
        }
        os << "convexity.max_midpoint_defect = " << format_real(conv) << "\n";
        os << "convexity.containment_violations = " << cv << "\n";
        os << "convexity.subgradient_violations = " << sv << "\n";
        os << "rigidity.lifts = " << s.rigidity.lifts << ", checks = " << s.rigidity.checks << ", violations = " << s.rigidity.violations
           << ", on_facet = " << s.rigidity.on_facet << ", eta_violations = " << s.rigidity.eta_violations << "\n";
        for (const auto& f : s.ff)
            os << "ff[" << format_label(f.label) << "] |E| = " << format_real(f.e_mass) << ", |F'| = " << format_real(f.fprime_mass)
               << ", |F'|_jac = " << format_real(f.fprime_jacobian) << ", |F| = " << format_real(f.f_mass) << "\n";
    };
    os << "instance = " << rep.instance << "\n";
    os << "depth = " << rep.depth << "\n";
    os << "h_dual = " << format_real(rep.h_a) << "\nh_primal = " << format_real(rep.h_b) << "\n";
    os << "pairing_condition = " << (rep.pairing_holds ? "holds" : "violated") << "\n";
    os << "C0 = " << format_rational(rep.c0) << "\n";
    os << "functional_value = " << format_real(rep.functional_value) << "\n";
    os << "duality_gap = " << format_real(rep.duality_gap) << "\n";
    os << "exact_bad_mass_lower_bound = " << format_rational(rep.deficit_bound) << "\n";
    side_block("dual side", rep.dual);
    side_block("primal side", rep.primal);
    os << "[roundtrip]\n";
    os << "fraction_within_2h = " << format_real(rep.roundtrip.fraction) << "\n";
    os << "max_distance = " << format_real(rep.roundtrip.max_distance) << "\n";
    os << "good_mass_gap = " << format_real(rep.roundtrip.good_gap) << "\n";
    os << "plan_pairs = " << rep.roundtrip.plan_pairs << ", conjugate_both_ways = " << rep.roundtrip.plan_pairs_conjugate << "\n";
    return os.str();
}

} // namespace rvp
