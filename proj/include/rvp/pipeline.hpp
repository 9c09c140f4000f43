#pragma once

// Batch driver: geometry -> mesh -> solve -> analyze over a list of depths,
// with every artifact written as text / CSV.

#include "rvp/analysis.hpp"
#include "rvp/catalog.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

namespace rvp {

struct RunConfig {
    std::string instance; // bundled name or instance file path
    std::vector<int> depths{1, 2, 3};
    SolverConfig solver;
    AnalysisConfig analysis;
    double audit_slope_max = 1.0; // rho(h) = C h fails the run when C exceeds this
    std::string out = "out";
    bool write_artifacts = true;
};

inline void validate_config(const RunConfig& c) {
    if (c.instance.empty()) throw Error(Errc::InvalidArgument, "no instance given");
    if (c.depths.empty()) throw Error(Errc::InvalidArgument, "depths must be nonempty");
    for (std::size_t i = 0; i < c.depths.size(); ++i) {
        if (c.depths[i] < 0) throw Error(Errc::InvalidArgument, "depths must be >= 0");
        if (i && c.depths[i] <= c.depths[i - 1]) throw Error(Errc::InvalidArgument, "depths must be strictly increasing");
    }
}

namespace detail {

inline std::vector<int> parse_int_list(const std::string& text, const std::string& source, int line, const std::string& field) {
    std::string s = trim(text);
    if (!s.empty() && s.front() == '[' && s.back() == ']') s = s.substr(1, s.size() - 2);
    std::vector<int> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        try {
            std::size_t pos = 0;
            out.push_back(std::stoi(item, &pos));
            if (pos != item.size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw ParseError(source, line, field, "expected a list of integers");
        }
    }
    return out;
}

inline double parse_double(const std::string& text, const std::string& source, int line, const std::string& field) {
    try {
        std::size_t pos = 0;
        double v = std::stod(text, &pos);
        if (pos != text.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ParseError(source, line, field, "expected a number");
    }
}

inline bool parse_bool(const std::string& text, const std::string& source, int line, const std::string& field) {
    if (text == "true" || text == "1" || text == "on") return true;
    if (text == "false" || text == "0" || text == "off") return false;
    throw ParseError(source, line, field, "expected true or false");
}

} // namespace detail

// Config files use the instance-file syntax. Keys:
//   instance, depths, out, method, tol, seed, epsilon_floor, epsilon_ratio,
//   delta_factor, singular_factor, region_count, region_seed, audit_slope_max,
//   ff_audit, rigidity_audit, convexity
inline RunConfig parse_run_config(const std::string& text, const std::string& source = "<config>") {
    RunConfig c;
    for (const auto& kv : detail::read_key_values(text, source)) {
        auto num = [&] { return detail::parse_double(kv.value, source, kv.line, kv.key); };
        auto flag = [&] { return detail::parse_bool(kv.value, source, kv.line, kv.key); };
        if (kv.key == "instance") c.instance = kv.value;
        else if (kv.key == "depths") c.depths = detail::parse_int_list(kv.value, source, kv.line, kv.key);
        else if (kv.key == "out") c.out = kv.value;
        else if (kv.key == "method") {
            if (kv.value != "oracle" && kv.value != "entropic" && kv.value != "both")
                throw ParseError(source, kv.line, kv.key, "expected oracle, entropic or both");
            c.solver.method = kv.value;
        } else if (kv.key == "tol") c.solver.tol = num();
        else if (kv.key == "seed") c.solver.seed = static_cast<std::uint64_t>(num());
        else if (kv.key == "epsilon_floor") c.solver.epsilon_floor = num();
        else if (kv.key == "epsilon_ratio") c.solver.epsilon_ratio = num();
        else if (kv.key == "delta_factor") c.analysis.delta_factor = num();
        else if (kv.key == "singular_factor") c.analysis.singular_factor = num();
        else if (kv.key == "region_count") c.analysis.region_count = static_cast<int>(num());
        else if (kv.key == "region_seed") c.analysis.region_seed = static_cast<std::uint64_t>(num());
        else if (kv.key == "audit_slope_max") c.audit_slope_max = num();
        else if (kv.key == "ff_audit") c.analysis.ff_audit = flag();
        else if (kv.key == "rigidity_audit") c.analysis.rigidity_audit = flag();
        else if (kv.key == "convexity") c.analysis.convexity = flag();
        else throw ParseError(source, kv.line, kv.key, "unknown key");
    }
    return c;
}

inline std::string complex_summary(const WeightedPolytopePair& pair) {
    std::ostringstream os;
    os << "instance = " << pair.name << "\ndimension = " << pair.dim << "\n";
    auto pr = pairing_condition(pair);
    os << "pairing_condition = " << (pr.holds ? "holds" : "violated") << "\n";
    for (const auto& [m, n] : pr.violations) os << "zero_pairing = " << format_vector(m) << " " << format_vector(n) << "\n";
    for (const auto& cx : {dual_side_complex(pair), primal_side_complex(pair)}) {
        os << "[" << side_name(cx.side) << " side]\n";
        os << "vertices = " << cx.vertices.size() << "\n";
        for (const auto& v : cx.vertices) os << "  " << format_vector(v) << "\n";
        os << "facets = " << cx.facets.size() << "\n";
        for (std::size_t k = 0; k < cx.facets.size(); ++k) {
            const auto& f = cx.facets[k];
            os << "  label " << format_vector(f.label) << " weight " << format_rational(cx.weights[k]) << " vertices " << f.vertex_list.size()
               << " lattice_measure " << format_rational(f.lattice_area) << "\n";
        }
        os << "total_lattice_measure = " << format_rational(cx.total_lattice_measure) << "\n";
    }
    return os.str();
}

inline std::string plan_to_csv(const TransportPlan& plan) {
    std::string s = "i,j,mass\n";
    for (const auto& e : plan.entries) s += std::to_string(e.i) + "," + std::to_string(e.j) + "," + format_real(e.mass) + "\n";
    return s;
}

struct DepthSummary {
    int depth = 0;
    double h_a = 0, h_b = 0;
    std::size_t n_a = 0, n_b = 0;
    double functional_value = 0, duality_gap = 0;
    double bad_mass = 0, good_mass = 0, singular_mass = 0;
    double max_universal = 0, max_good_identity = 0, max_bad_grad = 0;
    double ma_dual = 0, ma_primal = 0;
    double roundtrip_fraction = 0, good_gap = 0;
    double min_defect = 0;
    double max_midpoint_defect = 0;
    std::size_t exact_violations = 0; // containment, subgradient, rigidity
};

struct RunOutcome {
    int exit_code = 0;
    std::vector<AnalysisReport> reports;
    std::vector<DepthSummary> table;
    double fitted_slope = 0; // C in rho(h) = C h for the universal inequalities
    std::vector<std::string> warnings, violations;
};

inline DepthSummary summarize(const AnalysisReport& r, std::size_t n_a, std::size_t n_b) {
    DepthSummary s;
    s.depth = r.depth;
    s.h_a = r.h_a;
    s.h_b = r.h_b;
    s.n_a = n_a;
    s.n_b = n_b;
    s.functional_value = r.functional_value;
    s.duality_gap = r.duality_gap;
    s.bad_mass = r.bad_mass();
    s.good_mass = r.good_mass();
    s.singular_mass = r.singular_mass();
    s.max_universal = std::max(r.dual.audit.max_universal, r.primal.audit.max_universal);
    s.max_good_identity = r.dual.audit.max_good_identity;
    s.max_bad_grad = r.dual.audit.max_bad_grad;
    s.ma_dual = max_full_residual(r.dual);
    s.ma_primal = max_full_residual(r.primal);
    s.roundtrip_fraction = r.roundtrip.fraction;
    s.good_gap = r.roundtrip.good_gap;
    s.min_defect = std::min(r.dual.cls.min_defect, r.primal.cls.min_defect);
    for (const auto* side : {&r.dual, &r.primal}) {
        for (const auto& c : side->convexity) {
            s.max_midpoint_defect = std::max(s.max_midpoint_defect, c.max_midpoint_defect);
            s.exact_violations += c.containment_violations + c.subgradient_violations;
        }
        s.exact_violations += side->rigidity.violations + side->rigidity.eta_violations;
    }
    return s;
}

inline std::string convergence_csv(const std::vector<DepthSummary>& t) {
    std::string s = "depth,h_dual,h_primal,n_dual,n_primal,functional_value,duality_gap,bad_mass,good_mass,singular_mass,"
                    "max_universal,max_good_identity,max_bad_grad,ma_residual_dual,ma_residual_primal,roundtrip_fraction,good_mass_gap\n";
    for (const auto& r : t)
        s += std::to_string(r.depth) + "," + format_real(r.h_a) + "," + format_real(r.h_b) + "," + std::to_string(r.n_a) + "," +
             std::to_string(r.n_b) + "," + format_real(r.functional_value) + "," + format_real(r.duality_gap) + "," + format_real(r.bad_mass) +
             "," + format_real(r.good_mass) + "," + format_real(r.singular_mass) + "," + format_real(r.max_universal) + "," +
             format_real(r.max_good_identity) + "," + format_real(r.max_bad_grad) + "," + format_real(r.ma_dual) + "," +
             format_real(r.ma_primal) + "," + format_real(r.roundtrip_fraction) + "," + format_real(r.good_gap) + "\n";
    return s;
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw Error(Errc::Io, "cannot write " + p.string());
    f << text;
}

// Exit 0 on success, 2 when a guarantee that holds for every minimizer is
// violated beyond tolerance. Errors are thrown.
inline RunOutcome run(const RunConfig& cfg, std::ostream& log = std::cerr) {
    validate_config(cfg);
    RunOutcome out;
    auto pair = resolve_instance(cfg.instance);
    validate_pair(pair);
    namespace fs = std::filesystem;
    fs::path dir(cfg.out);
    if (cfg.write_artifacts) {
        fs::create_directories(dir);
        write_file(dir / "complex.txt", complex_summary(pair));
    }
    {
        auto pr = pairing_condition(pair);
        if (!pr.holds) {
            std::string w = "warning: pairing condition violated (" + std::to_string(pr.violations.size()) + " zero pairings); bad set may be nonempty";
            out.warnings.push_back(w);
            log << w << "\n";
        }
    }
    for (int depth : cfg.depths) {
        Problem p = make_problem(pair, depth);
        SolveResult r = solve(p.a, p.b, cfg.solver);
        AnalysisReport rep = analyze(p, r, cfg.analysis);
        auto row = summarize(rep, p.a.size(), p.b.size());
        const std::string tag = "_d" + std::to_string(depth);
        if (cfg.write_artifacts) {
            write_file(dir / ("cloud_dual" + tag + ".csv"), cloud_to_csv(p.a));
            write_file(dir / ("cloud_primal" + tag + ".csv"), cloud_to_csv(p.b));
            write_file(dir / ("phi" + tag + ".csv"), potential_to_csv(r.phi));
            write_file(dir / ("phi_star" + tag + ".csv"), potential_to_csv(r.phi_star));
            if (r.plan) write_file(dir / ("plan" + tag + ".csv"), plan_to_csv(*r.plan));
            write_file(dir / ("report" + tag + ".txt"), report_text(rep));
            write_file(dir / ("classification" + tag + ".csv"), classification_csv(p, rep));
            write_file(dir / ("audit" + tag + ".csv"), audit_csv(rep));
            write_file(dir / ("residuals" + tag + ".csv"), residual_csv(rep));
        }
        auto fail = [&](const std::string& what) { out.violations.push_back("depth " + std::to_string(depth) + ": " + what); };
        if (row.min_defect < -1e-12) fail("negative conjugacy defect " + format_real(row.min_defect));
        for (const auto* s : {&rep.dual, &rep.primal}) {
            double total = s->cls.bad_mass + s->cls.good_mass + s->cls.singular_mass;
            if (std::abs(total - 1) > 1e-9) fail("masses sum to " + format_real(total));
            if (p.pairing.holds && s->cls.bad_mass > 0) fail("bad samples without zero pairings");
        }
        if (row.max_midpoint_defect > 1e-10) fail("midpoint convexity defect " + format_real(row.max_midpoint_defect));
        if (row.exact_violations > 0) fail(std::to_string(row.exact_violations) + " exact gradient / rigidity violations");
        double h = std::max(row.h_a, row.h_b);
        if (h > 0) out.fitted_slope = std::max(out.fitted_slope, row.max_universal / h);
        log << "depth " << depth << ": |A| = " << p.a.size() << ", |B| = " << p.b.size() << ", F = " << format_real(r.functional_value)
            << ", bad_mass = " << format_real(row.bad_mass) << "\n";
        out.table.push_back(row);
        out.reports.push_back(std::move(rep));
    }
    if (out.fitted_slope > cfg.audit_slope_max)
        out.violations.push_back("variational inequality / gradient decrease slope " + format_real(out.fitted_slope) + " exceeds " +
                                 format_real(cfg.audit_slope_max));
    std::ostringstream summary;
    summary << "instance = " << pair.name << "\n";
    summary << "rho_slope = " << format_real(out.fitted_slope) << "\n";
    summary << "rho_slope_max = " << format_real(cfg.audit_slope_max) << "\n";
    for (std::size_t i = 1; i < out.table.size(); ++i)
        summary << "universal_decreasing_d" << out.table[i].depth << " = " << (out.table[i].max_universal <= out.table[i - 1].max_universal ? "yes" : "no")
                << "\n";
    for (const auto& w : out.warnings) summary << w << "\n";
    for (const auto& v : out.violations) summary << "violation: " << v << "\n";
    out.exit_code = out.violations.empty() ? 0 : 2;
    summary << "exit_status = " << out.exit_code << "\n";
    if (cfg.write_artifacts) {
        write_file(dir / "convergence.csv", convergence_csv(out.table));
        write_file(dir / "summary.txt", summary.str());
    }
    for (const auto& v : out.violations) log << "violation: " << v << "\n";
    return out;
}

// ---- degree claim ---------------------------------------------------------------

struct DegreeRow {
    Side side = Side::Dual;
    long k = 0;
    long count = 0;
    Rational ratio;  // count / k^(D-1)
    Rational target; // total lattice measure of the boundary
    Rational degree; // (D-1)! * target
};

inline std::vector<DegreeRow> degree_check(const WeightedPolytopePair& pair, long k_max) {
    if (k_max < 1) throw Error(Errc::InvalidArgument, "k_max must be >= 1");
    std::vector<DegreeRow> out;
    for (const auto& cx : {dual_side_complex(pair), primal_side_complex(pair)}) {
        std::vector<LatticeVector> verts;
        for (const auto& v : cx.vertices) {
            LatticeVector z;
            for (const auto& c : v) {
                if (denominator(c) != 1) throw Error(Errc::InvalidArgument, "degree check needs an integral polytope");
                z.push_back(static_cast<std::int64_t>(numerator(c)));
            }
            verts.push_back(z);
        }
        for (long k = 1; k <= k_max; ++k) {
            DegreeRow r;
            r.side = cx.side;
            r.k = k;
            r.count = count_boundary_lattice_points(verts, k);
            BigInt pw = 1;
            for (int i = 0; i + 1 < pair.dim; ++i) pw *= k;
            r.ratio = Rational(r.count) / Rational(pw);
            r.target = cx.total_lattice_measure;
            r.degree = r.target;
            for (int i = 2; i < pair.dim; ++i) r.degree *= i;
            out.push_back(r);
        }
    }
    return out;
}

inline std::string degree_csv(const std::vector<DegreeRow>& rows) {
    std::string s = "side,k,boundary_count,ratio,target,degree\n";
    for (const auto& r : rows)
        s += std::string(side_name(r.side)) + "," + std::to_string(r.k) + "," + std::to_string(r.count) + "," + format_rational(r.ratio) + "," +
             format_rational(r.target) + "," + format_rational(r.degree) + "\n";
    return s;
}

} // namespace rvp
