#pragma once

// Minimization of F(phi) = sum_A w phi + sum_B w phi^c over c-closed phi.
//
// F is the LP dual of   max sum pi_ij <x_i, p_j>   over couplings pi with
// marginals (w_A, w_B): for any coupling and c-closed phi,
// sum pi <x,p> <= sum pi (phi(x) + phi^c(p)) = F(phi), with equality on the
// optimum by complementary slackness.

#include "rvp/ctransform.hpp"
#include "rvp/transport.hpp"

#include <optional>
#include <random>
#include <string>

namespace rvp {

struct TransportPlan {
    struct Entry {
        std::size_t i, j;
        double mass;
    };
    std::vector<Entry> entries;
    double objective = 0; // sum pi_ij <x_i, p_j>
};

struct SolverConfig {
    std::string method = "oracle"; // oracle | entropic | both
    double tol = 1e-8;
    std::vector<double> epsilon_schedule; // empty: geometric default
    double epsilon_ratio = 5;
    std::optional<double> epsilon_floor;  // default min(0.25 h^2, tol / 10)
    double marginal_tol = 1e-10;          // final-stage column marginal L1 error
    long max_iterations = 5'000'000;      // Sinkhorn sweeps over all stages, or simplex pivots
    std::uint64_t seed = 1;
    double size_limit = 1e6; // max |A| * |B|
};

struct SolveResult {
    Potential phi, phi_star;
    std::optional<TransportPlan> plan;
    double duality_gap = 0;
    double functional_value = 0;
    std::string method;
    long iterations = 0;
    double marginal_residual = 0;
    std::vector<double> epsilons; // stages actually run (entropic)
    bool canonical = false;       // phi is the pointwise-largest optimal dual with max 0
    std::optional<double> raw_functional_value; // entropic: F of the projected Sinkhorn potential
    // filled by method "both"
    std::optional<double> entropic_value;
    std::optional<double> entropic_phi_diff;
};

inline double functional_value(const Potential& phi, const SampleCloud& a, const SampleCloud& b) {
    if (phi.side != a.side || a.side == b.side) throw Error(Errc::SideMismatch, "phi must live on the first cloud, clouds on opposite sides");
    auto g = c_transform(phi, a, b);
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a.points[i].weight * phi.values[i];
    for (std::size_t j = 0; j < b.size(); ++j) s += b.points[j].weight * g.values[j];
    return s;
}

inline SolveResult normalize(SolveResult r) {
    double top = r.phi.max();
    for (auto& v : r.phi.values) v -= top;
    for (auto& v : r.phi_star.values) v += top;
    return r;
}

inline std::vector<double> cost_matrix(const SampleCloud& a, const SampleCloud& b) {
    std::vector<double> c(a.size() * b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) c[i * b.size() + j] = dot(a.points[i].x, b.points[j].x);
    return c;
}

inline double plan_marginal_residual(const TransportPlan& plan, const SampleCloud& a, const SampleCloud& b) {
    std::vector<double> row(a.size(), 0.0), col(b.size(), 0.0);
    for (const auto& e : plan.entries) {
        row[e.i] += e.mass;
        col[e.j] += e.mass;
    }
    double r = 0;
    for (std::size_t i = 0; i < a.size(); ++i) r = std::max(r, std::abs(row[i] - a.points[i].weight));
    for (std::size_t j = 0; j < b.size(); ++j) r = std::max(r, std::abs(col[j] - b.points[j].weight));
    return r;
}

namespace detail {

inline void check_problem(const SampleCloud& a, const SampleCloud& b, const SolverConfig& cfg) {
    if (a.points.empty() || b.points.empty()) throw Error(Errc::EmptyCloud, "solver needs non-empty clouds");
    if (a.side == b.side) throw Error(Errc::SideMismatch, "clouds must be on opposite sides");
    if (static_cast<double>(a.size()) * static_cast<double>(b.size()) > cfg.size_limit)
        throw Error(Errc::SizeExceeded, std::to_string(a.size()) + " x " + std::to_string(b.size()) + " exceeds the size limit");
    for (const auto* c : {&a, &b}) {
        double s = 0;
        for (const auto& p : c->points) {
            if (!(p.weight > 0)) throw Error(Errc::Infeasible, "non-positive sample weight");
            s += p.weight;
        }
        if (std::abs(s - 1) > 1e-9) throw Error(Errc::Infeasible, "cloud weights sum to " + format_real(s) + ", not 1");
    }
}

// Fills phi_star, functional value and gap from phi (already c-closed).
inline void finish(SolveResult& r, const SampleCloud& a, const SampleCloud& b) {
    r.phi = project_to_class(r.phi, a, b);
    r.phi_star = c_transform(r.phi, a, b);
    r = normalize(std::move(r));
    double f = 0;
    for (std::size_t i = 0; i < a.size(); ++i) f += a.points[i].weight * r.phi.values[i];
    for (std::size_t j = 0; j < b.size(); ++j) f += b.points[j].weight * r.phi_star.values[j];
    r.functional_value = f;
    if (r.plan) {
        r.duality_gap = f - r.plan->objective;
        r.marginal_residual = plan_marginal_residual(*r.plan, a, b);
    }
}

// Pointwise-largest optimal dual with max = 0. Optimal u satisfy
// u_i - u_k <= C_ij - C_kj for every support pair (i,j) and every k; the
// largest solution below 0 is the shortest-path distance from a virtual
// source joined to every node by a zero edge. Dijkstra runs on weights made
// nonnegative with the feasible potential u0 (Johnson reweighting).
//
// Any pair carrying mass in some optimal coupling is tight for every optimal
// dual, so the result is the same for the simplex vertex support and for the
// (larger) support of an entropic coupling near the limit.
inline std::vector<double> canonical_dual(const std::vector<double>& cost, const std::vector<double>& flow,
                                          const std::vector<double>& u0, std::size_t n, std::size_t m, double support_tol) {
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<std::vector<std::size_t>> support(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j)
            if (flow[i * m + j] > support_tol) support[i].push_back(j);
    for (const auto& s : support)
        if (s.empty()) return u0;
    // w[k][i] = min over support (i,j) of C_ij - C_kj   (edge k -> i)
    std::vector<double> w(n * n, inf);
    for (std::size_t i = 0; i < n; ++i)
        for (auto j : support[i])
            for (std::size_t k = 0; k < n; ++k) {
                double v = cost[i * m + j] - cost[k * m + j];
                if (v < w[k * n + i]) w[k * n + i] = v;
            }
    double hs = *std::max_element(u0.begin(), u0.end());
    std::vector<double> dist(n);
    std::vector<bool> done(n, false);
    for (std::size_t i = 0; i < n; ++i) dist[i] = hs - u0[i];
    for (std::size_t it = 0; it < n; ++it) {
        std::size_t k = n;
        for (std::size_t i = 0; i < n; ++i)
            if (!done[i] && (k == n || dist[i] < dist[k])) k = i;
        done[k] = true;
        for (std::size_t i = 0; i < n; ++i) {
            if (done[i] || w[k * n + i] == inf) continue;
            double rw = std::max(0.0, w[k * n + i] + u0[k] - u0[i]);
            if (dist[k] + rw < dist[i]) dist[i] = dist[k] + rw;
        }
    }
    std::vector<double> u(n);
    for (std::size_t i = 0; i < n; ++i) u[i] = dist[i] - hs + u0[i];
    return u;
}

inline double log_sum_exp(const double* v, std::size_t n) {
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) mx = std::max(mx, v[i]);
    if (mx == -std::numeric_limits<double>::infinity()) return mx;
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) s += std::exp(v[i] - mx);
    return mx + std::log(s);
}

} // namespace detail

inline SolveResult solve_lp_oracle(const SampleCloud& a, const SampleCloud& b, const SolverConfig& cfg = {}) {
    detail::check_problem(a, b, cfg);
    const std::size_t n = a.size(), m = b.size();
    auto c = cost_matrix(a, b);
    std::vector<double> neg(c.size());
    for (std::size_t e = 0; e < c.size(); ++e) neg[e] = -c[e];
    std::vector<double> sa, sb;
    for (const auto& p : a.points) sa.push_back(p.weight);
    for (const auto& p : b.points) sb.push_back(p.weight);
    TransportSimplex ns(sa, sb, neg);
    auto res = ns.solve(cfg.max_iterations);
    if (res.artificial_flow > 1e-9) throw Error(Errc::Infeasible, "marginals cannot be matched");
    // rc_ij = -C_ij + pi_i - pi_{n+j} >= 0  =>  u_i = pi_i is dual feasible
    std::vector<double> u0(res.potential.begin(), res.potential.begin() + static_cast<long>(n));
    double wmin = std::min(*std::min_element(sa.begin(), sa.end()), *std::min_element(sb.begin(), sb.end()));
    auto u = detail::canonical_dual(c, res.flow, u0, n, m, 1e-9 * wmin);
    SolveResult r;
    r.method = "oracle";
    r.iterations = res.pivots;
    TransportPlan plan;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            double f = res.flow[i * m + j];
            if (f > 0) {
                plan.entries.push_back({i, j, f});
                plan.objective += f * c[i * m + j];
            }
        }
    r.plan = std::move(plan);
    r.phi = Potential{a.side, u, false};
    detail::finish(r, a, b);
    r.canonical = true;
    if (r.duality_gap > cfg.tol) {
        r.canonical = false;
        // a tiny spurious support entry can over-constrain the canonical
        // dual; the simplex potentials are always optimal
        r.phi = Potential{a.side, u0, false};
        detail::finish(r, a, b);
    }
    return r;
}

// Geometric schedule from the cost range down to the floor.
inline std::vector<double> default_epsilon_schedule(const SampleCloud& a, const SampleCloud& b, const SolverConfig& cfg) {
    auto c = cost_matrix(a, b);
    double range = *std::max_element(c.begin(), c.end()) - *std::min_element(c.begin(), c.end());
    double h = std::max(a.h, b.h);
    double floor = cfg.epsilon_floor ? *cfg.epsilon_floor : std::min(0.25 * h * h, cfg.tol / 10);
    if (!(floor > 0)) floor = cfg.tol / 10;
    std::vector<double> s;
    for (double e = std::max(range, floor); e > floor; e /= cfg.epsilon_ratio) s.push_back(e);
    s.push_back(floor);
    return s;
}

inline SolveResult solve_entropic(const SampleCloud& a, const SampleCloud& b, const SolverConfig& cfg = {}) {
    detail::check_problem(a, b, cfg);
    const std::size_t n = a.size(), m = b.size();
    auto sched = cfg.epsilon_schedule.empty() ? default_epsilon_schedule(a, b, cfg) : cfg.epsilon_schedule;
    for (std::size_t k = 0; k < sched.size(); ++k)
        if (!(sched[k] > 0) || (k && sched[k] >= sched[k - 1]))
            throw Error(Errc::InvalidArgument, "epsilon schedule must be positive and strictly decreasing");
    auto c = cost_matrix(a, b);
    std::vector<double> loga(n), logb(m);
    for (std::size_t i = 0; i < n; ++i) loga[i] = std::log(a.points[i].weight);
    for (std::size_t j = 0; j < m; ++j) logb[j] = std::log(b.points[j].weight);
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> init(-1, 1);
    std::vector<double> f(n), g(m, 0.0), buf(std::max(n, m));
    for (auto& v : f) v = init(rng);

    // pi_ij = a_i b_j exp((C_ij - f_i - g_j) / eps)
    auto update_g = [&](double eps) {
        double err = 0;
        for (std::size_t j = 0; j < m; ++j) {
            for (std::size_t i = 0; i < n; ++i) buf[i] = (c[i * m + j] - f[i]) / eps + loga[i];
            double gj = eps * detail::log_sum_exp(buf.data(), n);
            // column sum before the update is b_j exp((gj - g_j) / eps)
            err += b.points[j].weight * std::abs(std::expm1((gj - g[j]) / eps));
            g[j] = gj;
        }
        return err;
    };
    auto update_f = [&](double eps) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < m; ++j) buf[j] = (c[i * m + j] - g[j]) / eps + logb[j];
            f[i] = eps * detail::log_sum_exp(buf.data(), m);
        }
    };

    SolveResult r;
    r.method = "entropic";
    long iters = 0;
    double err = 0;
    for (std::size_t k = 0; k < sched.size(); ++k) {
        const double eps = sched[k];
        const bool last = k + 1 == sched.size();
        const double stage_tol = last ? cfg.marginal_tol : std::max(cfg.marginal_tol, 0.01 * eps);
        update_g(eps);
        update_f(eps);
        while (true) {
            err = update_g(eps);
            update_f(eps);
            ++iters;
            if (err <= stage_tol) break;
            if (iters >= cfg.max_iterations) throw NonConvergence(err, iters);
        }
        r.epsilons.push_back(eps);
    }
    r.iterations = iters;

    // Entropic coupling at the last stage, rounded onto the exact marginals.
    const double eps = sched.back();
    std::vector<double> pi(n * m);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j)
            pi[i * m + j] = std::exp((c[i * m + j] - f[i] - g[j]) / eps + loga[i] + logb[j]);
    {
        std::vector<double> row(n, 0.0), col(m, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < m; ++j) row[i] += pi[i * m + j];
        for (std::size_t i = 0; i < n; ++i) {
            double s = row[i] > 0 ? std::min(1.0, a.points[i].weight / row[i]) : 1.0;
            for (std::size_t j = 0; j < m; ++j) pi[i * m + j] *= s;
        }
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < m; ++j) col[j] += pi[i * m + j];
        for (std::size_t j = 0; j < m; ++j) {
            double s = col[j] > 0 ? std::min(1.0, b.points[j].weight / col[j]) : 1.0;
            for (std::size_t i = 0; i < n; ++i) pi[i * m + j] *= s;
        }
        std::fill(row.begin(), row.end(), 0.0);
        std::fill(col.begin(), col.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < m; ++j) {
                row[i] += pi[i * m + j];
                col[j] += pi[i * m + j];
            }
        double total = 0;
        for (std::size_t i = 0; i < n; ++i) {
            row[i] = a.points[i].weight - row[i];
            total += row[i];
        }
        for (std::size_t j = 0; j < m; ++j) col[j] = b.points[j].weight - col[j];
        if (total > 0)
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < m; ++j) pi[i * m + j] += row[i] * col[j] / total;
    }
    TransportPlan plan;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            double v = pi[i * m + j];
            if (v > 1e-15) {
                plan.entries.push_back({i, j, v});
                plan.objective += v * c[i * m + j];
            }
        }
    r.plan = std::move(plan);
    r.phi = Potential{a.side, f, false};
    detail::finish(r, a, b);
    r.raw_functional_value = r.functional_value;
    // The discrete minimizer is only unique up to a face of optimal duals
    // that Sinkhorn does not pin down at small eps; select the same
    // canonical point as the oracle, using the coupling's support.
    std::vector<double> coupling(n * m);
    double wmin = 1;
    for (const auto& p : a.points) wmin = std::min(wmin, p.weight);
    for (const auto& p : b.points) wmin = std::min(wmin, p.weight);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j)
            coupling[i * m + j] = std::exp((c[i * m + j] - f[i] - g[j]) / eps + loga[i] + logb[j]);
    SolveResult canon = r;
    canon.phi = Potential{a.side, detail::canonical_dual(c, coupling, r.phi.values, n, m, 1e-6 * wmin), false};
    detail::finish(canon, a, b);
    if (canon.functional_value <= r.functional_value + 1e-12) {
        canon.canonical = true;
        return canon;
    }
    return r;
}

inline SolveResult solve(const SampleCloud& a, const SampleCloud& b, const SolverConfig& cfg) {
    if (cfg.method == "oracle") return solve_lp_oracle(a, b, cfg);
    if (cfg.method == "entropic") return solve_entropic(a, b, cfg);
    if (cfg.method == "both") {
        auto r = solve_lp_oracle(a, b, cfg);
        auto e = solve_entropic(a, b, cfg);
        r.method = "both";
        r.entropic_value = e.functional_value;
        double d = 0;
        for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(e.phi.values[i] - r.phi.values[i]));
        r.entropic_phi_diff = d;
        return r;
    }
    throw Error(Errc::InvalidArgument, "unknown solver method '" + cfg.method + "'");
}

} // namespace rvp
