#pragma once

// Primal network simplex for the uncapacitated transportation problem
//   min sum cost_ij f_ij,  row sums = supply, column sums = demand,
// with an artificial root, block-search pricing and the strongly feasible
// leaving-arc rule. The spanning tree is rebuilt after every pivot, which
// is O(n + m) and plenty for desk-scale clouds.

#include "rvp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace rvp {

struct NetworkSimplexResult {
    std::vector<double> flow;      // n*m, row-major
    std::vector<double> potential; // node potentials: rows 0..n-1, columns n..n+m-1
    long pivots = 0;
    double artificial_flow = 0; // total flow left on artificial arcs
};

class TransportSimplex {
public:
    TransportSimplex(std::vector<double> supply, std::vector<double> demand, std::vector<double> cost)
        : n_(supply.size()), m_(demand.size()), supply_(std::move(supply)), demand_(std::move(demand)), cost_(std::move(cost)) {}

    NetworkSimplexResult solve(long max_pivots) {
        init();
        long pivots = 0;
        std::size_t in_arc;
        while (find_entering(in_arc)) {
            if (++pivots > max_pivots) throw NonConvergence(0.0, pivots);
            pivot(in_arc);
        }
        NetworkSimplexResult r;
        r.flow.assign(flow_.begin(), flow_.begin() + static_cast<long>(n_ * m_));
        r.potential.assign(pi_.begin(), pi_.begin() + static_cast<long>(n_ + m_));
        r.pivots = pivots;
        for (std::size_t e = n_ * m_; e < flow_.size(); ++e) r.artificial_flow += flow_[e];
        return r;
    }

private:
    enum State : std::int8_t { Tree = 0, Lower = 1 };

    std::size_t n_, m_;
    std::vector<double> supply_, demand_, cost_;
    std::size_t nodes_ = 0, root_ = 0, arcs_ = 0;
    std::vector<std::size_t> src_, dst_;
    std::vector<double> arc_cost_, flow_, pi_;
    std::vector<State> state_;
    std::vector<std::size_t> parent_, pred_, depth_;
    std::vector<bool> up_; // pred arc points from the node to its parent
    std::vector<std::size_t> tree_arcs_, tree_slot_;
    std::size_t block_ = 0, next_arc_ = 0;
    double cmax_ = 0;
    // BFS scratch
    std::vector<std::size_t> head_, next_, queue_;
    std::vector<bool> seen_;

    static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

    void init() {
        nodes_ = n_ + m_ + 1;
        root_ = n_ + m_;
        const std::size_t real = n_ * m_;
        arcs_ = real + n_ + m_;
        src_.resize(arcs_);
        dst_.resize(arcs_);
        arc_cost_.resize(arcs_);
        flow_.assign(arcs_, 0.0);
        state_.assign(arcs_, Lower);
        double cmax = 0;
        for (std::size_t e = 0; e < real; ++e) {
            src_[e] = e / m_;
            dst_[e] = n_ + e % m_;
            arc_cost_[e] = cost_[e];
            cmax = std::max(cmax, std::abs(cost_[e]));
        }
        cmax_ = cmax;
        const double art = (cmax + 1) * static_cast<double>(nodes_);
        tree_arcs_.clear();
        tree_slot_.assign(arcs_, npos);
        for (std::size_t k = 0; k < n_ + m_; ++k) {
            std::size_t e = real + k;
            if (k < n_) {
                src_[e] = k;
                dst_[e] = root_;
                flow_[e] = supply_[k];
            } else {
                src_[e] = root_;
                dst_[e] = k;
                flow_[e] = demand_[k - n_];
            }
            arc_cost_[e] = art;
            state_[e] = Tree;
            tree_slot_[e] = tree_arcs_.size();
            tree_arcs_.push_back(e);
        }
        block_ = std::max<std::size_t>(10, static_cast<std::size_t>(std::sqrt(static_cast<double>(arcs_))));
        next_arc_ = 0;
        parent_.resize(nodes_);
        pred_.resize(nodes_);
        depth_.resize(nodes_);
        up_.resize(nodes_);
        pi_.resize(nodes_);
        head_.resize(nodes_);
        next_.resize(2 * nodes_);
        queue_.resize(nodes_);
        seen_.resize(nodes_);
        rebuild_tree();
    }

    double reduced_cost(std::size_t e) const { return arc_cost_[e] + pi_[src_[e]] - pi_[dst_[e]]; }

    bool find_entering(std::size_t& in_arc) {
        double best = 0;
        const double tol = 1e-12 * (1 + cmax_);
        std::size_t cnt = block_;
        in_arc = npos;
        for (std::size_t k = 0; k < arcs_; ++k) {
            std::size_t e = (next_arc_ + k) % arcs_;
            if (state_[e] == Lower) {
                double c = reduced_cost(e);
                if (c < best - tol) {
                    best = c;
                    in_arc = e;
                }
            }
            if (--cnt == 0) {
                if (in_arc != npos) {
                    next_arc_ = (e + 1) % arcs_;
                    return true;
                }
                cnt = block_;
            }
        }
        if (in_arc != npos) {
            next_arc_ = (in_arc + 1) % arcs_;
            return true;
        }
        return false;
    }

    void pivot(std::size_t in_arc) {
        const std::size_t first = src_[in_arc], second = dst_[in_arc];
        // join = lowest common ancestor
        std::size_t u = first, v = second;
        while (u != v) {
            if (depth_[u] > depth_[v]) u = parent_[u];
            else v = parent_[v];
        }
        const std::size_t join = u;
        const double inf = std::numeric_limits<double>::infinity();
        double delta = inf;
        std::size_t leaving = npos;
        // Flow goes join -> ... -> first, across the entering arc, then
        // second -> ... -> join. Ties: strict on the first path, non-strict
        // on the second (keeps the tree strongly feasible).
        for (std::size_t w = first; w != join; w = parent_[w]) {
            if (up_[w]) {
                double d = flow_[pred_[w]];
                if (d < delta) {
                    delta = d;
                    leaving = pred_[w];
                }
            }
        }
        for (std::size_t w = second; w != join; w = parent_[w]) {
            if (!up_[w]) {
                double d = flow_[pred_[w]];
                if (d <= delta) {
                    delta = d;
                    leaving = pred_[w];
                }
            }
        }
        if (leaving == npos) throw Error(Errc::Infeasible, "unbounded transportation problem");
        if (delta > 0) {
            flow_[in_arc] += delta;
            for (std::size_t w = first; w != join; w = parent_[w]) flow_[pred_[w]] += up_[w] ? -delta : delta;
            for (std::size_t w = second; w != join; w = parent_[w]) flow_[pred_[w]] += up_[w] ? delta : -delta;
        }
        flow_[leaving] = 0;
        state_[leaving] = Lower;
        state_[in_arc] = Tree;
        std::size_t slot = tree_slot_[leaving];
        tree_arcs_[slot] = in_arc;
        tree_slot_[in_arc] = slot;
        tree_slot_[leaving] = npos;
        rebuild_tree();
    }

    void rebuild_tree() {
        std::fill(head_.begin(), head_.end(), npos);
        std::size_t k = 0;
        for (std::size_t t = 0; t < tree_arcs_.size(); ++t) {
            std::size_t e = tree_arcs_[t];
            // store arc index with the endpoint encoded by parity of k
            next_[k] = head_[src_[e]];
            head_[src_[e]] = k++;
            next_[k] = head_[dst_[e]];
            head_[dst_[e]] = k++;
        }
        std::fill(seen_.begin(), seen_.end(), false);
        std::size_t qh = 0, qt = 0;
        queue_[qt++] = root_;
        seen_[root_] = true;
        parent_[root_] = root_;
        depth_[root_] = 0;
        pi_[root_] = 0;
        while (qh < qt) {
            std::size_t x = queue_[qh++];
            for (std::size_t s = head_[x]; s != npos; s = next_[s]) {
                std::size_t e = tree_arcs_[s / 2];
                std::size_t y = (s % 2 == 0) ? dst_[e] : src_[e];
                if (seen_[y]) continue;
                seen_[y] = true;
                parent_[y] = x;
                pred_[y] = e;
                depth_[y] = depth_[x] + 1;
                up_[y] = (src_[e] == y);
                // zero reduced cost on tree arcs
                pi_[y] = up_[y] ? pi_[x] - arc_cost_[e] : pi_[x] + arc_cost_[e];
                queue_[qt++] = y;
            }
        }
    }
};

} // namespace rvp
