#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "atlas/common.hpp"
#include "atlas/distance_matrix.hpp"
#include "atlas/textproc.hpp"
#include "atlas/umap.hpp"

namespace atlas {

// Discrete probability distribution over points in R^d.
struct WeightedPointPattern {
    std::size_t dim = 0;
    std::vector<double> coords;   // n x dim, row-major
    std::vector<double> masses;   // n, positive, sums to 1 within 1e-12
    std::string owner;

    std::size_t size() const { return masses.size(); }
    const double* point(std::size_t i) const { return coords.data() + i * dim; }

    void validate() const {
        if (coords.size() != masses.size() * dim)
            throw error("point pattern: coordinate/mass size mismatch");
        double total = 0.0;
        for (double m : masses) {
            if (!(m > 0.0)) throw error("point pattern: non-positive mass");
            total += m;
        }
        if (std::abs(total - 1.0) > 1e-12)
            throw error("point pattern: masses sum to " + std::to_string(total));
    }
};

struct TransportPlan {
    struct Flow {
        std::uint32_t source;
        std::uint32_t target;
        double mass;
    };
    std::vector<Flow> flows;
    double cost = 0.0;  // total p-th power cost
};

struct OtParams {
    int p = 2;                      // order; Euclidean cost when 2, L1 when 1
    double sinkhorn_lambda = 10.0;  // regularization sharpness; larger = closer to exact, slower
    std::size_t max_iter = 20000;   // Sinkhorn iteration cap
    double tol = 1e-6;              // Sinkhorn marginal tolerance (L1)
    std::size_t threads = 1;        // pairwise fill workers
    std::size_t memory_budget_bytes = std::size_t(1) << 30;  // cost matrix cap per solve

    void validate() const {
        if (p != 1 && p != 2) throw error("ot: p must be 1 or 2");
        if (!(sinkhorn_lambda > 0.0)) throw error("ot: sinkhorn_lambda must be positive");
    }
};

// One point per profile term present in the embedding; masses are counts
// renormalized over the retained terms. Terms outside the embedding are
// dropped silently (the truncation already happened upstream).
inline WeightedPointPattern make_point_pattern(const AuthorProfile& profile,
                                               const TermEmbedding& emb,
                                               const Vocabulary& vocab_truncated) {
    WeightedPointPattern pat;
    pat.dim = emb.dim;
    pat.owner = profile.author_id;
    double total = 0.0;
    for (const auto& [term, count] : profile.term_counts) {
        auto it = vocab_truncated.rank_of.find(term);
        if (it == vocab_truncated.rank_of.end()) continue;
        const double* pt = emb.point_by_id(it->second);
        if (!pt) continue;
        for (std::size_t c = 0; c < emb.dim; ++c) pat.coords.push_back(pt[c]);
        pat.masses.push_back(double(count));
        total += double(count);
    }
    if (pat.masses.empty())
        throw error("author '" + profile.author_id + "' has no terms in the embedding");
    for (auto& m : pat.masses) m /= total;
    // absorb the normalization residue so the masses sum to 1 exactly enough
    double sum = 0.0;
    for (double m : pat.masses) sum += m;
    pat.masses.back() += 1.0 - sum;
    pat.validate();
    return pat;
}

namespace ot_detail {

using CostFn = std::function<double(std::size_t, std::size_t)>;

// Exact solver for the balanced transportation problem:
//   min sum c_ij x_ij   s.t.  sum_j x_ij = a_i,  sum_i x_ij = b_j,  x >= 0.
// Primal transportation simplex on the bipartite spanning-tree basis.
// North-west-corner initial basis; entering arc by cyclic block search
// (most negative reduced cost within a block), falling back to Bland's
// rule after a run of degenerate pivots so cycling is impossible.
class TransportationSimplex {
public:
    TransportationSimplex(std::vector<double> supply, std::vector<double> demand,
                          CostFn cost)
        : a_(std::move(supply)), b_(std::move(demand)), cost_(std::move(cost)),
          m_(a_.size()), n_(b_.size()) {
        if (m_ == 0 || n_ == 0) throw error("transport: empty marginal");
        double sa = 0.0, sb = 0.0;
        for (double v : a_) sa += v;
        for (double v : b_) sb += v;
        if (std::abs(sa - sb) > 1e-9 * std::max(sa, sb))
            throw error("transport: unbalanced marginals");
        b_[n_ - 1] += sa - sb;  // fold rounding residue into the last demand
    }

    TransportPlan solve() {
        init_northwest_corner();
        build_adjacency();

        const std::size_t n_arcs = m_ * n_;
        const std::size_t block =
            std::max<std::size_t>(64, std::size_t(std::sqrt(double(n_arcs))));
        const std::size_t bland_threshold = 2 * (m_ + n_);
        // generous cap; Bland's rule guarantees finite termination long before
        const std::uint64_t iter_cap = std::uint64_t(200) * n_arcs + 100000;

        std::size_t scan_pos = 0;
        std::size_t degenerate_streak = 0;
        double max_cost_seen = 1.0;
        std::uint64_t iters = 0;

        while (true) {
            if (++iters > iter_cap) throw error("transport: iteration cap exceeded");
            compute_duals();

            const double eps = 1e-11 * max_cost_seen;
            std::size_t entering = n_arcs;
            if (degenerate_streak < bland_threshold) {
                // cyclic block search
                double best = -eps;
                std::size_t seen = 0, pos = scan_pos;
                while (seen < n_arcs) {
                    const std::size_t stop = std::min(n_arcs - seen, block);
                    for (std::size_t t = 0; t < stop; ++t) {
                        const std::size_t i = pos / n_, j = pos % n_;
                        const double c = cost_(i, j);
                        if (c > max_cost_seen) max_cost_seen = c;
                        const double r = c - u_[i] - v_[j];
                        if (r < best) {
                            best = r;
                            entering = pos;
                        }
                        if (++pos == n_arcs) pos = 0;
                    }
                    seen += stop;
                    if (entering != n_arcs) break;
                }
                scan_pos = pos;
            } else {
                // Bland: lowest-index arc with negative reduced cost
                for (std::size_t pos = 0; pos < n_arcs; ++pos) {
                    const std::size_t i = pos / n_, j = pos % n_;
                    const double r = cost_(i, j) - u_[i] - v_[j];
                    if (r < -eps) {
                        entering = pos;
                        break;
                    }
                }
            }
            if (entering == n_arcs) break;  // optimal

            const double theta = pivot(entering / n_, entering % n_);
            degenerate_streak = theta > 0.0 ? 0 : degenerate_streak + 1;
        }

        TransportPlan plan;
        for (std::size_t k = 0; k < arc_row_.size(); ++k) {
            if (arc_flow_[k] > 0.0) {
                plan.flows.push_back({std::uint32_t(arc_row_[k]), std::uint32_t(arc_col_[k]),
                                      arc_flow_[k]});
                plan.cost += arc_flow_[k] * cost_(arc_row_[k], arc_col_[k]);
            }
        }
        return plan;
    }

private:
    std::vector<double> a_, b_;
    CostFn cost_;
    std::size_t m_, n_;

    // basis arcs, always exactly m+n-1 of them
    std::vector<std::size_t> arc_row_, arc_col_;
    std::vector<double> arc_flow_;
    std::vector<std::vector<std::int32_t>> adj_;  // node -> arc ids; cols are m_+j
    std::vector<double> u_, v_;

    // scratch for dual computation / cycle walks
    std::vector<std::int32_t> parent_node_, parent_arc_, bfs_order_;
    std::vector<std::int32_t> depth_;

    void init_northwest_corner() {
        std::vector<double> ra = a_, rb = b_;
        arc_row_.reserve(m_ + n_ - 1);
        std::size_t i = 0, j = 0;
        while (true) {
            const double f = std::min(ra[i], rb[j]);
            arc_row_.push_back(i);
            arc_col_.push_back(j);
            arc_flow_.push_back(f);
            ra[i] -= f;
            rb[j] -= f;
            if (i == m_ - 1 && j == n_ - 1) break;
            if (i == m_ - 1) ++j;
            else if (j == n_ - 1) ++i;
            else if (ra[i] <= rb[j]) ++i;
            else ++j;
        }
    }

    void build_adjacency() {
        adj_.assign(m_ + n_, {});
        for (std::size_t k = 0; k < arc_row_.size(); ++k) {
            adj_[arc_row_[k]].push_back(std::int32_t(k));
            adj_[m_ + arc_col_[k]].push_back(std::int32_t(k));
        }
        u_.assign(m_, 0.0);
        v_.assign(n_, 0.0);
        parent_node_.assign(m_ + n_, -1);
        parent_arc_.assign(m_ + n_, -1);
        depth_.assign(m_ + n_, 0);
        bfs_order_.reserve(m_ + n_);
    }

    void compute_duals() {
        const std::size_t nodes = m_ + n_;
        std::fill(parent_node_.begin(), parent_node_.end(), -1);
        bfs_order_.clear();
        bfs_order_.push_back(0);  // root = row 0, u_0 = 0
        parent_node_[0] = 0;
        depth_[0] = 0;
        u_[0] = 0.0;
        for (std::size_t head = 0; head < bfs_order_.size(); ++head) {
            const std::int32_t x = bfs_order_[head];
            for (std::int32_t k : adj_[x]) {
                const std::int32_t row = std::int32_t(arc_row_[k]);
                const std::int32_t col = std::int32_t(m_ + arc_col_[k]);
                const std::int32_t y = (x == row) ? col : row;
                if (parent_node_[y] != -1) continue;
                parent_node_[y] = x;
                parent_arc_[y] = k;
                depth_[y] = depth_[x] + 1;
                const double c = cost_(arc_row_[k], arc_col_[k]);
                if (y == col) v_[arc_col_[k]] = c - u_[arc_row_[k]];
                else u_[arc_row_[k]] = c - v_[arc_col_[k]];
                bfs_order_.push_back(y);
            }
        }
        if (bfs_order_.size() != nodes) throw error("transport: basis lost connectivity");
    }

    // Enter arc (ei, ej); return the flow shifted around the cycle.
    double pivot(std::size_t ei, std::size_t ej) {
        std::int32_t x = std::int32_t(ei);
        std::int32_t y = std::int32_t(m_ + ej);

        // collect the tree path between the entering arc's endpoints
        thread_local std::vector<std::int32_t> path_up_x, path_up_y;
        path_up_x.clear();
        path_up_y.clear();
        while (depth_[x] > depth_[y]) { path_up_x.push_back(parent_arc_[x]); x = parent_node_[x]; }
        while (depth_[y] > depth_[x]) { path_up_y.push_back(parent_arc_[y]); y = parent_node_[y]; }
        while (x != y) {
            path_up_x.push_back(parent_arc_[x]);
            x = parent_node_[x];
            path_up_y.push_back(parent_arc_[y]);
            y = parent_node_[y];
        }

        // Cycle orientation: entering arc goes row->col ('+'); walking the
        // tree path back from col ej to row ei, an arc crossed col->row is
        // '-' (its flow drops), row->col is '+'.
        thread_local std::vector<std::int32_t> cycle_arcs;
        thread_local std::vector<std::int8_t> cycle_sign;
        cycle_arcs.clear();
        cycle_sign.clear();
        std::int32_t node = std::int32_t(m_ + ej);
        for (std::int32_t k : path_up_y) {
            const bool at_col = node >= std::int32_t(m_);
            cycle_arcs.push_back(k);
            cycle_sign.push_back(at_col ? -1 : +1);
            node = parent_node_[node];
        }
        node = std::int32_t(ei);
        // arcs from ei's side are traversed toward ei, i.e. reversed
        for (std::size_t t = path_up_x.size(); t-- > 0;) {
            // reconstruct traversal direction: walking down from LCA to ei
            const std::int32_t k = path_up_x[t];
            // the child endpoint of k on ei's branch
            // if the child is a row node, the arc is crossed col->row: '-'
            // child = the deeper endpoint
            const std::int32_t row = std::int32_t(arc_row_[k]);
            const std::int32_t col = std::int32_t(m_ + arc_col_[k]);
            const std::int32_t child = depth_[row] > depth_[col] ? row : col;
            cycle_arcs.push_back(k);
            cycle_sign.push_back(child < std::int32_t(m_) ? -1 : +1);
        }

        double theta = std::numeric_limits<double>::infinity();
        std::int32_t leaving = -1;
        std::size_t leaving_key = 0;
        for (std::size_t t = 0; t < cycle_arcs.size(); ++t) {
            if (cycle_sign[t] != -1) continue;
            const std::int32_t k = cycle_arcs[t];
            const std::size_t key = arc_row_[k] * n_ + arc_col_[k];
            if (arc_flow_[k] < theta || (arc_flow_[k] == theta && key < leaving_key)) {
                theta = arc_flow_[k];
                leaving = k;
                leaving_key = key;
            }
        }
        if (leaving < 0) throw error("transport: no leaving arc (unbounded cycle)");

        for (std::size_t t = 0; t < cycle_arcs.size(); ++t)
            arc_flow_[cycle_arcs[t]] += cycle_sign[t] > 0 ? theta : -theta;

        // replace the leaving arc with the entering one, reusing its slot
        detach(leaving);
        arc_row_[leaving] = ei;
        arc_col_[leaving] = ej;
        arc_flow_[leaving] = theta;
        adj_[ei].push_back(leaving);
        adj_[m_ + ej].push_back(leaving);
        return theta;
    }

    void detach(std::int32_t k) {
        auto scrub = [&](std::vector<std::int32_t>& list) {
            list.erase(std::find(list.begin(), list.end(), k));
        };
        scrub(adj_[arc_row_[k]]);
        scrub(adj_[m_ + arc_col_[k]]);
    }
};

inline double ground_cost(const double* x, const double* y, std::size_t dim, int p) {
    double d2 = 0.0;
    for (std::size_t c = 0; c < dim; ++c) d2 += (x[c] - y[c]) * (x[c] - y[c]);
    return p == 2 ? d2 : std::sqrt(d2);
}

// total order on patterns; wasserstein() solves the (min, max) orientation
// so that the distance is symmetric by construction
inline int pattern_compare(const WeightedPointPattern& a, const WeightedPointPattern& b) {
    if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
    for (std::size_t i = 0; i < a.masses.size(); ++i)
        if (a.masses[i] != b.masses[i]) return a.masses[i] < b.masses[i] ? -1 : 1;
    for (std::size_t i = 0; i < a.coords.size(); ++i)
        if (a.coords[i] != b.coords[i]) return a.coords[i] < b.coords[i] ? -1 : 1;
    return 0;
}

}  // namespace ot_detail

struct WassersteinResult {
    double distance = 0.0;
    TransportPlan plan;
};

// Exact p-Wasserstein distance between two weighted point patterns, solved
// as a balanced transportation problem. Returns cost^(1/p) and the optimal
// plan. The cost matrix is materialized when it fits the memory budget and
// recomputed on the fly otherwise.
inline WassersteinResult wasserstein(const WeightedPointPattern& a,
                                     const WeightedPointPattern& b,
                                     const OtParams& params = {}) {
    params.validate();
    if (a.dim != b.dim) throw error("wasserstein: dimension mismatch");
    a.validate();
    b.validate();

    const bool swapped = ot_detail::pattern_compare(a, b) > 0;
    const WeightedPointPattern& s = swapped ? b : a;
    const WeightedPointPattern& t = swapped ? a : b;
    const std::size_t m = s.size(), n = t.size();

    ot_detail::CostFn cost;
    std::vector<double> dense;
    if (m * n * sizeof(double) <= params.memory_budget_bytes) {
        dense.resize(m * n);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j)
                dense[i * n + j] = ot_detail::ground_cost(s.point(i), t.point(j), s.dim, params.p);
        cost = [&dense, n](std::size_t i, std::size_t j) { return dense[i * n + j]; };
    } else {
        cost = [&s, &t, p = params.p](std::size_t i, std::size_t j) {
            return ot_detail::ground_cost(s.point(i), t.point(j), s.dim, p);
        };
    }

    ot_detail::TransportationSimplex solver(s.masses, t.masses, cost);
    WassersteinResult res;
    res.plan = solver.solve();
    if (swapped)
        for (auto& f : res.plan.flows) std::swap(f.source, f.target);
    res.distance = params.p == 2 ? std::sqrt(res.plan.cost) : res.plan.cost;
    return res;
}

// Entropic-regularized transport by alternating scaling in the log domain,
// then rounding the plan onto the transportation polytope so the reported
// value is the unregularized cost of a feasible plan (hence never below the
// exact optimum, up to floating point).
inline double sinkhorn(const WeightedPointPattern& a, const WeightedPointPattern& b,
                       const OtParams& params = {}) {
    params.validate();
    if (a.dim != b.dim) throw error("sinkhorn: dimension mismatch");
    a.validate();
    b.validate();

    const std::size_t m = a.size(), n = b.size();
    const double eps = 1.0 / params.sinkhorn_lambda;

    std::vector<double> c(m * n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j)
            c[i * n + j] = ot_detail::ground_cost(a.point(i), b.point(j), a.dim, params.p);

    std::vector<double> f(m, 0.0), g(n, 0.0), row_sum(m), col_sum(n);
    auto lse_row = [&](std::size_t i) {
        double mx = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < n; ++j)
            mx = std::max(mx, (g[j] - c[i * n + j]) / eps);
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += std::exp((g[j] - c[i * n + j]) / eps - mx);
        return mx + std::log(s);
    };
    auto lse_col = [&](std::size_t j) {
        double mx = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < m; ++i)
            mx = std::max(mx, (f[i] - c[i * n + j]) / eps);
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) s += std::exp((f[i] - c[i * n + j]) / eps - mx);
        return mx + std::log(s);
    };

    double marginal_err = std::numeric_limits<double>::infinity();
    for (std::size_t iter = 0; iter < params.max_iter; ++iter) {
        for (std::size_t i = 0; i < m; ++i) f[i] = eps * std::log(a.masses[i]) - eps * lse_row(i);
        for (std::size_t j = 0; j < n; ++j) g[j] = eps * std::log(b.masses[j]) - eps * lse_col(j);

        // columns are exact after the g update; check the rows
        marginal_err = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < n; ++j)
                s += std::exp((f[i] + g[j] - c[i * n + j]) / eps);
            marginal_err += std::abs(s - a.masses[i]);
        }
        if (marginal_err < params.tol) break;
    }
    if (marginal_err >= params.tol)
        throw error("sinkhorn: no convergence within " + std::to_string(params.max_iter) +
                    " iterations (marginal residual " + std::to_string(marginal_err) + ")");

    std::vector<double> plan(m * n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j)
            plan[i * n + j] = std::exp((f[i] + g[j] - c[i * n + j]) / eps);

    // round onto the polytope: scale rows then columns down, repair the
    // remaining deficit with a rank-one patch
    for (std::size_t i = 0; i < m; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += plan[i * n + j];
        const double scale = s > a.masses[i] ? a.masses[i] / s : 1.0;
        for (std::size_t j = 0; j < n; ++j) plan[i * n + j] *= scale;
    }
    for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) s += plan[i * n + j];
        const double scale = s > b.masses[j] ? b.masses[j] / s : 1.0;
        for (std::size_t i = 0; i < m; ++i) plan[i * n + j] *= scale;
    }
    std::vector<double> def_row(m, 0.0), def_col(n, 0.0);
    double deficit = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += plan[i * n + j];
        def_row[i] = a.masses[i] - s;
        deficit += std::abs(def_row[i]);
    }
    for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) s += plan[i * n + j];
        def_col[j] = b.masses[j] - s;
    }
    if (deficit > 0.0)
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j)
                plan[i * n + j] += def_row[i] * def_col[j] / deficit;

    double cost = 0.0;
    for (std::size_t k = 0; k < m * n; ++k) cost += plan[k] * c[k];
    return params.p == 2 ? std::sqrt(cost) : cost;
}

// Condensed matrix of pairwise exact Wasserstein distances. Pairs are
// independent solves consumed from a shared counter; results land in fixed
// slots, so the matrix is identical for any worker count.
inline CondensedDistanceMatrix pairwise_author_distances(
    const std::vector<WeightedPointPattern>& patterns, const OtParams& params = {}) {
    if (patterns.size() < 2) throw error("pairwise_author_distances: need at least 2 patterns");
    const std::size_t n = patterns.size();
    auto result = CondensedDistanceMatrix::zeros(n, "author");

    struct PairJob {
        std::size_t i, j, slot;
    };
    std::vector<PairJob> jobs;
    jobs.reserve(result.values.size());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            jobs.push_back({i, j, result.index(i, j)});

    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::string first_error;
    std::mutex err_mutex;

    auto worker = [&] {
        while (true) {
            const std::size_t idx = next.fetch_add(1);
            if (idx >= jobs.size() || failed.load()) return;
            const auto& job = jobs[idx];
            try {
                result.values[job.slot] =
                    wasserstein(patterns[job.i], patterns[job.j], params).distance;
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!failed.exchange(true))
                    first_error = "pair (" + patterns[job.i].owner + ", " +
                                  patterns[job.j].owner + "): " + e.what();
                return;
            }
        }
    };

    const std::size_t n_threads = std::max<std::size_t>(1, params.threads);
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failed.load()) throw error(first_error);
    return result;
}

// Baseline from the supplement: angular distance between the two authors'
// raw frequency vectors over V' (real counts, not binarized).
inline double direct_author_angular_distance(const AuthorProfile& fa, const AuthorProfile& fb,
                                             const Vocabulary& vocab_truncated) {
    double dot = 0.0, xx = 0.0, yy = 0.0;
    bool a_any = false, b_any = false;
    for (const auto& [term, ca] : fa.term_counts) {
        if (!vocab_truncated.rank_of.count(term)) continue;
        a_any = true;
        xx += double(ca) * double(ca);
        auto it = fb.term_counts.find(term);
        if (it != fb.term_counts.end()) dot += double(ca) * double(it->second);
    }
    for (const auto& [term, cb] : fb.term_counts) {
        if (!vocab_truncated.rank_of.count(term)) continue;
        b_any = true;
        yy += double(cb) * double(cb);
    }
    if (!a_any) throw error("direct distance: empty profile for author '" + fa.author_id + "'");
    if (!b_any) throw error("direct distance: empty profile for author '" + fb.author_id + "'");
    double c = dot / std::sqrt(xx * yy);
    c = std::clamp(c, -1.0, 1.0);
    return std::acos(c);
}

inline CondensedDistanceMatrix pairwise_direct_distances(
    const std::vector<AuthorProfile>& profiles, const Vocabulary& vocab_truncated) {
    if (profiles.size() < 2) throw error("pairwise_direct_distances: need at least 2 profiles");
    auto result = CondensedDistanceMatrix::zeros(profiles.size(), "author");
    std::size_t idx = 0;
    for (std::size_t i = 0; i < profiles.size(); ++i)
        for (std::size_t j = i + 1; j < profiles.size(); ++j, ++idx)
            result.values[idx] =
                direct_author_angular_distance(profiles[i], profiles[j], vocab_truncated);
    return result;
}

}  // namespace atlas
