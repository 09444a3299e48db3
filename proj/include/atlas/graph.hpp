#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "atlas/common.hpp"
#include "atlas/distance_matrix.hpp"

namespace atlas {

// Dense 0/1 adjacency, no self-loops.
struct Adjacency {
    std::size_t n = 0;
    std::vector<std::uint8_t> cells;  // n*n

    static Adjacency zeros(std::size_t n) { return {n, std::vector<std::uint8_t>(n * n, 0)}; }
    bool at(std::size_t i, std::size_t j) const { return cells[i * n + j] != 0; }
    void set(std::size_t i, std::size_t j, bool v) { cells[i * n + j] = v ? 1 : 0; }

    bool is_symmetric() const {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (at(i, j) != at(j, i)) return false;
        return true;
    }
};

struct UndirectedGraph {
    std::size_t n = 0;
    std::vector<std::vector<std::uint32_t>> adj;
    std::size_t n_edges = 0;

    static UndirectedGraph from_adjacency(const Adjacency& a) {
        UndirectedGraph g;
        g.n = a.n;
        g.adj.assign(a.n, {});
        for (std::size_t i = 0; i < a.n; ++i)
            for (std::size_t j = i + 1; j < a.n; ++j)
                if (a.at(i, j) || a.at(j, i)) {
                    g.adj[i].push_back(std::uint32_t(j));
                    g.adj[j].push_back(std::uint32_t(i));
                    ++g.n_edges;
                }
        return g;
    }

    std::size_t degree(std::size_t v) const { return adj[v].size(); }
};

struct AuthorGraph {
    std::vector<std::string> vertices;  // author ids, aligned with the distance matrix
    Adjacency directed;
    Adjacency undirected;
    double epsilon = 0.0;
    std::size_t k = 0;

    UndirectedGraph graph() const { return UndirectedGraph::from_adjacency(undirected); }
};

// epsilon = max over vertices of the nearest-neighbor distance: the smallest
// cutoff at which no vertex is isolated.
inline double epsilon_threshold(const CondensedDistanceMatrix& w) {
    if (w.n < 2) throw error("epsilon_threshold: need at least 2 authors");
    double eps = 0.0;
    for (std::size_t i = 0; i < w.n; ++i)
        eps = std::max(eps, w.nearest_neighbor_distance(i));
    return eps;
}

// A_ij = 1 iff j is among i's k nearest neighbors AND W_ij <= epsilon.
// The comparison is inclusive: with the strict form the vertex attaining
// the max-of-min threshold would stay isolated. kth-place ties break by
// author id when ids are given, by index otherwise.
inline Adjacency knn_adjacency(const CondensedDistanceMatrix& w, double epsilon, std::size_t k,
                               const std::vector<std::string>* ids = nullptr) {
    if (k < 1) throw error("knn_adjacency: k must be >= 1");
    if (ids && ids->size() != w.n) throw error("knn_adjacency: ids not aligned");
    Adjacency a = Adjacency::zeros(w.n);
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < w.n; ++i) {
        order.clear();
        for (std::size_t j = 0; j < w.n; ++j)
            if (j != i) order.push_back(j);
        std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
            const double dx = w.at(i, x), dy = w.at(i, y);
            if (dx != dy) return dx < dy;
            return ids ? (*ids)[x] < (*ids)[y] : x < y;
        });
        const std::size_t limit = std::min(k, order.size());
        for (std::size_t t = 0; t < limit; ++t)
            if (w.at(i, order[t]) <= epsilon) a.set(i, order[t], true);
    }
    return a;
}

// A'_ij = max(A_ij, A_ji)
inline Adjacency symmetrize(const Adjacency& a) {
    Adjacency s = Adjacency::zeros(a.n);
    for (std::size_t i = 0; i < a.n; ++i)
        for (std::size_t j = 0; j < a.n; ++j)
            if (i != j && (a.at(i, j) || a.at(j, i))) s.set(i, j, true);
    return s;
}

inline AuthorGraph build_author_graph(const CondensedDistanceMatrix& w,
                                      const std::vector<std::string>& ids, std::size_t k) {
    AuthorGraph g;
    g.vertices = ids;
    g.epsilon = epsilon_threshold(w);
    g.k = k;
    g.directed = knn_adjacency(w, g.epsilon, k, &ids);
    g.undirected = symmetrize(g.directed);
    return g;
}

struct Partition {
    std::vector<int> assignment;  // vertex -> community id (0-based, dense)
    double q = 0.0;

    int n_communities() const {
        int mx = -1;
        for (int c : assignment) mx = std::max(mx, c);
        return mx + 1;
    }
};

// Newman modularity of an undirected unweighted simple graph.
inline double modularity(const UndirectedGraph& g, const std::vector<int>& assignment) {
    if (assignment.size() != g.n) throw error("modularity: partition does not cover all vertices");
    if (g.n_edges == 0) return 0.0;
    const int nc = 1 + *std::max_element(assignment.begin(), assignment.end());
    std::vector<double> intra(nc, 0.0), deg(nc, 0.0);
    for (std::size_t u = 0; u < g.n; ++u) {
        deg[assignment[u]] += double(g.degree(u));
        for (auto v : g.adj[u])
            if (v > u && assignment[v] == assignment[u]) intra[assignment[u]] += 1.0;
    }
    const double m = double(g.n_edges);
    double q = 0.0;
    for (int c = 0; c < nc; ++c)
        q += intra[c] / m - (deg[c] / (2.0 * m)) * (deg[c] / (2.0 * m));
    return q;
}

namespace louvain_detail {

// Aggregated weighted graph. loop2[u] holds twice the internal weight of a
// supernode so degrees and modularity keep the simple-graph conventions.
struct WGraph {
    std::size_t n = 0;
    std::vector<std::vector<std::pair<std::uint32_t, double>>> arcs;  // both directions
    std::vector<double> loop2;
    double two_m = 0.0;

    std::vector<double> degree() const {
        std::vector<double> k(n, 0.0);
        for (std::size_t u = 0; u < n; ++u) {
            for (const auto& [v, w] : arcs[u]) k[u] += w;
            k[u] += loop2[u];
        }
        return k;
    }
};

struct LevelResult {
    std::vector<int> assignment;  // node -> community (dense ids)
    bool moved = false;
};

inline LevelResult one_level(const WGraph& g, rng64& rng,
                             const std::vector<int>* init = nullptr) {
    const std::size_t n = g.n;
    const auto k = g.degree();
    std::vector<int> comm(n);
    if (init) comm = *init;
    else std::iota(comm.begin(), comm.end(), 0);
    std::vector<double> tot(n, 0.0);
    std::vector<std::size_t> size(n, 0);
    for (std::size_t u = 0; u < n; ++u) {
        tot[comm[u]] += k[u];
        ++size[comm[u]];
    }

    std::vector<std::size_t> visit(n);
    std::iota(visit.begin(), visit.end(), 0);
    rng.shuffle(visit);

    auto find_empty = [&]() -> int {
        for (std::size_t c = 0; c < n; ++c)
            if (size[c] == 0) return int(c);
        return -1;
    };

    LevelResult res;
    bool pass_moved = true;
    std::vector<double> w_to(n, 0.0);
    std::vector<int> touched;
    while (pass_moved) {
        pass_moved = false;
        for (std::size_t u : visit) {
            const int old_comm = comm[u];
            touched.clear();
            for (const auto& [v, w] : g.arcs[u]) {
                const int c = comm[v];
                if (w_to[c] == 0.0) touched.push_back(c);
                w_to[c] += w;
            }
            if (w_to[old_comm] == 0.0) touched.push_back(old_comm);

            tot[old_comm] -= k[u];
            --size[old_comm];
            int best_comm = old_comm;
            double best_gain = w_to[old_comm] - tot[old_comm] * k[u] / g.two_m;
            for (int c : touched) {
                if (c == old_comm) continue;
                const double gain = w_to[c] - tot[c] * k[u] / g.two_m;
                if (gain > best_gain + 1e-14 ||
                    (std::abs(gain - best_gain) <= 1e-14 && c < best_comm && best_comm != old_comm)) {
                    best_gain = gain;
                    best_comm = c;
                }
            }
            // leaving for a fresh empty community has gain 0; take it when
            // every alternative is strictly negative
            if (best_gain < -1e-14 && size[old_comm] > 0) {
                const int fresh = find_empty();
                if (fresh >= 0) {
                    best_comm = fresh;
                    best_gain = 0.0;
                }
            }
            tot[best_comm] += k[u];
            ++size[best_comm];
            comm[u] = best_comm;
            if (best_comm != old_comm) {
                pass_moved = true;
                res.moved = true;
            }
            for (int c : touched) w_to[c] = 0.0;
        }
    }

    // densify community ids
    std::vector<int> remap(n, -1);
    int next = 0;
    res.assignment.resize(n);
    for (std::size_t u = 0; u < n; ++u) {
        if (remap[comm[u]] < 0) remap[comm[u]] = next++;
        res.assignment[u] = remap[comm[u]];
    }
    return res;
}

inline WGraph aggregate(const WGraph& g, const std::vector<int>& assignment, int nc) {
    WGraph out;
    out.n = std::size_t(nc);
    out.arcs.assign(out.n, {});
    out.loop2.assign(out.n, 0.0);
    out.two_m = g.two_m;
    std::vector<std::map<std::uint32_t, double>> acc(out.n);
    for (std::size_t u = 0; u < g.n; ++u) {
        const int cu = assignment[u];
        out.loop2[cu] += g.loop2[u];
        for (const auto& [v, w] : g.arcs[u]) {
            const int cv = assignment[v];
            if (cu == cv) out.loop2[cu] += w;  // both directions land here: counts twice
            else acc[cu][std::uint32_t(cv)] += w;
        }
    }
    for (std::size_t c = 0; c < out.n; ++c)
        for (const auto& [v, w] : acc[c]) out.arcs[c].emplace_back(v, w);
    return out;
}

// Try carving a fresh two-vertex community out of any edge {u,v}; apply the
// best strictly-improving extraction. Single-vertex sweeps cannot form such
// a pair in one step (each lone step through the intermediate state loses
// modularity), so thin pair-splits of dense graphs would otherwise be
// unreachable.
inline bool pair_extraction_pass(const WGraph& g, std::vector<int>& assignment) {
    const auto k = g.degree();
    std::vector<double> tot(g.n, 0.0);
    std::vector<std::size_t> size(g.n, 0);
    for (std::size_t u = 0; u < g.n; ++u) {
        tot[assignment[u]] += k[u];
        ++size[assignment[u]];
    }

    double best_gain = 1e-14;
    std::size_t best_u = 0, best_v = 0;
    for (std::size_t u = 0; u < g.n; ++u) {
        for (const auto& [v, w_uv] : g.arcs[u]) {
            if (v <= u) continue;
            const int cu = assignment[u], cv = assignment[v];
            // moving both into {u,v} must leave a strictly different partition
            if (cu == cv && size[cu] == 2) continue;
            double w_u_own = 0.0, w_v_own = 0.0;  // to own community, excluding each other
            for (const auto& [x, w] : g.arcs[u])
                if (x != v && assignment[x] == cu) w_u_own += w;
            for (const auto& [x, w] : g.arcs[v])
                if (x != u && assignment[x] == cv) w_v_own += w;

            const double s = k[u] + k[v];
            double delta_in, delta_tot2;
            if (cu == cv) {
                delta_in = -2.0 * (w_u_own + w_v_own);
                const double t = tot[cu];
                delta_tot2 = (t - s) * (t - s) + s * s - t * t;
            } else {
                delta_in = -2.0 * (w_u_own + w_v_own) + 2.0 * w_uv;
                const double ta = tot[cu], tb = tot[cv];
                delta_tot2 = (ta - k[u]) * (ta - k[u]) - ta * ta +
                             (tb - k[v]) * (tb - k[v]) - tb * tb + s * s;
            }
            const double gain = delta_in / g.two_m - delta_tot2 / (g.two_m * g.two_m);
            if (gain > best_gain) {
                best_gain = gain;
                best_u = u;
                best_v = v;
            }
        }
    }
    if (best_u == best_v) return false;
    int fresh = -1;
    for (std::size_t c = 0; c < g.n; ++c)
        if (size[c] == 0) fresh = int(c);
    if (fresh < 0) {
        // no spare id: only possible when u's or v's community empties out
        if (size[assignment[best_u]] == 1) fresh = assignment[best_u];
        else if (size[assignment[best_v]] == 1) fresh = assignment[best_v];
        else return false;
    }
    assignment[best_u] = fresh;
    assignment[best_v] = fresh;
    return true;
}

// Exchange the communities of one vertex pair (u in A, v in B -> u in B,
// v in A); apply the best strictly-improving swap. This is the classic
// exchange move that fine-tunes bisections where every single-vertex step
// loses modularity.
inline bool pair_swap_pass(const WGraph& g, std::vector<int>& assignment) {
    const auto k = g.degree();
    std::vector<double> tot(g.n, 0.0);
    for (std::size_t u = 0; u < g.n; ++u) tot[assignment[u]] += k[u];

    double best_gain = 1e-14;
    std::size_t best_u = 0, best_v = 0;
    std::vector<double> w_to(g.n, 0.0);
    std::vector<int> touched;
    for (std::size_t u = 0; u < g.n; ++u) {
        const int cu = assignment[u];
        touched.clear();
        for (const auto& [x, w] : g.arcs[u]) {
            if (w_to[assignment[x]] == 0.0) touched.push_back(assignment[x]);
            w_to[assignment[x]] += w;
        }
        const double w_u_own = w_to[cu];
        for (std::size_t v = u + 1; v < g.n; ++v) {
            const int cv = assignment[v];
            if (cv == cu) continue;
            double w_v_own = 0.0, w_v_cu = 0.0, w_uv = 0.0;
            for (const auto& [x, w] : g.arcs[v]) {
                if (x == u) w_uv = w;
                else if (assignment[x] == cv) w_v_own += w;
                else if (assignment[x] == cu) w_v_cu += w;
            }
            const double w_u_cv = w_to[cv] - w_uv;  // u's ties to B without the u-v edge
            const double delta_in =
                2.0 * (w_v_cu - w_u_own + w_u_cv - w_v_own);
            const double ta = tot[cu], tb = tot[cv];
            const double delta_tot2 = (ta - k[u] + k[v]) * (ta - k[u] + k[v]) - ta * ta +
                                      (tb - k[v] + k[u]) * (tb - k[v] + k[u]) - tb * tb;
            const double gain = delta_in / g.two_m - delta_tot2 / (g.two_m * g.two_m);
            if (gain > best_gain) {
                best_gain = gain;
                best_u = u;
                best_v = v;
            }
        }
        for (int c : touched) w_to[c] = 0.0;
    }
    if (best_u == best_v) return false;
    std::swap(assignment[best_u], assignment[best_v]);
    return true;
}

inline double partition_q(const WGraph& g, const std::vector<int>& assignment, int nc) {
    std::vector<double> in(nc, 0.0), tot(nc, 0.0);
    const auto k = g.degree();
    for (std::size_t u = 0; u < g.n; ++u) {
        const int c = assignment[u];
        tot[c] += k[u];
        in[c] += g.loop2[u];
        for (const auto& [v, w] : g.arcs[u])
            if (assignment[v] == c) in[c] += w;
    }
    double q = 0.0;
    for (int c = 0; c < nc; ++c)
        q += in[c] / g.two_m - (tot[c] / g.two_m) * (tot[c] / g.two_m);
    return q;
}

// Tentatively merge each pair of communities and re-sweep the vertices;
// keep the first merge whose refined partition strictly improves Q. Catches
// the case where a merge only pays off after a follow-up vertex move.
inline bool merge_kick_pass(const WGraph& g, std::vector<int>& assignment, rng64& rng) {
    const int nc = 1 + *std::max_element(assignment.begin(), assignment.end());
    if (nc < 2) return false;
    const double q_now = partition_q(g, assignment, nc);
    for (int a = 0; a < nc; ++a) {
        for (int b = a + 1; b < nc; ++b) {
            std::vector<int> trial = assignment;
            for (auto& c : trial)
                if (c == b) c = a;
            auto refined = one_level(g, rng, &trial);
            const int nc2 = 1 + *std::max_element(refined.assignment.begin(),
                                                  refined.assignment.end());
            if (partition_q(g, refined.assignment, nc2) > q_now + 1e-14) {
                assignment = refined.assignment;
                return true;
            }
        }
    }
    return false;
}

}  // namespace louvain_detail

// Two-phase Louvain maximizing Newman modularity; the vertex sweep order is
// seeded, so a run is deterministic in (graph, seed). An optional initial
// partition seeds the first sweep (used by the restart harness below).
// After each multi-level pass the sweep restarts at the original-vertex
// level from the coarse partition (multilevel refinement), which recovers
// the splits that pure supernode moves cannot reach.
inline Partition louvain(const UndirectedGraph& g, std::uint64_t seed,
                         const std::vector<int>* init = nullptr) {
    Partition part;
    part.assignment.resize(g.n);
    std::iota(part.assignment.begin(), part.assignment.end(), 0);
    if (g.n_edges == 0) {
        part.q = 0.0;  // every vertex its own community
        return part;
    }

    louvain_detail::WGraph base;
    base.n = g.n;
    base.arcs.assign(g.n, {});
    base.loop2.assign(g.n, 0.0);
    for (std::size_t u = 0; u < g.n; ++u)
        for (auto v : g.adj[u]) base.arcs[u].emplace_back(v, 1.0);
    base.two_m = 2.0 * double(g.n_edges);

    rng64 rng(hash_mix(seed, 0x6c6f7576ULL));
    if (init) part.assignment = *init;

    bool first = true;
    while (true) {
        // vertex-level sweep from the current partition (or the init/singletons)
        auto level = louvain_detail::one_level(base, rng,
                                               (!first || init) ? &part.assignment : nullptr);
        const bool refined = level.moved;
        first = false;
        part.assignment = level.assignment;

        // aggregate and optimize supernodes to convergence
        bool coarse_moved = false;
        int nc = 1 + *std::max_element(part.assignment.begin(), part.assignment.end());
        louvain_detail::WGraph wg = louvain_detail::aggregate(base, part.assignment, nc);
        while (true) {
            auto coarse = louvain_detail::one_level(wg, rng);
            if (!coarse.moved) break;
            coarse_moved = true;
            for (std::size_t v = 0; v < g.n; ++v)
                part.assignment[v] = coarse.assignment[part.assignment[v]];
            nc = 1 + *std::max_element(coarse.assignment.begin(), coarse.assignment.end());
            if (nc == int(wg.n)) break;
            wg = louvain_detail::aggregate(wg, coarse.assignment, nc);
        }
        if (!refined && !coarse_moved &&
            !louvain_detail::pair_extraction_pass(base, part.assignment) &&
            !louvain_detail::pair_swap_pass(base, part.assignment) &&
            !louvain_detail::merge_kick_pass(base, part.assignment, rng))
            break;
    }

    const int nc = 1 + *std::max_element(part.assignment.begin(), part.assignment.end());
    part.q = louvain_detail::partition_q(base, part.assignment, nc);
    return part;
}

struct LouvainReplicates {
    Partition best;
    std::map<int, std::size_t> cluster_count_frequency;  // #communities -> #replicates
};

// Best-of-R seeded replicates plus the cluster-count stability histogram.
// The first replicate is the vanilla singleton start; later replicates
// restart from seeded random partitions, random edge matchings, or random
// bipartitions. The diversified starts escape configurations the greedy
// dynamics cannot leave (pair traps, thin bisections of dense graphs).
inline LouvainReplicates louvain_best(const UndirectedGraph& g, std::size_t replicates,
                                      std::uint64_t master_seed) {
    if (replicates == 0) throw error("louvain_best: need at least one replicate");
    LouvainReplicates out;
    for (std::size_t r = 0; r < replicates; ++r) {
        const std::uint64_t seed = hash_mix(master_seed, 0x7265706cULL, r);
        Partition p;
        if (r == 0) {
            p = louvain(g, seed);
        } else if (r == 1) {
            // deterministic min-degree matching: low-degree vertices pair
            // with their lowest-degree neighbor before the dense core can
            // absorb them
            std::vector<int> init(g.n);
            std::iota(init.begin(), init.end(), 0);
            std::vector<std::size_t> order(g.n);
            std::iota(order.begin(), order.end(), 0);
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                return g.degree(a) != g.degree(b) ? g.degree(a) < g.degree(b) : a < b;
            });
            std::vector<bool> matched(g.n, false);
            for (std::size_t u : order) {
                if (matched[u]) continue;
                std::uint32_t pick = UINT32_MAX;
                for (auto v : g.adj[u])
                    if (!matched[v] &&
                        (pick == UINT32_MAX || g.degree(v) < g.degree(pick) ||
                         (g.degree(v) == g.degree(pick) && v < pick)))
                        pick = v;
                if (pick == UINT32_MAX) continue;
                init[pick] = init[u];
                matched[u] = matched[pick] = true;
            }
            p = louvain(g, seed, &init);
        } else if (r == 2 && g.n >= 3) {
            // deterministic probe: the lowest-degree vertex pairs with its
            // lowest-degree neighbor, everyone else starts as one block, so
            // a thin pair-split of a dense core is reachable in one sweep
            std::size_t u = 0;
            for (std::size_t v = 1; v < g.n; ++v)
                if (g.degree(v) < g.degree(u)) u = v;
            std::uint32_t pick = UINT32_MAX;
            for (auto v : g.adj[u])
                if (pick == UINT32_MAX || g.degree(v) < g.degree(pick) ||
                    (g.degree(v) == g.degree(pick) && v < pick))
                    pick = v;
            std::vector<int> init(g.n, 0);
            if (pick != UINT32_MAX) {
                init[u] = 1;
                init[pick] = 1;
            }
            p = louvain(g, seed, &init);
        } else {
            rng64 rng(hash_mix(seed, 0x696e6974ULL));
            std::vector<int> init(g.n);
            switch (r % 3) {
                case 1: {  // random partition
                    const std::size_t groups = 1 + rng.next_below(std::max<std::size_t>(1, g.n));
                    for (auto& c : init) c = int(rng.next_below(groups));
                    break;
                }
                case 2: {  // random matching: pair each vertex with a random free neighbor
                    std::iota(init.begin(), init.end(), 0);
                    std::vector<std::size_t> order(g.n);
                    std::iota(order.begin(), order.end(), 0);
                    rng.shuffle(order);
                    std::vector<bool> matched(g.n, false);
                    for (std::size_t u : order) {
                        if (matched[u]) continue;
                        std::vector<std::uint32_t> free;
                        for (auto v : g.adj[u])
                            if (!matched[v] && v != u) free.push_back(v);
                        if (free.empty()) continue;
                        const auto v = free[rng.next_below(free.size())];
                        init[v] = init[u];
                        matched[u] = matched[v] = true;
                    }
                    break;
                }
                default: {  // random bipartition
                    for (auto& c : init) c = int(rng.next() & 1);
                    break;
                }
            }
            p = louvain(g, seed, &init);
        }
        ++out.cluster_count_frequency[p.n_communities()];
        if (r == 0 || p.q > out.best.q) out.best = std::move(p);
    }
    return out;
}

inline std::vector<int> bfs_distances(const UndirectedGraph& g, std::size_t src) {
    std::vector<int> dist(g.n, -1);
    std::vector<std::uint32_t> queue;
    queue.reserve(g.n);
    dist[src] = 0;
    queue.push_back(std::uint32_t(src));
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const auto u = queue[head];
        for (auto v : g.adj[u])
            if (dist[v] < 0) {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
    }
    return dist;
}

struct ClosenessResult {
    std::vector<std::optional<double>> value;  // none for isolated vertices
    std::vector<int> component;                // component id per vertex
    std::vector<bool> in_giant;                // largest component membership
};

// 1 / sum of shortest-path lengths to every other vertex in the vertex's
// component; vertices outside the giant component are flagged for callers
// that want to exclude them.
inline ClosenessResult closeness_centrality(const UndirectedGraph& g) {
    ClosenessResult res;
    res.value.resize(g.n);
    res.component.assign(g.n, -1);
    res.in_giant.assign(g.n, false);

    int n_comp = 0;
    std::vector<std::size_t> comp_size;
    for (std::size_t v = 0; v < g.n; ++v) {
        if (res.component[v] >= 0) continue;
        const auto dist = bfs_distances(g, v);
        std::size_t size = 0;
        for (std::size_t u = 0; u < g.n; ++u)
            if (dist[u] >= 0) {
                res.component[u] = n_comp;
                ++size;
            }
        comp_size.push_back(size);
        ++n_comp;
    }
    int giant = 0;
    for (int c = 1; c < n_comp; ++c)
        if (comp_size[c] > comp_size[giant]) giant = c;

    for (std::size_t v = 0; v < g.n; ++v) {
        res.in_giant[v] = res.component[v] == giant && comp_size[giant] > 1;
        if (comp_size[res.component[v]] < 2) continue;  // isolated: flagged, no value
        const auto dist = bfs_distances(g, v);
        long long total = 0;
        for (std::size_t u = 0; u < g.n; ++u)
            if (u != v && dist[u] > 0) total += dist[u];
        res.value[v] = 1.0 / double(total);
    }
    return res;
}

enum class UnreachablePairs { Exclude, Error };

struct GroupDistance {
    std::optional<double> mean;   // none when the group has no usable pair
    std::size_t n_pairs = 0;      // pairs that entered the mean
    std::size_t n_unreachable = 0;
};

// Mean shortest-path length between same-group members, computed in the
// full graph. Unreachable pairs are excluded (or fatal, per flag);
// singleton groups have no pairs and are flagged by a null mean.
inline std::vector<GroupDistance> within_cluster_distance(
    const UndirectedGraph& g, const std::vector<int>& labels, int n_groups,
    UnreachablePairs policy = UnreachablePairs::Exclude) {
    if (labels.size() != g.n) throw error("within_cluster_distance: labels not aligned");
    std::vector<std::vector<std::uint32_t>> members(n_groups);
    for (std::size_t v = 0; v < g.n; ++v) {
        if (labels[v] < 0 || labels[v] >= n_groups)
            throw error("within_cluster_distance: label out of range");
        members[labels[v]].push_back(std::uint32_t(v));
    }

    std::vector<GroupDistance> out(n_groups);
    for (int c = 0; c < n_groups; ++c) {
        double total = 0.0;
        for (std::size_t ai = 0; ai < members[c].size(); ++ai) {
            const auto dist = bfs_distances(g, members[c][ai]);
            for (std::size_t bi = ai + 1; bi < members[c].size(); ++bi) {
                const int d = dist[members[c][bi]];
                if (d < 0) {
                    if (policy == UnreachablePairs::Error)
                        throw error("within_cluster_distance: unreachable pair in group " +
                                    std::to_string(c));
                    ++out[c].n_unreachable;
                } else {
                    total += double(d);
                    ++out[c].n_pairs;
                }
            }
        }
        if (out[c].n_pairs > 0) out[c].mean = total / double(out[c].n_pairs);
    }
    return out;
}

struct PermutationNull {
    struct Group {
        std::optional<double> observed;
        double null_mean = 0.0;
        double q05 = 0.0, q50 = 0.0, q95 = 0.0;
        double p_leq = 1.0;          // fraction of replicates with null value <= observed
        std::size_t n_valid = 0;     // replicates with a defined group mean
    };
    std::vector<Group> groups;
    std::size_t n_reps = 0;
};

// Group labels permuted uniformly over vertices; within-group mean path
// length recomputed per replicate against the fixed all-pairs distances.
inline PermutationNull permutation_null(const UndirectedGraph& g, const std::vector<int>& labels,
                                        int n_groups, std::size_t n_reps, std::uint64_t seed) {
    if (n_reps < 1) throw error("permutation_null: need at least one replicate");
    // all-pairs BFS once; replicates only relabel
    std::vector<std::vector<int>> dist(g.n);
    for (std::size_t v = 0; v < g.n; ++v) dist[v] = bfs_distances(g, v);

    auto group_means = [&](const std::vector<int>& lab) {
        std::vector<double> total(n_groups, 0.0);
        std::vector<std::size_t> pairs(n_groups, 0);
        std::vector<std::vector<std::uint32_t>> members(n_groups);
        for (std::size_t v = 0; v < g.n; ++v) members[lab[v]].push_back(std::uint32_t(v));
        std::vector<std::optional<double>> mean(n_groups);
        for (int c = 0; c < n_groups; ++c) {
            for (std::size_t ai = 0; ai < members[c].size(); ++ai)
                for (std::size_t bi = ai + 1; bi < members[c].size(); ++bi) {
                    const int d = dist[members[c][ai]][members[c][bi]];
                    if (d >= 0) {
                        total[c] += double(d);
                        ++pairs[c];
                    }
                }
            if (pairs[c] > 0) mean[c] = total[c] / double(pairs[c]);
        }
        return mean;
    };

    PermutationNull out;
    out.n_reps = n_reps;
    out.groups.resize(n_groups);
    const auto observed = group_means(labels);
    for (int c = 0; c < n_groups; ++c) out.groups[c].observed = observed[c];

    std::vector<std::vector<double>> null_values(n_groups);
    std::vector<int> shuffled = labels;
    for (std::size_t rep = 0; rep < n_reps; ++rep) {
        rng64 rng(hash_mix(seed, 0x7065726dULL, rep));
        rng.shuffle(shuffled);
        const auto means = group_means(shuffled);
        for (int c = 0; c < n_groups; ++c)
            if (means[c]) null_values[c].push_back(*means[c]);
    }

    for (int c = 0; c < n_groups; ++c) {
        auto& grp = out.groups[c];
        auto& vals = null_values[c];
        grp.n_valid = vals.size();
        if (vals.empty()) continue;
        std::sort(vals.begin(), vals.end());
        double sum = 0.0;
        for (double v : vals) sum += v;
        grp.null_mean = sum / double(vals.size());
        auto quantile = [&](double p) {
            std::size_t r = std::size_t(std::ceil(p * double(vals.size())));
            if (r == 0) r = 1;
            return vals[std::min(vals.size() - 1, r - 1)];
        };
        grp.q05 = quantile(0.05);
        grp.q50 = quantile(0.50);
        grp.q95 = quantile(0.95);
        if (grp.observed) {
            std::size_t leq = 0;
            for (double v : vals)
                if (v <= *grp.observed) ++leq;
            grp.p_leq = double(leq) / double(vals.size());
        }
    }
    return out;
}

// Chance-corrected agreement between two partitions of the same vertex set.
inline double adjusted_rand_index(const Partition& p1, const Partition& p2) {
    if (p1.assignment.size() != p2.assignment.size())
        throw error("adjusted_rand_index: partitions cover different vertex sets");
    const std::size_t n = p1.assignment.size();
    if (n == 0) throw error("adjusted_rand_index: empty partitions");
    const int k1 = p1.n_communities(), k2 = p2.n_communities();
    std::vector<std::vector<std::uint64_t>> table(k1, std::vector<std::uint64_t>(k2, 0));
    for (std::size_t v = 0; v < n; ++v) ++table[p1.assignment[v]][p2.assignment[v]];

    auto choose2 = [](std::uint64_t x) { return double(x) * double(x - 1) / 2.0; };
    double sum_ij = 0.0, sum_a = 0.0, sum_b = 0.0;
    std::vector<std::uint64_t> row(k1, 0), col(k2, 0);
    for (int i = 0; i < k1; ++i)
        for (int j = 0; j < k2; ++j) {
            sum_ij += choose2(table[i][j]);
            row[i] += table[i][j];
            col[j] += table[i][j];
        }
    for (int i = 0; i < k1; ++i) sum_a += choose2(row[i]);
    for (int j = 0; j < k2; ++j) sum_b += choose2(col[j]);
    const double total = choose2(n);
    const double expected = sum_a * sum_b / total;
    const double max_index = 0.5 * (sum_a + sum_b);
    if (max_index == expected)  // both partitions trivial
        return sum_ij == expected ? 1.0 : 0.0;
    return (sum_ij - expected) / (max_index - expected);
}

struct DegreeStats {
    std::size_t min = 0, max = 0;
    double mean = 0.0;
};

inline DegreeStats degree_stats(const UndirectedGraph& g) {
    if (g.n == 0) throw error("degree_stats: empty graph");
    DegreeStats s;
    s.min = g.degree(0);
    s.max = g.degree(0);
    std::size_t total = 0;
    for (std::size_t v = 0; v < g.n; ++v) {
        const std::size_t d = g.degree(v);
        s.min = std::min(s.min, d);
        s.max = std::max(s.max, d);
        total += d;
    }
    s.mean = double(total) / double(g.n);
    return s;
}

struct ScoredWord {
    std::string term;
    double score = 0.0;  // (f_i - f) / f
};

// Table-2 characteristic-word score: relative frequency within the pooled
// cluster profile against the global relative frequency, as a relative
// error. Words rarer than min_global_count are ineligible, which keeps the
// ratio from blowing up on one-off terms.
inline std::vector<std::vector<ScoredWord>> characteristic_words(
    const std::vector<std::map<std::string, std::uint64_t>>& cluster_counts,
    const std::map<std::string, std::uint64_t>& global_counts, std::size_t top_m,
    std::uint64_t min_global_count = 5) {
    double global_total = 0.0;
    for (const auto& [term, c] : global_counts) global_total += double(c);
    if (global_total <= 0.0) throw error("characteristic_words: empty global counts");

    std::vector<std::vector<ScoredWord>> out;
    out.reserve(cluster_counts.size());
    for (std::size_t ci = 0; ci < cluster_counts.size(); ++ci) {
        const auto& counts = cluster_counts[ci];
        double cluster_total = 0.0;
        for (const auto& [term, c] : counts) cluster_total += double(c);
        if (cluster_total <= 0.0)
            throw error("characteristic_words: cluster " + std::to_string(ci) + " is empty");

        std::vector<ScoredWord> scored;
        for (const auto& [term, c] : counts) {
            auto it = global_counts.find(term);
            if (it == global_counts.end() || it->second < min_global_count) continue;
            const double fi = double(c) / cluster_total;
            const double f = double(it->second) / global_total;
            scored.push_back({term, (fi - f) / f});
        }
        std::sort(scored.begin(), scored.end(), [](const ScoredWord& a, const ScoredWord& b) {
            if (a.score != b.score) return a.score > b.score;
            return a.term < b.term;
        });
        if (scored.size() > top_m) scored.resize(top_m);
        out.push_back(std::move(scored));
    }
    return out;
}

}  // namespace atlas
