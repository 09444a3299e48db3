#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <thread>
#include <unordered_map>
#include <vector>

#include "atlas/distance_matrix.hpp"
#include "atlas/nelder_mead.hpp"

namespace atlas {

struct UmapParams {
    std::size_t n_neighbors = 15;
    double min_dist = 0.1;
    std::size_t n_epochs = 500;
    std::size_t dim = 3;
    std::uint64_t seed = 42;
    double learning_rate = 1.0;
    std::size_t negative_sample_rate = 5;
    double spread = 1.0;
    // layout_threads > 1 runs the SGD asynchronously (lock-free updates);
    // only the single-threaded mode is bit-reproducible
    std::size_t layout_threads = 1;

    void validate() const {
        if (n_neighbors < 2) throw error("umap: n_neighbors must be >= 2");
        if (dim < 2) throw error("umap: output dimension must be >= 2");
        if (n_epochs == 0) throw error("umap: n_epochs must be positive");
        if (layout_threads == 0) throw error("umap: layout_threads must be >= 1");
    }
};

// Coordinates in R^d for each embedded point, keyed by the point id
// (vocabulary rank in term mode).
struct TermEmbedding {
    std::size_t dim = 0;
    std::vector<std::uint32_t> ids;  // ascending
    std::vector<double> coords;      // ids.size() x dim, row-major
    std::uint64_t rng_seed = 0;
    std::unordered_map<std::uint32_t, std::size_t> row_of;

    std::size_t size() const { return ids.size(); }
    const double* point(std::size_t row) const { return coords.data() + row * dim; }

    const double* point_by_id(std::uint32_t id) const {
        auto it = row_of.find(id);
        return it == row_of.end() ? nullptr : point(it->second);
    }

    void rebuild_index() {
        row_of.clear();
        for (std::size_t i = 0; i < ids.size(); ++i) row_of[ids[i]] = i;
    }
};

namespace umap_detail {

// Fit the rational curve 1/(1 + a x^(2b)) to the target membership decay
// determined by min_dist and spread (the standard curve-fit step).
inline std::pair<double, double> fit_ab(double min_dist, double spread) {
    const std::size_t grid = 300;
    std::vector<double> xs(grid), ys(grid);
    for (std::size_t i = 0; i < grid; ++i) {
        xs[i] = 3.0 * spread * double(i) / double(grid - 1);
        ys[i] = xs[i] <= min_dist ? 1.0 : std::exp(-(xs[i] - min_dist) / spread);
    }
    auto objective = [&](const std::vector<double>& p) {
        const double a = p[0], b = p[1];
        if (!(a > 0.0) || !(b > 0.0)) return 1e100;
        double sse = 0.0;
        for (std::size_t i = 0; i < grid; ++i) {
            const double f = 1.0 / (1.0 + a * std::pow(xs[i] * xs[i], b));
            sse += (f - ys[i]) * (f - ys[i]);
        }
        return sse;
    };
    NelderMeadOptions opt;
    opt.ftol = 1e-14;
    opt.max_iter = 2000;
    auto res = nelder_mead_minimize(objective, {1.0, 1.0}, opt);
    return {res.x[0], res.x[1]};
}

struct KnnEntry {
    std::size_t neighbor;  // internal (id-sorted) index
    double distance;
};

// sigma/rho calibration: rho_i is the nearest nonzero neighbor distance,
// sigma_i solves sum_j exp(-max(0, d_ij - rho_i)/sigma_i) = log2(k).
inline double smooth_knn_sigma(const std::vector<KnnEntry>& knn, double rho, double target) {
    double lo = 0.0, hi = std::numeric_limits<double>::infinity(), mid = 1.0;
    for (int iter = 0; iter < 64; ++iter) {
        double psum = 0.0;
        for (const auto& e : knn) {
            const double d = e.distance - rho;
            psum += d > 0.0 ? std::exp(-d / mid) : 1.0;
        }
        if (std::abs(psum - target) < 1e-5) break;
        if (psum > target) {
            hi = mid;
            mid = 0.5 * (lo + hi);
        } else {
            lo = mid;
            mid = std::isinf(hi) ? mid * 2.0 : 0.5 * (lo + hi);
        }
    }
    return std::max(mid, 1e-12);
}

}  // namespace umap_detail

// UMAP over a precomputed distance matrix: exact k-NN from the condensed
// matrix, per-point sigma/rho calibration, fuzzy-union symmetrization, then
// negative-sampling SGD in R^d.
//
// Determinism: every random draw is keyed on (seed, point ids), edges are
// visited in id order, and updates run on one thread, so a run is
// reproducible bit-for-bit and permuting the input order merely permutes
// the output rows.
inline TermEmbedding umap_embed(const CondensedDistanceMatrix& dist,
                                const std::vector<std::uint32_t>& ids,
                                const UmapParams& params) {
    params.validate();
    const std::size_t n = dist.n;
    if (ids.size() != n) throw error("umap: ids not aligned with distance matrix");
    if (params.n_neighbors >= n) throw error("umap: n_neighbors must be below the point count");
    for (double v : dist.values)
        if (!std::isfinite(v)) throw error("umap: non-finite distance");

    // internal order = ascending id
    std::vector<std::size_t> by_id(n);
    std::iota(by_id.begin(), by_id.end(), 0);
    std::sort(by_id.begin(), by_id.end(),
              [&](std::size_t a, std::size_t b) { return ids[a] < ids[b]; });
    for (std::size_t i = 1; i < n; ++i)
        if (ids[by_id[i]] == ids[by_id[i - 1]]) throw error("umap: duplicate point id");
    std::vector<std::uint32_t> sorted_ids(n);
    for (std::size_t i = 0; i < n; ++i) sorted_ids[i] = ids[by_id[i]];

    const std::size_t k = params.n_neighbors;
    const double target = std::log2(double(k));

    // exact k-NN scan; ties broken by id so the graph is order-independent
    std::vector<std::vector<umap_detail::KnnEntry>> knn(n);
    std::vector<std::pair<double, std::size_t>> cand;
    for (std::size_t i = 0; i < n; ++i) {
        cand.clear();
        cand.reserve(n - 1);
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            cand.emplace_back(dist.at(by_id[i], by_id[j]), j);
        }
        std::partial_sort(cand.begin(), cand.begin() + k, cand.end(),
                          [](const auto& a, const auto& b) {
                              if (a.first != b.first) return a.first < b.first;
                              return a.second < b.second;
                          });
        knn[i].reserve(k);
        for (std::size_t t = 0; t < k; ++t)
            knn[i].push_back({cand[t].second, cand[t].first});
    }

    // membership strengths, then fuzzy union w + w' - w*w'
    std::vector<std::unordered_map<std::size_t, double>> directed(n);
    for (std::size_t i = 0; i < n; ++i) {
        double rho = 0.0;
        for (const auto& e : knn[i])
            if (e.distance > 0.0) { rho = e.distance; break; }
        const double sigma = umap_detail::smooth_knn_sigma(knn[i], rho, target);
        for (const auto& e : knn[i]) {
            const double d = e.distance - rho;
            directed[i][e.neighbor] = d > 0.0 ? std::exp(-d / sigma) : 1.0;
        }
    }
    struct Edge {
        std::size_t u, v;  // u < v in internal order
        double weight;
    };
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& [j, w] : directed[i]) {
            if (i < j) {
                double wr = 0.0;
                if (auto it = directed[j].find(i); it != directed[j].end()) wr = it->second;
                edges.push_back({i, j, w + wr - w * wr});
            } else if (directed[j].find(i) == directed[j].end()) {
                edges.push_back({j, i, w});  // only the reverse direction exists
            }
        }
    }
    std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
        return a.u != b.u ? a.u < b.u : a.v < b.v;
    });

    double w_max = 0.0;
    for (const auto& e : edges) w_max = std::max(w_max, e.weight);

    const auto [curve_a, curve_b] = umap_detail::fit_ab(params.min_dist, params.spread);
    const std::size_t d = params.dim;

    // init: uniform in [-10, 10], keyed on (seed, id, dim)
    std::vector<double> coords(n * d);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < d; ++c) {
            std::uint64_t h = hash_mix(params.seed, 0x696e6974ULL, sorted_ids[i], c);
            coords[i * d + c] = (double(h >> 11) * 0x1.0p-53) * 20.0 - 10.0;
        }

    // per-directed-edge sampling schedule, umap-learn style
    const std::size_t m = edges.size();
    std::vector<double> epochs_per_sample(m), next_sample(m), next_neg(m);
    for (std::size_t e = 0; e < m; ++e) {
        epochs_per_sample[e] = edges[e].weight > 0.0
                                   ? w_max / edges[e].weight
                                   : std::numeric_limits<double>::infinity();
        next_sample[e] = epochs_per_sample[e];
        next_neg[e] = epochs_per_sample[e] / double(params.negative_sample_rate);
    }
    const double neg_rate = double(params.negative_sample_rate);

    std::vector<std::uint64_t> neg_counter(m, 0);
    auto clip4 = [](double v) { return std::clamp(v, -4.0, 4.0); };

    auto process_edge = [&](std::size_t e, std::size_t epoch, double alpha) {
        {
            // each undirected edge is applied in both directions, u->v first
            for (int dir = 0; dir < 2; ++dir) {
                const std::size_t h = dir == 0 ? edges[e].u : edges[e].v;
                const std::size_t t = dir == 0 ? edges[e].v : edges[e].u;
                double* xh = coords.data() + h * d;
                double* xt = coords.data() + t * d;

                double d2 = 0.0;
                for (std::size_t c = 0; c < d; ++c) d2 += (xh[c] - xt[c]) * (xh[c] - xt[c]);
                if (d2 > 0.0) {
                    const double pd2b = std::pow(d2, curve_b);
                    const double gc = (-2.0 * curve_a * curve_b * pd2b / d2) /
                                      (curve_a * pd2b + 1.0);
                    for (std::size_t c = 0; c < d; ++c) {
                        const double g = clip4(gc * (xh[c] - xt[c]));
                        xh[c] += alpha * g;
                        xt[c] -= alpha * g;
                    }
                }
            }
            next_sample[e] += epochs_per_sample[e];

            const double eps_neg = epochs_per_sample[e] / neg_rate;
            const double pending = (double(epoch) - next_neg[e]) / eps_neg;
            const std::size_t n_neg = pending > 0.0 ? static_cast<std::size_t>(pending) : 0;
            const std::uint64_t edge_key =
                (std::uint64_t(sorted_ids[edges[e].u]) << 32) | sorted_ids[edges[e].v];
            for (std::size_t s = 0; s < n_neg; ++s) {
                // negatives repulse alternating heads, sampled by id rank
                const std::size_t h = (s % 2 == 0) ? edges[e].u : edges[e].v;
                const std::size_t r = static_cast<std::size_t>(
                    hash_mix(params.seed, edge_key, neg_counter[e]++) % n);
                if (r == h) continue;
                double* xh = coords.data() + h * d;
                const double* xr = coords.data() + r * d;
                double d2 = 0.0;
                for (std::size_t c = 0; c < d; ++c) d2 += (xh[c] - xr[c]) * (xh[c] - xr[c]);
                if (d2 > 0.0) {
                    const double pd2b = std::pow(d2, curve_b);
                    const double gc = 2.0 * curve_b /
                                      ((0.001 + d2) * (curve_a * pd2b + 1.0));
                    for (std::size_t c = 0; c < d; ++c)
                        xh[c] += alpha * clip4(gc * (xh[c] - xr[c]));
                } else {
                    for (std::size_t c = 0; c < d; ++c) xh[c] += alpha * 4.0;
                }
            }
            next_neg[e] += double(n_neg) * eps_neg;
        }
    };

    for (std::size_t epoch = 1; epoch <= params.n_epochs; ++epoch) {
        const double alpha =
            params.learning_rate * (1.0 - double(epoch - 1) / double(params.n_epochs));
        if (params.layout_threads <= 1) {
            for (std::size_t e = 0; e < m; ++e) {
                if (next_sample[e] > double(epoch)) continue;
                process_edge(e, epoch, alpha);
            }
        } else {
            // asynchronous updates: edge slices are disjoint, coordinate
            // writes race benignly (hogwild)
            std::vector<std::thread> pool;
            const std::size_t chunk = (m + params.layout_threads - 1) / params.layout_threads;
            for (std::size_t t = 0; t < params.layout_threads; ++t) {
                const std::size_t lo = t * chunk, hi = std::min(m, lo + chunk);
                if (lo >= hi) break;
                pool.emplace_back([&, lo, hi, epoch, alpha] {
                    for (std::size_t e = lo; e < hi; ++e) {
                        if (next_sample[e] > double(epoch)) continue;
                        process_edge(e, epoch, alpha);
                    }
                });
            }
            for (auto& th : pool) th.join();
        }
    }

    TermEmbedding emb;
    emb.dim = d;
    emb.ids = std::move(sorted_ids);
    emb.coords = std::move(coords);
    emb.rng_seed = params.seed;
    emb.rebuild_index();
    return emb;
}

// Neighborhood-preservation score in [0, 1]: penalizes embedded-space
// k-neighbors that were far in the original space (the standard definition).
inline double trustworthiness(const CondensedDistanceMatrix& orig,
                              const std::vector<std::uint32_t>& ids,
                              const TermEmbedding& emb, std::size_t k) {
    const std::size_t n = orig.n;
    if (n != emb.size()) throw error("trustworthiness: size mismatch");
    if (2 * n <= 3 * k + 1) throw error("trustworthiness: k too large for n");

    // original-space neighbor ranks (1-based, by distance then id)
    std::vector<std::size_t> rank_orig(n * n, 0);
    std::vector<std::pair<double, std::size_t>> order(n - 1);
    std::vector<std::size_t> emb_row(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto it = emb.row_of.find(ids[i]);
        if (it == emb.row_of.end()) throw error("trustworthiness: id missing from embedding");
        emb_row[i] = it->second;
    }

    double penalty = 0.0;
    std::vector<std::pair<double, std::size_t>> emb_order(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t c = 0;
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) order[c++] = {orig.at(i, j), j};
        std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
            return a.first != b.first ? a.first < b.first : a.second < b.second;
        });
        for (std::size_t r = 0; r < order.size(); ++r) rank_orig[i * n + order[r].second] = r + 1;

        c = 0;
        const double* xi = emb.point(emb_row[i]);
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const double* xj = emb.point(emb_row[j]);
            double d2 = 0.0;
            for (std::size_t t = 0; t < emb.dim; ++t) d2 += (xi[t] - xj[t]) * (xi[t] - xj[t]);
            emb_order[c++] = {d2, j};
        }
        std::partial_sort(emb_order.begin(), emb_order.begin() + k, emb_order.end(),
                          [](const auto& a, const auto& b) {
                              return a.first != b.first ? a.first < b.first : a.second < b.second;
                          });
        for (std::size_t t = 0; t < k; ++t) {
            const std::size_t r = rank_orig[i * n + emb_order[t].second];
            if (r > k) penalty += double(r - k);
        }
    }
    const double norm = 2.0 / (double(n) * double(k) * (2.0 * double(n) - 3.0 * double(k) - 1.0));
    return 1.0 - norm * penalty;
}

}  // namespace atlas
