#pragma once

// Shared test fixtures and small oracles.

#include <cmath>
#include <cstdint>
#include <vector>

#include "atlas/common.hpp"
#include "atlas/distance_matrix.hpp"
#include "atlas/umap.hpp"

namespace test_support {

struct TwoClusterFixture {
    atlas::CondensedDistanceMatrix dist;
    std::vector<std::uint32_t> ids;
    std::vector<int> labels;          // 0 or 1, aligned with ids order
    std::vector<double> coords;       // n x 3 generating points
};

// Two Gaussian blobs in R^3: within-cluster distances ~sigma, centers
// `separation` apart. Distances are plain Euclidean, so neighborhood
// structure is real and an embedding can preserve it.
inline TwoClusterFixture two_cluster_fixture(std::size_t per_cluster, double separation,
                                             double sigma, std::uint64_t seed) {
    TwoClusterFixture fx;
    atlas::rng64 rng(seed);
    const std::size_t n = 2 * per_cluster;
    auto gauss = [&] {
        // Box-Muller
        const double u1 = rng.next_double() + 1e-12, u2 = rng.next_double();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    };
    for (std::size_t i = 0; i < n; ++i) {
        const int label = i < per_cluster ? 0 : 1;
        fx.labels.push_back(label);
        fx.ids.push_back(std::uint32_t(i + 1));
        const double cx = label == 0 ? 0.0 : separation;
        fx.coords.push_back(cx + sigma * gauss());
        fx.coords.push_back(sigma * gauss());
        fx.coords.push_back(sigma * gauss());
    }
    fx.dist = atlas::CondensedDistanceMatrix::zeros(n, "term");
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            double d2 = 0.0;
            for (std::size_t c = 0; c < 3; ++c) {
                const double d = fx.coords[i * 3 + c] - fx.coords[j * 3 + c];
                d2 += d * d;
            }
            fx.dist.set(i, j, std::sqrt(d2));
        }
    return fx;
}

// Mean silhouette over all points, Euclidean distances in the embedding.
inline double silhouette(const atlas::TermEmbedding& emb, const std::vector<int>& labels) {
    const std::size_t n = emb.size();
    auto dist = [&](std::size_t i, std::size_t j) {
        double d2 = 0.0;
        for (std::size_t c = 0; c < emb.dim; ++c) {
            const double d = emb.point(i)[c] - emb.point(j)[c];
            d2 += d * d;
        }
        return std::sqrt(d2);
    };
    int n_clusters = 0;
    for (int l : labels) n_clusters = std::max(n_clusters, l + 1);

    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> sum(n_clusters, 0.0);
        std::vector<std::size_t> count(n_clusters, 0);
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            sum[labels[j]] += dist(i, j);
            ++count[labels[j]];
        }
        const int own = labels[i];
        const double a = count[own] ? sum[own] / double(count[own]) : 0.0;
        double b = -1.0;
        for (int c = 0; c < n_clusters; ++c) {
            if (c == own || count[c] == 0) continue;
            const double m = sum[c] / double(count[c]);
            if (b < 0.0 || m < b) b = m;
        }
        total += (b - a) / std::max(a, b);
    }
    return total / double(n);
}

}  // namespace test_support
