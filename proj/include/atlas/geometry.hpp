#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "atlas/distance_matrix.hpp"
#include "atlas/docterm.hpp"

namespace atlas {

// arccos of cosine similarity, clamped into [-1,1] before arccos to absorb
// floating-point overshoot; result in [0, pi]. The norm product goes through
// a single sqrt so that integer-valued inputs (binary presence counts) give
// exact cosines at the colinear and orthogonal extremes.
inline double angular_from_products(double dot, double xx, double yy) {
    if (xx <= 0.0 || yy <= 0.0) throw error("angular distance: zero vector");
    double c = dot / std::sqrt(xx * yy);
    c = std::clamp(c, -1.0, 1.0);
    return std::acos(c);
}

inline double angular_distance(const std::vector<std::uint8_t>& x,
                               const std::vector<std::uint8_t>& y) {
    if (x.size() != y.size()) throw error("angular distance: length mismatch");
    std::uint64_t dot = 0, nx = 0, ny = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const bool xi = x[i] != 0, yi = y[i] != 0;
        dot += (xi && yi);
        nx += xi;
        ny += yi;
    }
    if (nx == 0 || ny == 0) throw error("angular distance: term absent from all documents");
    return angular_from_products(double(dot), double(nx), double(ny));
}

inline double angular_distance_real(const std::vector<double>& x,
                                    const std::vector<double>& y) {
    if (x.size() != y.size()) throw error("angular distance: length mismatch");
    double dot = 0.0, xx = 0.0, yy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        dot += x[i] * y[i];
        xx += x[i] * x[i];
        yy += y[i] * y[i];
    }
    return angular_from_products(dot, xx, yy);
}

struct TermDistanceResult {
    CondensedDistanceMatrix dist;          // over retained columns only
    std::vector<std::uint32_t> term_ranks;  // column -> vocabulary rank (1-based)
};

// Angular distance between every pair of term columns of the deduplicated
// presence matrix. The dot product of two binary columns is the size of
// their document-support intersection, accumulated here row by row.
// Columns empty after dedup are excluded (recorded via the rank map).
inline TermDistanceResult pairwise_term_distances(const SparseDocTermMatrix& x,
                                                  std::vector<std::string>* warnings = nullptr) {
    std::vector<std::uint32_t> support(x.n_terms + 1, 0);
    for (const auto& row : x.rows)
        for (auto r : row) ++support[r];

    TermDistanceResult res;
    std::vector<std::uint32_t> col_of(x.n_terms + 1, UINT32_MAX);
    for (std::uint32_t r = 1; r <= x.n_terms; ++r) {
        if (support[r] == 0) {
            if (warnings)
                warnings->push_back("term rank " + std::to_string(r) +
                                    " appears in no document; excluded from distances");
            continue;
        }
        col_of[r] = static_cast<std::uint32_t>(res.term_ranks.size());
        res.term_ranks.push_back(r);
    }

    const std::size_t k = res.term_ranks.size();
    res.dist = CondensedDistanceMatrix::zeros(k, "term");
    if (k < 2) return res;

    std::vector<std::uint32_t> cooc(CondensedDistanceMatrix::condensed_size(k), 0);
    for (const auto& row : x.rows) {
        // row ranks are ascending and col_of preserves that order
        for (std::size_t a = 0; a < row.size(); ++a) {
            const std::size_t ia = col_of[row[a]];
            const std::size_t start = k * ia - ia * (ia + 1) / 2;  // index of pair (ia, ia+1)
            for (std::size_t b = a + 1; b < row.size(); ++b) {
                const std::size_t ib = col_of[row[b]];
                ++cooc[start + (ib - ia - 1)];
            }
        }
    }

    std::size_t idx = 0;
    for (std::size_t i = 0; i < k; ++i) {
        const double ni = double(support[res.term_ranks[i]]);
        for (std::size_t j = i + 1; j < k; ++j, ++idx) {
            const double nj = double(support[res.term_ranks[j]]);
            res.dist.values[idx] = angular_from_products(double(cooc[idx]), ni, nj);
        }
    }
    return res;
}

}  // namespace atlas
