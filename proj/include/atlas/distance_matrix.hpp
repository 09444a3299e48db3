#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "atlas/common.hpp"

namespace atlas {

// Symmetric pairwise distances stored as the strict upper triangle in
// row-major order: (0,1), (0,2), ..., (0,n-1), (1,2), ...
struct CondensedDistanceMatrix {
    std::size_t n = 0;
    std::vector<double> values;   // length n*(n-1)/2
    std::string label;            // "term" or "author"

    static std::size_t condensed_size(std::size_t n) { return n * (n - 1) / 2; }

    std::size_t index(std::size_t i, std::size_t j) const {
        if (i == j || i >= n || j >= n) throw error("condensed index out of range");
        if (i > j) std::swap(i, j);
        return n * i - i * (i + 1) / 2 + (j - i - 1);
    }

    double at(std::size_t i, std::size_t j) const {
        return i == j ? 0.0 : values[index(i, j)];
    }

    void set(std::size_t i, std::size_t j, double v) { values[index(i, j)] = v; }

    static CondensedDistanceMatrix zeros(std::size_t n, std::string label) {
        CondensedDistanceMatrix m;
        m.n = n;
        m.values.assign(condensed_size(n), 0.0);
        m.label = std::move(label);
        return m;
    }

    // Distance from i to its nearest other point.
    double nearest_neighbor_distance(std::size_t i) const {
        double best = -1.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            double d = at(i, j);
            if (best < 0.0 || d < best) best = d;
        }
        return best;
    }
};

}  // namespace atlas
