#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <vector>

#include "atlas/common.hpp"

namespace atlas {

struct NelderMeadOptions {
    double ftol = 1e-12;          // stop when the simplex function-value spread falls below this
    double xtol = 1e-9;           // ... and the simplex diameter below this (guards symmetric stalls)
    std::size_t max_iter = 5000;  // iteration cap
};

struct NelderMeadResult {
    std::vector<double> x;
    double value = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
};

namespace detail {
inline void check_finite(double f, const std::vector<double>& x) {
    if (std::isnan(f)) {
        std::ostringstream os;
        os << "nelder_mead: objective returned NaN at (";
        for (std::size_t i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
        os << ")";
        throw error(os.str());
    }
}
}  // namespace detail

// Derivative-free simplex minimizer with the standard coefficients:
// reflection 1, expansion 2, contraction 0.5, shrink 0.5.
inline NelderMeadResult nelder_mead_minimize(
    const std::function<double(const std::vector<double>&)>& objective,
    const std::vector<double>& x0,
    const NelderMeadOptions& opt = {}) {
    const std::size_t k = x0.size();
    if (k == 0) throw error("nelder_mead: empty start point");

    std::vector<std::vector<double>> pts(k + 1, x0);
    for (std::size_t i = 0; i < k; ++i) {
        // fminsearch-style initial simplex
        pts[i + 1][i] += (x0[i] != 0.0) ? 0.05 * std::abs(x0[i]) : 0.00025;
    }
    std::vector<double> fv(k + 1);
    for (std::size_t i = 0; i <= k; ++i) {
        fv[i] = objective(pts[i]);
        detail::check_finite(fv[i], pts[i]);
    }

    std::vector<std::size_t> order(k + 1);
    auto sort_simplex = [&] {
        for (std::size_t i = 0; i <= k; ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    };

    std::vector<double> centroid(k), xr(k), xe(k), xc(k);
    NelderMeadResult res;
    for (res.iterations = 0; res.iterations < opt.max_iter; ++res.iterations) {
        sort_simplex();
        const std::size_t best = order[0], worst = order[k], second_worst = order[k - 1];
        if (std::abs(fv[worst] - fv[best]) < opt.ftol) {
            double diameter = 0.0;
            for (std::size_t i = 0; i <= k; ++i)
                if (i != best)
                    for (std::size_t d = 0; d < k; ++d)
                        diameter = std::max(diameter, std::abs(pts[i][d] - pts[best][d]));
            if (diameter < opt.xtol * (1.0 + std::abs(pts[best][0]))) {
                res.converged = true;
                break;
            }
        }

        for (std::size_t d = 0; d < k; ++d) {
            double s = 0.0;
            for (std::size_t i = 0; i <= k; ++i)
                if (i != worst) s += pts[i][d];
            centroid[d] = s / static_cast<double>(k);
        }

        auto eval = [&](const std::vector<double>& p) {
            double f = objective(p);
            detail::check_finite(f, p);
            return f;
        };

        for (std::size_t d = 0; d < k; ++d) xr[d] = centroid[d] + (centroid[d] - pts[worst][d]);
        const double fr = eval(xr);

        if (fr < fv[best]) {
            for (std::size_t d = 0; d < k; ++d) xe[d] = centroid[d] + 2.0 * (centroid[d] - pts[worst][d]);
            const double fe = eval(xe);
            if (fe < fr) { pts[worst] = xe; fv[worst] = fe; }
            else { pts[worst] = xr; fv[worst] = fr; }
        } else if (fr < fv[second_worst]) {
            pts[worst] = xr;
            fv[worst] = fr;
        } else {
            const bool outside = fr < fv[worst];
            if (outside) {
                for (std::size_t d = 0; d < k; ++d) xc[d] = centroid[d] + 0.5 * (xr[d] - centroid[d]);
            } else {
                for (std::size_t d = 0; d < k; ++d) xc[d] = centroid[d] + 0.5 * (pts[worst][d] - centroid[d]);
            }
            const double fc = eval(xc);
            if (fc < std::min(fr, fv[worst])) {
                pts[worst] = xc;
                fv[worst] = fc;
            } else {
                // shrink toward the best vertex
                for (std::size_t i = 0; i <= k; ++i) {
                    if (i == best) continue;
                    for (std::size_t d = 0; d < k; ++d)
                        pts[i][d] = pts[best][d] + 0.5 * (pts[i][d] - pts[best][d]);
                    fv[i] = eval(pts[i]);
                }
            }
        }
    }

    sort_simplex();
    res.x = pts[order[0]];
    res.value = fv[order[0]];
    return res;
}

}  // namespace atlas
