#pragma once

// Generic dense two-phase tableau simplex with Bland's rule, used as an
// independent oracle for the transportation solver. Solves
//   min c.x  s.t.  A x = b, x >= 0,  b >= 0
// Small and slow on purpose; sized for <= ~30 constraints.

#include <cmath>
#include <stdexcept>
#include <vector>

namespace lp_oracle {

class DenseLp {
public:
    DenseLp(std::vector<std::vector<double>> a, std::vector<double> b, std::vector<double> c)
        : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)) {}

    double solve() {
        const std::size_t m = a_.size(), n = c_.size();
        // tableau: m rows x (n originals + m artificials + rhs)
        tab_.assign(m, std::vector<double>(n + m + 1, 0.0));
        basis_.assign(m, 0);
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < n; ++j) tab_[i][j] = a_[i][j];
            tab_[i][n + i] = 1.0;
            tab_[i][n + m] = b_[i];
            basis_[i] = n + i;
        }

        // phase 1: minimize the sum of artificials
        std::vector<double> phase1_cost(n + m, 0.0);
        for (std::size_t j = n; j < n + m; ++j) phase1_cost[j] = 1.0;
        run(phase1_cost, n + m);
        if (objective(phase1_cost) > 1e-9) throw std::runtime_error("lp oracle: infeasible");

        // drive artificials out of the basis where possible
        for (std::size_t i = 0; i < m; ++i) {
            if (basis_[i] < n) continue;
            for (std::size_t j = 0; j < n; ++j)
                if (std::abs(tab_[i][j]) > 1e-9) {
                    pivot(i, j);
                    break;
                }
        }

        // phase 2: original objective, artificials barred from entering
        std::vector<double> phase2_cost(n + m, 0.0);
        for (std::size_t j = 0; j < n; ++j) phase2_cost[j] = c_[j];
        run(phase2_cost, n);
        return objective(phase2_cost);
    }

private:
    std::vector<std::vector<double>> a_;
    std::vector<double> b_, c_;
    std::vector<std::vector<double>> tab_;
    std::vector<std::size_t> basis_;

    double objective(const std::vector<double>& cost) const {
        double v = 0.0;
        for (std::size_t i = 0; i < basis_.size(); ++i)
            v += cost[basis_[i]] * tab_[i].back();
        return v;
    }

    void pivot(std::size_t row, std::size_t col) {
        const double p = tab_[row][col];
        for (auto& v : tab_[row]) v /= p;
        for (std::size_t i = 0; i < tab_.size(); ++i) {
            if (i == row) continue;
            const double f = tab_[i][col];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < tab_[i].size(); ++j) tab_[i][j] -= f * tab_[row][j];
        }
        basis_[row] = col;
    }

    // Bland's rule simplex on the current tableau; candidate columns are
    // 0..n_enterable-1.
    void run(const std::vector<double>& cost, std::size_t n_enterable) {
        const std::size_t m = tab_.size();
        for (std::size_t guard = 0; guard < 100000; ++guard) {
            // reduced costs via the basis cost vector
            std::size_t enter = n_enterable;
            for (std::size_t j = 0; j < n_enterable; ++j) {
                double z = 0.0;
                for (std::size_t i = 0; i < m; ++i) z += cost[basis_[i]] * tab_[i][j];
                if (cost[j] - z < -1e-11) {
                    enter = j;
                    break;  // Bland: lowest index
                }
            }
            if (enter == n_enterable) return;  // optimal

            std::size_t leave = m;
            double best_ratio = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                if (tab_[i][enter] <= 1e-11) continue;
                const double ratio = tab_[i].back() / tab_[i][enter];
                if (leave == m || ratio < best_ratio - 1e-15 ||
                    (std::abs(ratio - best_ratio) <= 1e-15 && basis_[i] < basis_[leave])) {
                    leave = i;
                    best_ratio = ratio;
                }
            }
            if (leave == m) throw std::runtime_error("lp oracle: unbounded");
            pivot(leave, enter);
        }
        throw std::runtime_error("lp oracle: iteration guard tripped");
    }
};

// Optimal transportation cost for marginals a, b and dense cost matrix
// cost[i*n + j].
inline double transport_lp(const std::vector<double>& a, const std::vector<double>& b,
                           const std::vector<double>& cost) {
    const std::size_t m = a.size(), n = b.size();
    std::vector<std::vector<double>> rows(m + n, std::vector<double>(m * n, 0.0));
    std::vector<double> rhs(m + n, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) rows[i][i * n + j] = 1.0;
        rhs[i] = a[i];
    }
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < m; ++i) rows[m + j][i * n + j] = 1.0;
        rhs[m + j] = b[j];
    }
    DenseLp lp(std::move(rows), std::move(rhs), cost);
    return lp.solve();
}

}  // namespace lp_oracle
