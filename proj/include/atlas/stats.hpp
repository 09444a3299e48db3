#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "atlas/common.hpp"

namespace atlas {

// word1 x word2 presence cross-tab over documents:
//            word2   !word2
//   word1      a       b
//   !word1     c       d
struct ContingencyTable2x2 {
    std::uint64_t a = 0, b = 0, c = 0, d = 0;
    std::uint64_t total() const { return a + b + c + d; }
};

struct FisherResult {
    double odds_ratio = 0.0;
    double ci95_low = 0.0;
    double ci95_high = 0.0;
    double p_two_sided = 1.0;
};

namespace detail {

inline double log_choose(std::uint64_t n, std::uint64_t k) {
    return std::lgamma(double(n) + 1.0) - std::lgamma(double(k) + 1.0) -
           std::lgamma(double(n - k) + 1.0);
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace detail

// Two-sided p sums hypergeometric probabilities of all tables (with the
// observed margins) no more probable than the observed one, with the usual
// 1+1e-7 slack on the comparison so mirror-image tables are not lost to
// floating-point noise. OR is the sample odds ratio ad/bc with a log-normal
// 95% CI; a single zero cell gets the Haldane-Anscombe 0.5 correction for
// the OR/CI only, never for p.
inline FisherResult fisher_exact(const ContingencyTable2x2& t) {
    const std::uint64_t r1 = t.a + t.b, r2 = t.c + t.d;
    const std::uint64_t c1 = t.a + t.c, c2 = t.b + t.d;
    if (r1 == 0 || r2 == 0 || c1 == 0 || c2 == 0)
        throw error("fisher_exact: degenerate table (zero margin)");
    const std::uint64_t n = t.total();

    const double log_denom = detail::log_choose(n, r1);
    auto log_prob = [&](std::uint64_t k) {
        return detail::log_choose(c1, k) + detail::log_choose(c2, r1 - k) - log_denom;
    };

    const std::uint64_t k_lo = (r1 > c2) ? r1 - c2 : 0;
    const std::uint64_t k_hi = std::min(r1, c1);
    const double p_obs = std::exp(log_prob(t.a));
    double p_sum = 0.0;
    for (std::uint64_t k = k_lo; k <= k_hi; ++k) {
        const double p = std::exp(log_prob(k));
        if (p <= p_obs * (1.0 + 1e-7)) p_sum += p;
    }

    FisherResult res;
    res.p_two_sided = std::min(1.0, p_sum);

    const std::uint64_t zeros = (t.a == 0) + (t.b == 0) + (t.c == 0) + (t.d == 0);
    double a = double(t.a), b = double(t.b), c = double(t.c), d = double(t.d);
    if (zeros == 1) { a += 0.5; b += 0.5; c += 0.5; d += 0.5; }
    res.odds_ratio = (a * d) / (b * c);
    const double se = std::sqrt(1.0 / a + 1.0 / b + 1.0 / c + 1.0 / d);
    res.ci95_low = std::exp(std::log(res.odds_ratio) - 1.96 * se);
    res.ci95_high = std::exp(std::log(res.odds_ratio) + 1.96 * se);
    return res;
}

// Mid-ranks: ties receive the average of the ranks they span.
inline std::vector<double> midranks(const std::vector<double>& v) {
    const std::size_t n = v.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return v[i] < v[j]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
        const double r = 0.5 * (double(i + 1) + double(j + 1));
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
        i = j + 1;
    }
    return ranks;
}

struct SpearmanResult {
    double rho = 0.0;
    double ci95_low = -1.0;
    double ci95_high = 1.0;
};

// Pearson correlation of mid-ranks; CI by the Fisher z-transform with
// variance 1.06/(n-3) (Bonett-Wright convention for Spearman).
inline SpearmanResult spearman(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw error("spearman: length mismatch");
    const std::size_t n = x.size();
    if (n < 3) throw error("spearman: need at least 3 pairs");

    const auto rx = midranks(x), ry = midranks(y);
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) { mx += rx[i]; my += ry[i]; }
    mx /= double(n);
    my /= double(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) throw error("spearman: zero rank variance");

    SpearmanResult res;
    res.rho = sxy / std::sqrt(sxx * syy);
    if (n <= 3) return res;  // CI left at (-1, 1): zero degrees of freedom for the z variance
    if (std::abs(res.rho) >= 1.0) {
        res.ci95_low = res.ci95_high = res.rho;
        return res;
    }
    const double z = std::atanh(res.rho);
    const double se = std::sqrt(1.06 / double(n - 3));
    res.ci95_low = std::tanh(z - 1.96 * se);
    res.ci95_high = std::tanh(z + 1.96 * se);
    return res;
}

struct WilcoxonResult {
    double statistic = 0.0;  // W+ = sum of ranks of positive differences
    double p_two_sided = 1.0;
    std::size_t n_used = 0;  // pairs remaining after dropping zero differences
    bool exact = false;
};

// Paired signed-rank test. Zero differences are dropped; |differences| are
// mid-ranked. Exact two-sided p by enumerating the 2^n sign assignments
// (as a rank-sum DP) for n <= 25, normal approximation with tie correction
// and continuity correction above that.
inline WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& x,
                                           const std::vector<double>& y) {
    if (x.size() != y.size()) throw error("wilcoxon_signed_rank: length mismatch");
    std::vector<double> diffs;
    diffs.reserve(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        if (d != 0.0) diffs.push_back(d);
    }
    if (diffs.empty()) throw error("wilcoxon_signed_rank: no nonzero pairs");

    const std::size_t n = diffs.size();
    std::vector<double> absd(n);
    for (std::size_t i = 0; i < n; ++i) absd[i] = std::abs(diffs[i]);
    const auto ranks = midranks(absd);

    double w_plus = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        if (diffs[i] > 0.0) w_plus += ranks[i];

    WilcoxonResult res;
    res.statistic = w_plus;
    res.n_used = n;

    if (n <= 25) {
        res.exact = true;
        // doubled mid-ranks are integers; dp[s] = #sign assignments with 2*W+ == s
        std::vector<std::int64_t> r2(n);
        std::int64_t total2 = 0;
        for (std::size_t i = 0; i < n; ++i) {
            r2[i] = std::llround(2.0 * ranks[i]);
            total2 += r2[i];
        }
        std::vector<double> dp(static_cast<std::size_t>(total2) + 1, 0.0);
        dp[0] = 1.0;
        std::int64_t reach = 0;
        for (std::size_t i = 0; i < n; ++i) {
            reach += r2[i];
            for (std::int64_t s = reach; s >= r2[i]; --s)
                dp[static_cast<std::size_t>(s)] += dp[static_cast<std::size_t>(s - r2[i])];
        }
        const double denom = std::ldexp(1.0, static_cast<int>(n));  // 2^n
        const std::int64_t w2 = std::llround(2.0 * w_plus);
        double p_le = 0.0, p_ge = 0.0;
        for (std::int64_t s = 0; s <= total2; ++s) {
            if (s <= w2) p_le += dp[static_cast<std::size_t>(s)];
            if (s >= w2) p_ge += dp[static_cast<std::size_t>(s)];
        }
        res.p_two_sided = std::min(1.0, 2.0 * std::min(p_le, p_ge) / denom);
    } else {
        const double nd = double(n);
        const double mu = nd * (nd + 1.0) / 4.0;
        double tie_term = 0.0;
        {
            std::vector<double> sorted = absd;
            std::sort(sorted.begin(), sorted.end());
            std::size_t i = 0;
            while (i < sorted.size()) {
                std::size_t j = i;
                while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
                const double t = double(j - i + 1);
                tie_term += t * t * t - t;
                i = j + 1;
            }
        }
        const double var = nd * (nd + 1.0) * (2.0 * nd + 1.0) / 24.0 - tie_term / 48.0;
        double diff = w_plus - mu;
        diff -= (diff > 0) ? 0.5 : (diff < 0 ? -0.5 : 0.0);
        const double z = diff / std::sqrt(var);
        res.p_two_sided = std::min(1.0, 2.0 * detail::normal_cdf(-std::abs(z)));
    }
    return res;
}

}  // namespace atlas
