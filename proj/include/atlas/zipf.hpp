#pragma once

#include <cmath>
#include <vector>

#include "atlas/nelder_mead.hpp"
#include "atlas/textproc.hpp"

namespace atlas {

// Rank-frequency model f_i = C * (i + beta)^(-alpha).
struct ZipfFit {
    double C = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    double sse = 0.0;  // least-squares objective at the optimum (log-log scale)
};

struct ZipfFitOptions {
    double ftol = 1e-14;
    std::size_t max_iter = 20000;
    std::size_t restarts = 4;  // re-run from the optimum until no further improvement
};

inline double zipf_loglog_sse(const std::vector<double>& log_freq,
                              double log_c, double alpha, double beta) {
    double sse = 0.0;
    for (std::size_t i = 0; i < log_freq.size(); ++i) {
        const double predicted = log_c - alpha * std::log(double(i + 1) + beta);
        const double r = log_freq[i] - predicted;
        sse += r * r;
    }
    return sse;
}

// Least-squares fit of (log C, alpha, beta) to the observed log-log
// rank-frequency curve. Start point: alpha=1, beta=1, log C = log f_1.
inline ZipfFit fit_zipf_mandelbrot(const std::vector<double>& freq,
                                   const ZipfFitOptions& opt = {}) {
    if (freq.size() < 3) throw error("fit_zipf_mandelbrot: need at least 3 ranks");
    {
        std::size_t distinct = 1;
        for (std::size_t i = 1; i < freq.size(); ++i)
            if (freq[i] != freq[i - 1]) ++distinct;
        if (distinct < 3)
            throw error("fit_zipf_mandelbrot: need at least 3 distinct frequencies");
    }
    for (double f : freq)
        if (!(f > 0.0)) throw error("fit_zipf_mandelbrot: frequencies must be positive");

    std::vector<double> log_freq(freq.size());
    for (std::size_t i = 0; i < freq.size(); ++i) log_freq[i] = std::log(freq[i]);

    auto objective = [&](const std::vector<double>& theta) {
        const double log_c = theta[0], alpha = theta[1], beta = theta[2];
        if (!(alpha > 0.0) || !(beta > -1.0 + 1e-12)) return 1e100;
        return zipf_loglog_sse(log_freq, log_c, alpha, beta);
    };

    NelderMeadOptions nm;
    nm.ftol = opt.ftol;
    nm.max_iter = opt.max_iter;

    std::vector<double> start = {log_freq[0], 1.0, 1.0};
    NelderMeadResult best = nelder_mead_minimize(objective, start, nm);
    for (std::size_t r = 0; r < opt.restarts; ++r) {
        NelderMeadResult next = nelder_mead_minimize(objective, best.x, nm);
        const bool improved = next.value < best.value - 1e-15;
        if (next.value < best.value) best = std::move(next);
        if (!improved) break;
    }
    if (!best.converged)
        throw error("fit_zipf_mandelbrot: optimizer did not converge; best point logC=" +
                    std::to_string(best.x[0]) + " alpha=" + std::to_string(best.x[1]) +
                    " beta=" + std::to_string(best.x[2]) +
                    " sse=" + std::to_string(best.value));

    ZipfFit fit;
    fit.C = std::exp(best.x[0]);
    fit.alpha = best.x[1];
    fit.beta = best.x[2];
    fit.sse = best.value;
    return fit;
}

inline ZipfFit fit_zipf_mandelbrot(const Vocabulary& vocab, const ZipfFitOptions& opt = {}) {
    std::vector<double> freq(vocab.freq.begin(), vocab.freq.end());
    return fit_zipf_mandelbrot(freq, opt);
}

// Frequencies the fitted model predicts at ranks 1..n; used for the
// rank/observed/fitted export consumed by external log-log plotting.
inline std::vector<double> zipf_predicted(const ZipfFit& fit, std::size_t n) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = fit.C * std::pow(double(i + 1) + fit.beta, -fit.alpha);
    return out;
}

}  // namespace atlas
