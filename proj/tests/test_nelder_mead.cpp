#include <doctest.h>

#include <cmath>

#include "atlas/nelder_mead.hpp"

using namespace atlas;

TEST_SUITE("nelder_mead") {

TEST_CASE("1-d quadratic from a cold start") {
    auto obj = [](const std::vector<double>& x) { return (x[0] - 2.0) * (x[0] - 2.0); };
    NelderMeadOptions opt;
    opt.ftol = 1e-12;
    const auto res = nelder_mead_minimize(obj, {0.0}, opt);
    CHECK(res.converged);
    CHECK(res.x[0] == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(res.value < 1e-10);
}

TEST_CASE("Rosenbrock from the classic start") {
    auto obj = [](const std::vector<double>& x) {
        const double a = 1.0 - x[0];
        const double b = x[1] - x[0] * x[0];
        return a * a + 100.0 * b * b;
    };
    NelderMeadOptions opt;
    opt.ftol = 1e-14;
    opt.max_iter = 10000;
    const auto res = nelder_mead_minimize(obj, {-1.2, 1.0}, opt);
    CHECK(res.converged);
    CHECK(res.x[0] == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(res.x[1] == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(res.value < 1e-10);
}

TEST_CASE("NaN in the objective is reported with the evaluation point") {
    // the minimum pulls the simplex straight through the NaN region
    auto obj = [](const std::vector<double>& x) {
        return x[0] < 1.5 ? std::nan("") : x[0] * x[0];
    };
    CHECK_THROWS_WITH_AS(nelder_mead_minimize(obj, {2.0}, {}),
                         doctest::Contains("NaN"), error);
}

TEST_CASE("random positive-definite quadratics reach the analytic minimum") {
    rng64 rng(2024);
    for (int trial = 0; trial < 25; ++trial) {
        // A = M^T M + I, minimize x^T A x + b^T x; x* = -A^{-1} b / 2
        double m00 = rng.next_double() * 2 - 1, m01 = rng.next_double() * 2 - 1;
        double m10 = rng.next_double() * 2 - 1, m11 = rng.next_double() * 2 - 1;
        const double a00 = m00 * m00 + m10 * m10 + 1.0;
        const double a01 = m00 * m01 + m10 * m11;
        const double a11 = m01 * m01 + m11 * m11 + 1.0;
        const double b0 = rng.next_double() * 4 - 2, b1 = rng.next_double() * 4 - 2;
        auto obj = [&](const std::vector<double>& x) {
            return a00 * x[0] * x[0] + 2 * a01 * x[0] * x[1] + a11 * x[1] * x[1] +
                   b0 * x[0] + b1 * x[1];
        };
        // solve 2A x = -b
        const double det = a00 * a11 - a01 * a01;
        const double sx = (-b0 * a11 + b1 * a01) / (2 * det);
        const double sy = (-b1 * a00 + b0 * a01) / (2 * det);
        const double f_star = obj({sx, sy});

        NelderMeadOptions opt;
        opt.ftol = 1e-13;
        opt.max_iter = 4000;
        auto res = nelder_mead_minimize(obj, {rng.next_double() * 6 - 3, rng.next_double() * 6 - 3}, opt);
        res = nelder_mead_minimize(obj, res.x, opt);  // one polish restart
        CHECK(res.converged);
        CHECK(res.value - f_star < 1e-9);
    }
}

}  // TEST_SUITE
