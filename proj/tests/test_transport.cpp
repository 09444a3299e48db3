#include <doctest.h>

#include <cmath>
#include <numbers>

#include "atlas/transport.hpp"
#include "support/lp_oracle.hpp"

using namespace atlas;

namespace {

WeightedPointPattern pattern(std::size_t dim, std::vector<double> coords,
                             std::vector<double> masses, std::string owner = "x") {
    WeightedPointPattern p;
    p.dim = dim;
    p.coords = std::move(coords);
    p.masses = std::move(masses);
    p.owner = std::move(owner);
    p.validate();
    return p;
}

WeightedPointPattern random_pattern(std::size_t n, std::size_t dim, rng64& rng) {
    std::vector<double> coords(n * dim), masses(n);
    for (auto& c : coords) c = rng.next_double() * 4.0 - 2.0;
    double total = 0.0;
    for (auto& m : masses) {
        m = 0.05 + rng.next_double();
        total += m;
    }
    for (auto& m : masses) m /= total;
    double sum = 0.0;
    for (double m : masses) sum += m;
    masses.back() += 1.0 - sum;
    return pattern(dim, std::move(coords), std::move(masses));
}

void check_plan_marginals(const TransportPlan& plan, const WeightedPointPattern& a,
                          const WeightedPointPattern& b) {
    std::vector<double> row(a.size(), 0.0), col(b.size(), 0.0);
    for (const auto& f : plan.flows) {
        CHECK(f.mass >= 0.0);
        row[f.source] += f.mass;
        col[f.target] += f.mass;
    }
    for (std::size_t i = 0; i < a.size(); ++i)
        CHECK(std::abs(row[i] - a.masses[i]) < 1e-9);
    for (std::size_t j = 0; j < b.size(); ++j)
        CHECK(std::abs(col[j] - b.masses[j]) < 1e-9);
}

}  // namespace

TEST_SUITE("transport") {

TEST_CASE("hand-solved 2x1 example") {
    const auto a = pattern(2, {0, 0, 1, 0}, {0.5, 0.5});
    const auto b = pattern(2, {0, 0}, {1.0});
    const auto res = wasserstein(a, b);
    CHECK(res.distance == doctest::Approx(std::sqrt(0.5)).epsilon(1e-9));
    CHECK(res.plan.cost == doctest::Approx(0.5).epsilon(1e-12));
    check_plan_marginals(res.plan, a, b);

    OtParams p1;
    p1.p = 1;
    CHECK(wasserstein(a, b, p1).distance == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("identical patterns have exactly zero distance") {
    rng64 rng(11);
    for (int t = 0; t < 10; ++t) {
        const auto a = random_pattern(1 + rng.next_below(12), 3, rng);
        const auto res = wasserstein(a, a);
        CHECK(res.distance == 0.0);
    }
}

TEST_CASE("unit masses at two points: distance is the point distance for p=1,2") {
    const double delta = 1.7;
    const auto a = pattern(3, {0, 0, 0}, {1.0});
    const auto b = pattern(3, {delta, 0, 0}, {1.0});
    for (int p : {1, 2}) {
        OtParams params;
        params.p = p;
        CHECK(wasserstein(a, b, params).distance == doctest::Approx(delta).epsilon(1e-12));
    }
}

TEST_CASE("symmetry is exact and W(a,a) = 0") {
    rng64 rng(22);
    for (int t = 0; t < 20; ++t) {
        const auto a = random_pattern(2 + rng.next_below(9), 3, rng);
        const auto b = random_pattern(2 + rng.next_below(9), 3, rng);
        const double ab = wasserstein(a, b).distance;
        const double ba = wasserstein(b, a).distance;
        CHECK(ab == ba);  // bitwise
    }
}

TEST_CASE("triangle inequality on sampled triples") {
    rng64 rng(33);
    for (int t = 0; t < 200; ++t) {
        const auto a = random_pattern(10, 3, rng);
        const auto b = random_pattern(10, 3, rng);
        const auto c = random_pattern(10, 3, rng);
        const double ab = wasserstein(a, b).distance;
        const double ac = wasserstein(a, c).distance;
        const double cb = wasserstein(c, b).distance;
        CHECK(ab <= ac + cb + 1e-9);
    }
}

TEST_CASE("matches the generic LP oracle on random instances") {
    rng64 rng(44);
    for (int t = 0; t < 40; ++t) {
        const std::size_t m = 2 + rng.next_below(11), n = 2 + rng.next_below(11);
        const auto a = random_pattern(m, 3, rng);
        const auto b = random_pattern(n, 3, rng);
        const auto res = wasserstein(a, b);
        std::vector<double> cost(m * n);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j)
                cost[i * n + j] = ot_detail::ground_cost(a.point(i), b.point(j), 3, 2);
        const double lp = lp_oracle::transport_lp(a.masses, b.masses, cost);
        CHECK(res.plan.cost == doctest::Approx(lp).epsilon(1e-8));
        check_plan_marginals(res.plan, a, b);
    }
}

TEST_CASE("translation invariance and p=2 scaling covariance") {
    rng64 rng(55);
    const auto a = random_pattern(8, 3, rng);
    const auto b = random_pattern(6, 3, rng);
    const double base = wasserstein(a, b).distance;

    auto shifted = [&](const WeightedPointPattern& p, double dx, double dy, double dz) {
        auto q = p;
        for (std::size_t i = 0; i < q.size(); ++i) {
            q.coords[i * 3] += dx;
            q.coords[i * 3 + 1] += dy;
            q.coords[i * 3 + 2] += dz;
        }
        return q;
    };
    const double shifted_dist = wasserstein(shifted(a, 2, -1, 5), shifted(b, 2, -1, 5)).distance;
    CHECK(shifted_dist == doctest::Approx(base).epsilon(1e-12));

    auto scaled = [&](const WeightedPointPattern& p, double s) {
        auto q = p;
        for (auto& c : q.coords) c *= s;
        return q;
    };
    const double s = 3.25;
    CHECK(wasserstein(scaled(a, s), scaled(b, s)).distance ==
          doctest::Approx(s * base).epsilon(1e-12));
}

TEST_CASE("input validation") {
    const auto a = pattern(2, {0, 0}, {1.0});
    const auto b3 = pattern(3, {0, 0, 0}, {1.0});
    CHECK_THROWS_AS(wasserstein(a, b3), error);

    WeightedPointPattern bad;
    bad.dim = 2;
    bad.coords = {0, 0};
    bad.masses = {0.4};  // does not sum to 1
    CHECK_THROWS_AS(wasserstein(a, bad), error);

    OtParams params;
    params.p = 3;
    CHECK_THROWS_AS(wasserstein(a, a, params), error);
}

TEST_CASE("make_point_pattern normalizes over embedded terms only") {
    TermEmbedding emb;
    emb.dim = 2;
    emb.ids = {1, 2};
    emb.coords = {0, 0, 1, 1};
    emb.rebuild_index();

    Vocabulary vocab;
    vocab.terms = {"alpha", "beta", "gamma"};
    vocab.freq = {5, 4, 3};
    vocab.rebuild_index();

    AuthorProfile prof;
    prof.author_id = "au";
    prof.term_counts = {{"alpha", 3}, {"beta", 1}, {"gamma", 100}};  // gamma not embedded
    const auto pat = make_point_pattern(prof, emb, vocab);
    REQUIRE(pat.size() == 2);
    CHECK(pat.masses[0] == doctest::Approx(0.75));
    CHECK(pat.masses[1] == doctest::Approx(0.25));
    CHECK(pat.owner == "au");

    AuthorProfile single;
    single.author_id = "s";
    single.term_counts = {{"alpha", 7}};
    CHECK(make_point_pattern(single, emb, vocab).masses ==
          std::vector<double>{1.0});

    AuthorProfile empty;
    empty.author_id = "ghost";
    empty.term_counts = {{"gamma", 1}};
    CHECK_THROWS_WITH_AS(make_point_pattern(empty, emb, vocab),
                         doctest::Contains("ghost"), error);
}

TEST_CASE("sinkhorn stays above the exact distance") {
    rng64 rng(66);
    OtParams params;
    params.sinkhorn_lambda = 5.0;
    for (int t = 0; t < 30; ++t) {
        const auto a = random_pattern(10, 3, rng);
        const auto b = random_pattern(10, 3, rng);
        const double exact = wasserstein(a, b, params).distance;
        const double approx = sinkhorn(a, b, params);
        CHECK(approx >= exact - 1e-9);
    }
}

TEST_CASE("sinkhorn approaches the two-point example under sharp regularization") {
    const auto a = pattern(2, {0, 0, 1, 0}, {0.5, 0.5});
    const auto b = pattern(2, {0, 0}, {1.0});
    OtParams params;
    params.sinkhorn_lambda = 400.0;
    params.tol = 1e-11;
    const double approx = sinkhorn(a, b, params);
    CHECK(approx == doctest::Approx(std::sqrt(0.5)).epsilon(0.05));
    CHECK(approx >= std::sqrt(0.5) - 1e-9);
}

TEST_CASE("sinkhorn reports non-convergence") {
    rng64 rng(77);
    const auto a = random_pattern(6, 3, rng);
    const auto b = random_pattern(6, 3, rng);
    OtParams params;
    params.max_iter = 1;
    params.tol = 1e-14;
    CHECK_THROWS_WITH_AS(sinkhorn(a, b, params), doctest::Contains("residual"), error);
}

TEST_CASE("pairwise distances: fixtures and thread determinism") {
    const auto p0 = pattern(1, {0}, {1.0}, "a");
    const auto p1 = pattern(1, {1}, {1.0}, "b");
    const auto p3 = pattern(1, {3}, {1.0}, "c");
    const auto w = pairwise_author_distances({p0, p1, p3});
    CHECK(w.at(0, 1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(w.at(1, 2) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(w.at(0, 2) == doctest::Approx(3.0).epsilon(1e-12));

    const auto zeros = pairwise_author_distances({p0, p0, p0});
    for (double v : zeros.values) CHECK(v == 0.0);

    rng64 rng(88);
    std::vector<WeightedPointPattern> pats;
    for (int i = 0; i < 8; ++i) pats.push_back(random_pattern(9, 3, rng));
    OtParams serial, parallel;
    parallel.threads = 4;
    const auto w1 = pairwise_author_distances(pats, serial);
    const auto w2 = pairwise_author_distances(pats, parallel);
    CHECK(w1.values == w2.values);  // bitwise identical regardless of scheduling
}

TEST_CASE("pairwise distances: failures name the offending pair") {
    auto good = pattern(2, {0, 0}, {1.0}, "good");
    auto other = pattern(3, {0, 0, 0}, {1.0}, "odd-one");
    CHECK_THROWS_WITH_AS(pairwise_author_distances({good, good, other}),
                         doctest::Contains("odd-one"), error);
}

TEST_CASE("streamed cost evaluation matches the materialized path") {
    rng64 rng(99);
    const auto a = random_pattern(12, 3, rng);
    const auto b = random_pattern(11, 3, rng);
    OtParams mat, stream;
    stream.memory_budget_bytes = 16;  // force on-the-fly costs
    CHECK(wasserstein(a, b, mat).distance == wasserstein(a, b, stream).distance);
}

TEST_CASE("direct author angular distance") {
    Vocabulary vocab;
    vocab.terms = {"a", "b", "c"};
    vocab.freq = {3, 2, 1};
    vocab.rebuild_index();

    AuthorProfile fa, fb;
    fa.author_id = "fa";
    fb.author_id = "fb";
    fa.term_counts = {{"a", 1}, {"b", 1}};
    fb.term_counts = {{"a", 1}, {"c", 1}};
    CHECK(direct_author_angular_distance(fa, fb, vocab) ==
          doctest::Approx(std::numbers::pi / 3).epsilon(1e-12));

    CHECK(direct_author_angular_distance(fa, fa, vocab) ==
          doctest::Approx(0.0).epsilon(1e-12));

    AuthorProfile fc;
    fc.author_id = "fc";
    fc.term_counts = {{"c", 2}};
    AuthorProfile fd;
    fd.author_id = "fd";
    fd.term_counts = {{"b", 5}};
    CHECK(direct_author_angular_distance(fc, fd, vocab) ==
          doctest::Approx(std::numbers::pi / 2).epsilon(1e-12));

    AuthorProfile empty;
    empty.author_id = "void";
    CHECK_THROWS_WITH_AS(direct_author_angular_distance(empty, fa, vocab),
                         doctest::Contains("void"), error);
}

}  // TEST_SUITE
