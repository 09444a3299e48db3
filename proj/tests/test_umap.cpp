#include <doctest.h>

#include <algorithm>

#include "atlas/umap.hpp"
#include "support/fixtures.hpp"

using namespace atlas;
using test_support::silhouette;
using test_support::two_cluster_fixture;

TEST_SUITE("umap") {

TEST_CASE("planted two-cluster fixture: separation, trustworthiness, determinism") {
    const auto fx = two_cluster_fixture(50, 1.5, 0.05, 101);
    UmapParams params;
    params.dim = 3;
    params.seed = 42;
    const auto emb = umap_embed(fx.dist, fx.ids, params);
    REQUIRE(emb.size() == 100);

    CHECK(silhouette(emb, fx.labels) > 0.0);
    CHECK(trustworthiness(fx.dist, fx.ids, emb, 15) >= 0.90);

    const auto emb2 = umap_embed(fx.dist, fx.ids, params);
    CHECK(emb.coords == emb2.coords);  // bitwise, same seed

    UmapParams other = params;
    other.seed = 43;
    const auto emb3 = umap_embed(fx.dist, fx.ids, other);
    CHECK(emb.coords != emb3.coords);
}

TEST_CASE("permuting the input order permutes (only) the rows") {
    const auto fx = two_cluster_fixture(15, 1.0, 0.08, 7);
    UmapParams params;
    params.n_neighbors = 5;
    params.n_epochs = 120;
    const auto base = umap_embed(fx.dist, fx.ids, params);

    // reversed presentation order
    const std::size_t n = fx.dist.n;
    std::vector<std::uint32_t> rev_ids(fx.ids.rbegin(), fx.ids.rend());
    auto rev = CondensedDistanceMatrix::zeros(n, "term");
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            rev.set(n - 1 - i, n - 1 - j, fx.dist.at(i, j));
    const auto permuted = umap_embed(rev, rev_ids, params);

    // rows are keyed by id, so the two embeddings agree exactly
    CHECK(base.ids == permuted.ids);
    CHECK(base.coords == permuted.coords);
}

TEST_CASE("coordinates are finite and centered roughly at the data scale") {
    const auto fx = two_cluster_fixture(20, 1.2, 0.1, 55);
    UmapParams params;
    params.n_neighbors = 8;
    params.n_epochs = 200;
    const auto emb = umap_embed(fx.dist, fx.ids, params);
    for (double c : emb.coords) {
        CHECK(std::isfinite(c));
        CHECK(std::abs(c) < 100.0);
    }
}

TEST_CASE("parameter and input validation") {
    const auto fx = two_cluster_fixture(5, 1.0, 0.05, 3);
    UmapParams params;

    UmapParams bad_k = params;
    bad_k.n_neighbors = 1;
    CHECK_THROWS_AS(umap_embed(fx.dist, fx.ids, bad_k), error);

    UmapParams big_k = params;
    big_k.n_neighbors = 10;  // == n
    CHECK_THROWS_AS(umap_embed(fx.dist, fx.ids, big_k), error);

    UmapParams flat = params;
    flat.dim = 1;
    CHECK_THROWS_AS(umap_embed(fx.dist, fx.ids, flat), error);

    auto nan_dist = fx.dist;
    nan_dist.values[0] = std::nan("");
    UmapParams small = params;
    small.n_neighbors = 3;
    CHECK_THROWS_AS(umap_embed(nan_dist, fx.ids, small), error);

    auto dup_ids = fx.ids;
    dup_ids[1] = dup_ids[0];
    CHECK_THROWS_AS(umap_embed(fx.dist, dup_ids, small), error);
}

TEST_CASE("membership curve fit lands near the reference values") {
    // min_dist = 0.1, spread = 1 is known to give a ~ 1.58, b ~ 0.90
    const auto [a, b] = umap_detail::fit_ab(0.1, 1.0);
    CHECK(a == doctest::Approx(1.58).epsilon(0.05));
    CHECK(b == doctest::Approx(0.90).epsilon(0.05));
}

TEST_CASE("trustworthiness is 1 for an embedding that copies the input geometry") {
    const auto fx = two_cluster_fixture(12, 1.5, 0.05, 9);
    TermEmbedding identity;
    identity.dim = 3;
    identity.ids = fx.ids;
    identity.coords = fx.coords;
    identity.rebuild_index();
    CHECK(trustworthiness(fx.dist, fx.ids, identity, 5) == doctest::Approx(1.0).epsilon(1e-12));
}

}  // TEST_SUITE
