#include <doctest.h>

#include <cmath>

#include "atlas/graph.hpp"
#include "support/graph_oracles.hpp"

using namespace atlas;
namespace oracle = graph_oracles;

namespace {

CondensedDistanceMatrix matrix_from(std::size_t n, std::vector<double> upper) {
    CondensedDistanceMatrix m = CondensedDistanceMatrix::zeros(n, "author");
    REQUIRE(upper.size() == m.values.size());
    m.values = std::move(upper);
    return m;
}

UndirectedGraph graph_from_edges(std::size_t n,
                                 std::vector<std::pair<std::size_t, std::size_t>> edges) {
    Adjacency a = Adjacency::zeros(n);
    for (auto [u, v] : edges) {
        a.set(u, v, true);
        a.set(v, u, true);
    }
    return UndirectedGraph::from_adjacency(a);
}

CondensedDistanceMatrix random_distance_matrix(std::size_t n, rng64& rng) {
    auto m = CondensedDistanceMatrix::zeros(n, "author");
    for (auto& v : m.values) v = 0.05 + rng.next_double();
    return m;
}

}  // namespace

TEST_SUITE("graph") {

TEST_CASE("epsilon threshold is the max over nearest-neighbor distances") {
    // three far-apart pairs with internal distances 0.3, 0.5, 0.4
    auto m = CondensedDistanceMatrix::zeros(6, "author");
    for (auto& v : m.values) v = 10.0;
    m.set(0, 1, 0.3);
    m.set(2, 3, 0.5);
    m.set(4, 5, 0.4);
    CHECK(epsilon_threshold(m) == doctest::Approx(0.5));

    const auto two = matrix_from(2, {0.77});
    CHECK(epsilon_threshold(two) == doctest::Approx(0.77));
    CHECK_THROWS_AS(epsilon_threshold(matrix_from(1, {})), error);
}

TEST_CASE("knn adjacency: k=1 gives one out-edge per vertex") {
    const auto m = matrix_from(3, {0.2, 0.9, 0.4});  // d01=.2 d02=.9 d12=.4
    const double eps = epsilon_threshold(m);
    const auto a = knn_adjacency(m, eps, 1);
    std::size_t out0 = a.at(0, 1) + a.at(0, 2);
    CHECK(out0 == 1);
    CHECK(a.at(0, 1));
    CHECK(a.at(1, 0));
    CHECK(a.at(2, 1));  // 2's nearest is 1 (0.4 <= eps)
}

TEST_CASE("knn adjacency: k >= n-1 reduces to thresholding") {
    rng64 rng(5);
    const auto m = random_distance_matrix(7, rng);
    const double eps = 0.6;
    const auto a = knn_adjacency(m, eps, 10);
    for (std::size_t i = 0; i < 7; ++i)
        for (std::size_t j = 0; j < 7; ++j) {
            if (i == j) continue;
            CHECK(a.at(i, j) == (m.at(i, j) <= eps));
        }
}

TEST_CASE("knn adjacency is not commutative") {
    // 1's two nearest are 2 and 3; 0's nearest is 1
    auto m = CondensedDistanceMatrix::zeros(4, "author");
    m.set(0, 1, 0.5);
    m.set(0, 2, 2.0);
    m.set(0, 3, 2.1);
    m.set(1, 2, 0.2);
    m.set(1, 3, 0.3);
    m.set(2, 3, 0.25);
    const auto a = knn_adjacency(m, 10.0, 2);
    CHECK(a.at(0, 1));
    CHECK_FALSE(a.at(1, 0));
}

TEST_CASE("knn kth-place ties break by author id") {
    auto m = CondensedDistanceMatrix::zeros(3, "author");
    m.set(0, 1, 0.5);
    m.set(0, 2, 0.5);
    m.set(1, 2, 0.9);
    const std::vector<std::string> ids = {"m", "z", "b"};
    const auto a = knn_adjacency(m, 1.0, 1, &ids);
    CHECK(a.at(0, 2));  // "b" < "z"
    CHECK_FALSE(a.at(0, 1));
}

TEST_CASE("symmetrize: max of A and its transpose") {
    Adjacency a = Adjacency::zeros(3);
    a.set(0, 1, true);
    const auto s = symmetrize(a);
    CHECK(s.at(0, 1));
    CHECK(s.at(1, 0));
    CHECK(s.is_symmetric());
    CHECK(symmetrize(s).cells == s.cells);  // idempotent

    rng64 rng(6);
    for (int t = 0; t < 20; ++t) {
        Adjacency r = Adjacency::zeros(8);
        for (std::size_t i = 0; i < 8; ++i)
            for (std::size_t j = 0; j < 8; ++j)
                if (i != j && rng.next_double() < 0.3) r.set(i, j, true);
        const auto rs = symmetrize(r);
        CHECK(rs.is_symmetric());
        std::size_t union_edges = 0, sym_edges = 0;
        for (std::size_t i = 0; i < 8; ++i)
            for (std::size_t j = i + 1; j < 8; ++j) {
                if (r.at(i, j) || r.at(j, i)) ++union_edges;
                if (rs.at(i, j)) ++sym_edges;
            }
        CHECK(sym_edges == union_edges);
    }
}

TEST_CASE("epsilon + knn + symmetrize leaves no isolated vertex") {
    rng64 rng(7);
    for (int t = 0; t < 50; ++t) {
        const auto m = random_distance_matrix(20, rng);
        const auto g = build_author_graph(m, std::vector<std::string>(20, ""), 3).graph();
        for (std::size_t v = 0; v < g.n; ++v) CHECK(g.degree(v) >= 1);
    }
}

TEST_CASE("louvain: two triangles joined by a bridge split into the cliques") {
    const auto g = graph_from_edges(
        6, {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}, {2, 3}});
    const auto part = louvain(g, 1);
    CHECK(part.assignment[0] == part.assignment[1]);
    CHECK(part.assignment[1] == part.assignment[2]);
    CHECK(part.assignment[3] == part.assignment[4]);
    CHECK(part.assignment[4] == part.assignment[5]);
    CHECK(part.assignment[0] != part.assignment[3]);
    CHECK(part.q == doctest::Approx(oracle::exhaustive_best_q(g)).epsilon(1e-12));
}

TEST_CASE("louvain: single clique collapses to one community") {
    const auto g = graph_from_edges(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});
    const auto part = louvain(g, 3);
    CHECK(part.n_communities() == 1);
    CHECK(part.q == doctest::Approx(0.0));
}

TEST_CASE("louvain: edgeless graph gives singletons with Q = 0") {
    UndirectedGraph g;
    g.n = 5;
    g.adj.assign(5, {});
    const auto part = louvain(g, 9);
    CHECK(part.n_communities() == 5);
    CHECK(part.q == 0.0);
}

TEST_CASE("two disjoint edges: Q = 0.5 for the two-edge partition") {
    const auto g = graph_from_edges(4, {{0, 1}, {2, 3}});
    CHECK(modularity(g, {0, 0, 1, 1}) == doctest::Approx(0.5).epsilon(1e-12));
    const auto part = louvain(g, 12);
    CHECK(part.q == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("modularity: all-in-one community is 0; matches the oracle on random graphs") {
    rng64 rng(13);
    for (int t = 0; t < 25; ++t) {
        const std::size_t n = 4 + rng.next_below(6);
        Adjacency a = Adjacency::zeros(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (rng.next_double() < 0.4) {
                    a.set(i, j, true);
                    a.set(j, i, true);
                }
        const auto g = UndirectedGraph::from_adjacency(a);
        if (g.n_edges == 0) continue;
        CHECK(modularity(g, std::vector<int>(n, 0)) == doctest::Approx(0.0).epsilon(1e-12));
        std::vector<int> part(n);
        for (auto& p : part) p = int(rng.next_below(3));
        CHECK(modularity(g, part) == doctest::Approx(oracle::q_oracle(g, part)).epsilon(1e-12));
    }
}

TEST_CASE("louvain replicate Q matches the independent oracle recomputation") {
    rng64 rng(21);
    for (int t = 0; t < 15; ++t) {
        const std::size_t n = 5 + rng.next_below(10);
        Adjacency a = Adjacency::zeros(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (rng.next_double() < 0.35) {
                    a.set(i, j, true);
                    a.set(j, i, true);
                }
        const auto g = UndirectedGraph::from_adjacency(a);
        if (g.n_edges == 0) continue;
        const auto part = louvain(g, rng.next());
        CHECK(part.q == doctest::Approx(oracle::q_oracle(g, part.assignment)).epsilon(1e-12));
    }
}

TEST_CASE("louvain best-of-20 reaches 95% of the exhaustive optimum (n <= 6)") {
    for (std::size_t n = 2; n <= 6; ++n) {
        const auto graphs = oracle::connected_graphs(n);
        for (auto mask : graphs) {
            const auto g = oracle::graph_from_mask(mask, n);
            const double best = oracle::exhaustive_best_q(g);
            const auto louv = louvain_best(g, 20, 77);
            if (best <= 0.0) {
                CHECK(louv.best.q >= best - 1e-12);
            } else {
                CHECK(louv.best.q >= 0.95 * best - 1e-12);
            }
        }
    }
}

TEST_CASE("graph enumeration counts match the literature for small n") {
    CHECK(oracle::connected_graphs(2).size() == 1);
    CHECK(oracle::connected_graphs(3).size() == 2);
    CHECK(oracle::connected_graphs(4).size() == 6);
    CHECK(oracle::connected_graphs(5).size() == 21);
    CHECK(oracle::connected_graphs(6).size() == 112);
}

TEST_CASE("adjusted Rand index") {
    Partition p1, p2;
    p1.assignment = {0, 0, 0, 1, 1, 1};
    p2.assignment = {0, 0, 0, 1, 1, 1};
    CHECK(adjusted_rand_index(p1, p2) == doctest::Approx(1.0));

    Partition singles, lump;
    singles.assignment = {0, 1, 2, 3, 4, 5};
    lump.assignment = {0, 0, 0, 0, 0, 0};
    CHECK(adjusted_rand_index(singles, lump) == doctest::Approx(0.0));

    // contingency [[2,1],[1,2]] -> ARI = -1/9
    Partition a, b;
    a.assignment = {0, 0, 0, 1, 1, 1};
    b.assignment = {0, 0, 1, 0, 1, 1};
    CHECK(adjusted_rand_index(a, b) == doctest::Approx(-1.0 / 9.0).epsilon(1e-12));
    CHECK(adjusted_rand_index(b, a) == doctest::Approx(adjusted_rand_index(a, b)));

    // invariance to relabeling
    Partition relabeled = b;
    for (auto& c : relabeled.assignment) c = 1 - c;
    CHECK(adjusted_rand_index(a, relabeled) == doctest::Approx(adjusted_rand_index(a, b)));

    Partition wrong;
    wrong.assignment = {0, 0};
    CHECK_THROWS_AS(adjusted_rand_index(a, wrong), error);
}

TEST_CASE("closeness centrality: path, clique, flags") {
    const auto path = graph_from_edges(3, {{0, 1}, {1, 2}});
    const auto c = closeness_centrality(path);
    CHECK(*c.value[0] == doctest::Approx(1.0 / 3.0));
    CHECK(*c.value[1] == doctest::Approx(1.0 / 2.0));
    CHECK(*c.value[2] == doctest::Approx(1.0 / 3.0));

    const auto k4 = graph_from_edges(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});
    for (const auto& v : closeness_centrality(k4).value)
        CHECK(*v == doctest::Approx(1.0 / 3.0));

    // one isolated vertex next to an edge
    const auto mixed = graph_from_edges(3, {{0, 1}});
    const auto cm = closeness_centrality(mixed);
    CHECK_FALSE(cm.value[2].has_value());
    CHECK_FALSE(cm.in_giant[2]);
    CHECK(cm.in_giant[0]);
}

TEST_CASE("closeness matches a brute-force BFS oracle on random graphs") {
    rng64 rng(31);
    for (int t = 0; t < 10; ++t) {
        const std::size_t n = 10 + rng.next_below(41);
        Adjacency a = Adjacency::zeros(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (rng.next_double() < 0.08) {
                    a.set(i, j, true);
                    a.set(j, i, true);
                }
        const auto g = UndirectedGraph::from_adjacency(a);
        const auto c = closeness_centrality(g);
        for (std::size_t v = 0; v < n; ++v) {
            // Floyd-free oracle: BFS by hand
            std::vector<int> dist(n, -1);
            std::vector<std::size_t> q = {v};
            dist[v] = 0;
            for (std::size_t h = 0; h < q.size(); ++h)
                for (auto w : g.adj[q[h]])
                    if (dist[w] < 0) {
                        dist[w] = dist[q[h]] + 1;
                        q.push_back(w);
                    }
            long long total = 0;
            for (std::size_t u = 0; u < n; ++u)
                if (u != v && dist[u] > 0) total += dist[u];
            if (total == 0) {
                CHECK_FALSE(c.value[v].has_value());
            } else {
                CHECK(*c.value[v] == doctest::Approx(1.0 / double(total)).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("within-cluster distance: fixtures") {
    const auto path = graph_from_edges(3, {{0, 1}, {1, 2}});

    // group 0 = {0,1} adjacent; group 1 = {2}
    auto res = within_cluster_distance(path, {0, 0, 1}, 2);
    CHECK(*res[0].mean == doctest::Approx(1.0));
    CHECK_FALSE(res[1].mean.has_value());  // singleton

    // all three on the path: mean(1,1,2) = 4/3
    res = within_cluster_distance(path, {0, 0, 0}, 1);
    CHECK(*res[0].mean == doctest::Approx(4.0 / 3.0));

    // unreachable pair excluded by default, fatal under Error policy
    const auto split = graph_from_edges(4, {{0, 1}, {2, 3}});
    res = within_cluster_distance(split, {0, 0, 0, 1}, 2);
    CHECK(res[0].n_unreachable == 2);
    CHECK(*res[0].mean == doctest::Approx(1.0));
    CHECK_THROWS_AS(
        within_cluster_distance(split, {0, 0, 0, 1}, 2, UnreachablePairs::Error), error);
}

TEST_CASE("permutation null: aligned labels sit below the 5th percentile") {
    // two 6-cliques joined by one edge; labels follow the cliques
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = i + 1; j < 6; ++j) {
            edges.push_back({i, j});
            edges.push_back({i + 6, j + 6});
        }
    edges.push_back({5, 6});
    const auto g = graph_from_edges(12, edges);
    std::vector<int> labels(12, 0);
    for (std::size_t i = 6; i < 12; ++i) labels[i] = 1;

    const auto null = permutation_null(g, labels, 2, 500, 404);
    REQUIRE(null.groups.size() == 2);
    for (const auto& grp : null.groups) {
        REQUIRE(grp.observed.has_value());
        CHECK(*grp.observed < grp.q05);
        CHECK(grp.p_leq < 0.05);
    }

    const auto tiny = permutation_null(g, labels, 2, 1, 1);  // degenerate but legal
    CHECK(tiny.n_reps == 1);
    CHECK(tiny.groups[0].n_valid == 1);
}

TEST_CASE("degree stats") {
    const auto k4 = graph_from_edges(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});
    auto s = degree_stats(k4);
    CHECK(s.min == 3);
    CHECK(s.max == 3);
    CHECK(s.mean == doctest::Approx(3.0));

    const auto path = graph_from_edges(3, {{0, 1}, {1, 2}});
    s = degree_stats(path);
    CHECK(s.min == 1);
    CHECK(s.max == 2);
    CHECK(s.mean == doctest::Approx(4.0 / 3.0));
}

TEST_CASE("characteristic words: the Table-2 score") {
    std::map<std::string, std::uint64_t> global = {
        {"alpha", 50}, {"beta", 25}, {"gamma", 20}, {"rare", 5}};
    // cluster uses alpha at relative frequency 0.10 against global 0.02
    // construct: global total 100 -> f(rare)=0.05; cluster: rare 10/100=0.1
    std::map<std::string, std::uint64_t> cluster = {
        {"alpha", 40}, {"beta", 30}, {"gamma", 20}, {"rare", 10}};
    const auto out = characteristic_words({cluster}, global, 10, 1);
    REQUIRE(out.size() == 1);
    // score(rare) = (0.10 - 0.05)/0.05 = 1.0 -> top ranked
    CHECK(out[0][0].term == "rare");
    CHECK(out[0][0].score == doctest::Approx(1.0).epsilon(1e-12));
    // score(gamma) = (0.2 - 0.2)/0.2 = 0
    for (const auto& sw : out[0])
        if (sw.term == "gamma") CHECK(sw.score == doctest::Approx(0.0).epsilon(1e-12));

    // min_global_count suppresses rare words
    const auto filtered = characteristic_words({cluster}, global, 10, 6);
    for (const auto& sw : filtered[0]) CHECK(sw.term != "rare");

    CHECK_THROWS_AS(characteristic_words({{}}, global, 5), error);
}

TEST_CASE("characteristic words: planted cluster-exclusive vocabulary wins") {
    std::map<std::string, std::uint64_t> global;
    std::vector<std::map<std::string, std::uint64_t>> clusters(3);
    for (int c = 0; c < 3; ++c) {
        const std::string planted = "planted" + std::to_string(c);
        clusters[c][planted] = 30;
        global[planted] += 30;
        for (int w = 0; w < 8; ++w) {
            const std::string shared = "shared" + std::to_string(w);
            clusters[c][shared] = 20;
            global[shared] += 20;
        }
    }
    const auto out = characteristic_words(clusters, global, 3, 5);
    for (int c = 0; c < 3; ++c) {
        bool found = false;
        for (const auto& sw : out[c]) found |= sw.term == "planted" + std::to_string(c);
        CHECK(found);
        CHECK(out[c][0].term == "planted" + std::to_string(c));
    }
}

}  // TEST_SUITE
