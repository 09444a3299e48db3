#include <doctest.h>

#include <set>

#include "atlas/docterm.hpp"

using namespace atlas;

namespace {

Vocabulary vocab_of(std::vector<std::string> terms) {
    Vocabulary v;
    v.terms = std::move(terms);
    v.freq.assign(v.terms.size(), 1);
    v.rebuild_index();
    return v;
}

SparseDocTermMatrix matrix_of(std::size_t n_terms,
                              std::vector<std::vector<std::uint32_t>> rows) {
    SparseDocTermMatrix x;
    x.n_terms = n_terms;
    x.rows = std::move(rows);
    x.doc_record.assign(x.rows.size(), "");
    x.doc_author.assign(x.rows.size(), "");
    return x;
}

}  // namespace

TEST_SUITE("docterm") {

TEST_CASE("build_matrix binarizes and drops out-of-vocabulary docs") {
    std::vector<TermList> docs = {{0, {"a", "a", "b"}}, {1, {"c"}}};
    std::vector<std::string> warnings;
    const auto x = build_matrix(docs, vocab_of({"a", "b"}), {}, &warnings);
    REQUIRE(x.n_docs() == 1);
    CHECK(x.rows[0] == std::vector<std::uint32_t>{1, 2});
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].find("document 1") != std::string::npos);
}

TEST_CASE("repeated terms still produce a single presence entry") {
    std::vector<TermList> docs = {{0, {"a", "a", "a", "a"}}};
    const auto x = build_matrix(docs, vocab_of({"a"}));
    CHECK(x.rows[0] == std::vector<std::uint32_t>{1});
    CHECK(x.nnz() == 1);
}

TEST_CASE("empty truncated vocabulary is rejected") {
    std::vector<TermList> docs = {{0, {"a"}}};
    CHECK_THROWS_AS(build_matrix(docs, Vocabulary{}), error);
}

TEST_CASE("row checksum is the sum of 1-based ranks") {
    CHECK(row_checksum({2, 5}) == 7);
    CHECK(row_checksum({}) == 0);
    std::vector<std::uint32_t> full(1000);
    for (std::uint32_t i = 0; i < 1000; ++i) full[i] = i + 1;
    CHECK(row_checksum(full) == 1000ull * 1001ull / 2);
}

TEST_CASE("dedupe: checksum collisions with distinct sets are kept") {
    const auto x = matrix_of(5, {{1, 4}, {2, 3}});
    const auto [deduped, report] = dedupe_rows(x);
    CHECK(deduped.n_docs() == 2);
    CHECK(report.dropped_rows.empty());
}

TEST_CASE("dedupe: identical rows keep the lowest index") {
    std::vector<std::vector<std::uint32_t>> rows(13);
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = {std::uint32_t(i + 1)};
    rows[7] = {2, 9};
    rows[12] = {2, 9};
    const auto x = matrix_of(20, rows);
    const auto [deduped, report] = dedupe_rows(x);
    CHECK(deduped.n_docs() == 12);
    REQUIRE(report.dropped_rows.size() == 1);
    CHECK(report.dropped_rows[0] == 12);
    CHECK(report.kept_representative.at(12) == 7);
    CHECK(report.fraction_dropped == doctest::Approx(1.0 / 13.0));
}

TEST_CASE("dedupe is idempotent and leaves no identical rows") {
    rng64 rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<std::vector<std::uint32_t>> rows;
        for (int d = 0; d < 40; ++d) {
            std::set<std::uint32_t> ranks;
            const std::size_t k = 1 + rng.next_below(4);
            for (std::size_t t = 0; t < k; ++t)
                ranks.insert(std::uint32_t(1 + rng.next_below(6)));
            rows.emplace_back(ranks.begin(), ranks.end());
        }
        const auto x = matrix_of(6, rows);
        const auto [once, report1] = dedupe_rows(x);

        std::set<std::vector<std::uint32_t>> seen;
        for (const auto& r : once.rows) CHECK(seen.insert(r).second);

        const auto [twice, report2] = dedupe_rows(once);
        CHECK(twice.n_docs() == once.n_docs());
        CHECK(report2.dropped_rows.empty());

        // every dropped row shares a checksum with its representative
        for (const auto& [dropped, kept] : report1.kept_representative)
            CHECK(row_checksum(x.rows[dropped]) == row_checksum(x.rows[kept]));
    }
}

TEST_CASE("dedupe carries document metadata through") {
    SparseDocTermMatrix x;
    x.n_terms = 3;
    x.rows = {{1}, {1}, {2}};
    x.doc_record = {"r0", "r1", "r2"};
    x.doc_author = {"a", "b", "c"};
    const auto [deduped, report] = dedupe_rows(x);
    REQUIRE(deduped.n_docs() == 2);
    CHECK(deduped.doc_record == std::vector<std::string>{"r0", "r2"});
    CHECK(deduped.doc_author == std::vector<std::string>{"a", "c"});
    CHECK(report.kept_representative.at(1) == 0);
}

}  // TEST_SUITE
