#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "atlas/common.hpp"
#include "atlas/textproc.hpp"

namespace atlas {

// Binarized document x term presence matrix over the truncated vocabulary.
// Rows hold sorted 1-based term ranks; every stored value is exactly 1.
struct SparseDocTermMatrix {
    std::size_t n_terms = 0;                     // n = |V'|
    std::vector<std::vector<std::uint32_t>> rows;  // per doc, sorted unique ranks
    std::vector<std::string> doc_author;          // row -> owning author_id
    std::vector<std::string> doc_record;          // row -> source record_id

    std::size_t n_docs() const { return rows.size(); }

    std::size_t nnz() const {
        std::size_t s = 0;
        for (const auto& r : rows) s += r.size();
        return s;
    }
};

struct DocMeta {
    std::string record_id;
    std::string author_id;
};

struct DedupReport {
    std::vector<std::size_t> dropped_rows;                     // input row indices
    std::map<std::size_t, std::size_t> kept_representative;   // dropped -> kept
    double fraction_dropped = 0.0;
};

// One presence triplet per (document, retained term); terms outside V' are
// dropped, and documents left with no retained term are dropped entirely.
inline SparseDocTermMatrix build_matrix(const std::vector<TermList>& docs,
                                        const Vocabulary& vocab_truncated,
                                        const std::vector<DocMeta>& meta = {},
                                        std::vector<std::string>* warnings = nullptr) {
    if (vocab_truncated.size() == 0) throw error("build_matrix: empty truncated vocabulary");
    if (!meta.empty() && meta.size() != docs.size())
        throw error("build_matrix: doc metadata not aligned with docs");

    SparseDocTermMatrix x;
    x.n_terms = vocab_truncated.size();
    for (std::size_t i = 0; i < docs.size(); ++i) {
        std::vector<std::uint32_t> ranks;
        for (const auto& t : docs[i].terms) {
            auto it = vocab_truncated.rank_of.find(t);
            if (it != vocab_truncated.rank_of.end()) ranks.push_back(it->second);
        }
        std::sort(ranks.begin(), ranks.end());
        ranks.erase(std::unique(ranks.begin(), ranks.end()), ranks.end());
        if (ranks.empty()) {
            if (warnings)
                warnings->push_back("document " + std::to_string(docs[i].doc_index) +
                                    " has no terms in the truncated vocabulary; dropped");
            continue;
        }
        x.rows.push_back(std::move(ranks));
        if (!meta.empty()) {
            x.doc_record.push_back(meta[i].record_id);
            x.doc_author.push_back(meta[i].author_id);
        } else {
            x.doc_record.emplace_back();
            x.doc_author.emplace_back();
        }
    }
    return x;
}

// Checksum sum_j x_ij * j over 1-based ranks. 64-bit accumulation keeps the
// full-row value n(n+1)/2 exact far beyond any realistic vocabulary size.
inline std::uint64_t row_checksum(const std::vector<std::uint32_t>& ranks) {
    std::uint64_t sum = 0;
    for (auto r : ranks) sum += r;
    return sum;
}

// Checksum-then-verify duplicate removal: rows with equal checksums are
// compared for set identity; among identical rows the lowest index is kept.
// Colliding checksums with distinct term sets are never merged.
inline std::pair<SparseDocTermMatrix, DedupReport> dedupe_rows(const SparseDocTermMatrix& x) {
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> by_checksum;
    for (std::size_t i = 0; i < x.rows.size(); ++i)
        by_checksum[row_checksum(x.rows[i])].push_back(i);

    DedupReport report;
    std::vector<bool> drop(x.rows.size(), false);
    for (auto& [sum, group] : by_checksum) {
        if (group.size() < 2) continue;
        // group is in ascending row order (insertion order)
        for (std::size_t a = 0; a < group.size(); ++a) {
            if (drop[group[a]]) continue;
            for (std::size_t b = a + 1; b < group.size(); ++b) {
                if (drop[group[b]]) continue;
                if (x.rows[group[a]] == x.rows[group[b]]) {
                    drop[group[b]] = true;
                    report.kept_representative[group[b]] = group[a];
                }
            }
        }
    }

    SparseDocTermMatrix out;
    out.n_terms = x.n_terms;
    for (std::size_t i = 0; i < x.rows.size(); ++i) {
        if (drop[i]) {
            report.dropped_rows.push_back(i);
            continue;
        }
        out.rows.push_back(x.rows[i]);
        out.doc_record.push_back(x.doc_record[i]);
        out.doc_author.push_back(x.doc_author[i]);
    }
    report.fraction_dropped =
        x.rows.empty() ? 0.0 : double(report.dropped_rows.size()) / double(x.rows.size());
    return {std::move(out), std::move(report)};
}

}  // namespace atlas
