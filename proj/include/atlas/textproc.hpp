#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <functional>
#include <map>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "atlas/common.hpp"
#include "atlas/corpus.hpp"

namespace atlas {

// Terms extracted from one document, lower-case, duplicates allowed.
struct TermList {
    std::size_t doc_index = 0;
    std::vector<std::string> terms;
};

// Terms ranked by decreasing global frequency; rank (1-based) is the term's
// integer identity everywhere downstream.
struct Vocabulary {
    std::vector<std::string> terms;
    std::vector<std::uint64_t> freq;
    std::unordered_map<std::string, std::uint32_t> rank_of;  // term -> 1-based rank

    std::size_t size() const { return terms.size(); }

    void rebuild_index() {
        rank_of.clear();
        rank_of.reserve(terms.size());
        for (std::size_t i = 0; i < terms.size(); ++i)
            rank_of[terms[i]] = static_cast<std::uint32_t>(i + 1);
    }

    // V' = the n most frequent terms.
    Vocabulary truncated(std::size_t n) const {
        Vocabulary v;
        const std::size_t m = std::min(n, terms.size());
        v.terms.assign(terms.begin(), terms.begin() + m);
        v.freq.assign(freq.begin(), freq.begin() + m);
        v.rebuild_index();
        return v;
    }
};

struct AuthorProfile {
    std::string author_id;
    std::map<std::string, std::uint64_t> term_counts;
};

namespace lemma {

// Tokens the plural rules must leave alone: acronyms a suffix rule would
// clip (als, ngs), lexical plurals, singular -s nouns and -s adverbs that
// would otherwise be mangled before exclusion matching.
inline const std::unordered_set<std::string>& protect_list() {
    static const std::unordered_set<std::string> set = {
        "als", "ngs", "aids", "has", "was", "is", "its", "gas", "bias", "alias",
        "atlas", "canvas", "pancreas", "lens", "news", "feces", "species",
        "series", "diabetes", "rabies", "measles", "herpes", "caries",
        "scabies", "mumps", "forceps", "biceps", "triceps", "always",
        "perhaps", "whereas", "besides", "towards", "sometimes", "overseas",
    };
    return set;
}

// Irregular plurals plus regular -se/-ze/-che nouns whose plural would
// misfire under the es-dropping rule (cases -> cas, sizes -> siz, ...).
inline const std::unordered_map<std::string, std::string>& irregulars() {
    static const std::unordered_map<std::string, std::string> map = {
        {"children", "child"}, {"women", "woman"}, {"men", "man"},
        {"mice", "mouse"}, {"feet", "foot"}, {"teeth", "tooth"},
        {"geese", "goose"}, {"lice", "louse"}, {"oxen", "ox"},
        {"people", "person"},
        {"criteria", "criterion"}, {"phenomena", "phenomenon"},
        {"bacteria", "bacterium"}, {"mitochondria", "mitochondrion"},
        {"nuclei", "nucleus"}, {"fungi", "fungus"}, {"stimuli", "stimulus"},
        {"loci", "locus"}, {"foci", "focus"}, {"radii", "radius"},
        {"genera", "genus"}, {"corpora", "corpus"},
        {"analyses", "analysis"}, {"diagnoses", "diagnosis"},
        {"hypotheses", "hypothesis"}, {"prognoses", "prognosis"},
        {"metastases", "metastasis"}, {"stenoses", "stenosis"},
        {"theses", "thesis"}, {"syntheses", "synthesis"},
        {"prostheses", "prosthesis"}, {"crises", "crisis"},
        {"neuroses", "neurosis"}, {"psychoses", "psychosis"},
        {"emphases", "emphasis"}, {"axes", "axis"},
        {"matrices", "matrix"}, {"indices", "index"}, {"vertices", "vertex"},
        {"appendices", "appendix"}, {"cortices", "cortex"},
        {"helices", "helix"}, {"apices", "apex"},
        {"larvae", "larva"}, {"vertebrae", "vertebra"},
        {"antennae", "antenna"}, {"aortae", "aorta"}, {"formulae", "formula"},
        {"cases", "case"}, {"bases", "base"}, {"doses", "dose"},
        {"noses", "nose"}, {"responses", "response"}, {"diseases", "disease"},
        {"causes", "cause"}, {"phases", "phase"}, {"increases", "increase"},
        {"decreases", "decrease"}, {"releases", "release"},
        {"houses", "house"}, {"nurses", "nurse"}, {"pulses", "pulse"},
        {"courses", "course"}, {"purposes", "purpose"}, {"uses", "use"},
        {"sizes", "size"}, {"prizes", "prize"}, {"niches", "niche"},
        {"headaches", "headache"}, {"caches", "cache"},
    };
    return map;
}

inline bool ends_with(const std::string& s, const char* suffix) {
    const std::size_t n = std::strlen(suffix);
    return s.size() >= n && s.compare(s.size() - n, n, suffix) == 0;
}

}  // namespace lemma

// Plural -> singular by ordered rules; token must already be lower-case.
inline std::string lemmatize(const std::string& token) {
    using namespace lemma;
    if (token.size() < 3) return token;
    if (protect_list().count(token)) return token;
    if (auto it = irregulars().find(token); it != irregulars().end()) return it->second;
    if (token.back() != 's') return token;
    if (ends_with(token, "ics")) return token;  // genomics, statistics, ...
    if (token.size() >= 5 && ends_with(token, "ies"))
        return token.substr(0, token.size() - 3) + "y";
    if (ends_with(token, "ses") || ends_with(token, "xes") || ends_with(token, "zes") ||
        ends_with(token, "ches") || ends_with(token, "shes")) {
        if (token.size() >= 4) return token.substr(0, token.size() - 2);
    }
    if (ends_with(token, "ss") || ends_with(token, "us") || ends_with(token, "is"))
        return token;
    if (token.size() >= 3) return token.substr(0, token.size() - 1);
    return token;
}

// Pure numeric token: optional sign (ASCII +/- or U+2212), digits with an
// optional decimal part, bare decimals included ("-0.1", ".5", "12").
inline bool is_numeric_token(const std::string& t) {
    std::size_t i = 0;
    if (i < t.size() && (t[i] == '+' || t[i] == '-')) ++i;
    else if (t.size() >= 3 && t.compare(0, 3, "\xe2\x88\x92") == 0) i = 3;  // U+2212 minus
    bool digits = false, dot = false;
    for (; i < t.size(); ++i) {
        const char c = t[i];
        if (c >= '0' && c <= '9') { digits = true; continue; }
        if (c == '.' && !dot) { dot = true; continue; }
        return false;
    }
    return digits;
}

// Split on non-word boundaries. Word bytes: ASCII alphanumerics, '-', any
// non-ASCII byte, and '.' when it sits between two digits (keeps decimal
// numbers intact so the numeric filter can see them).
inline std::vector<std::string> split_words(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    const std::size_t n = text.size();
    for (std::size_t i = 0; i < n; ++i) {
        const unsigned char c = static_cast<unsigned char>(text[i]);
        bool word = std::isalnum(c) || c == '-' || c >= 0x80;
        if (!word && c == '.' && i > 0 && i + 1 < n &&
            std::isdigit(static_cast<unsigned char>(text[i - 1])) &&
            std::isdigit(static_cast<unsigned char>(text[i + 1])))
            word = true;
        if (word) {
            cur.push_back(static_cast<char>(std::tolower(c)));
        } else if (!cur.empty()) {
            out.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

using TokenPredicate = std::function<bool(const std::string&)>;

struct TokenizerOptions {
    // optional user hook: return false to drop a token (applied last)
    TokenPredicate keep = nullptr;
};

// title + abstract + keywords -> filtered multiset of lemmatized terms.
// Pipeline: split, lower-case, lemmatize, drop numerics, drop exclusion-list
// matches, drop single-character tokens. Lengths are measured in bytes so
// multi-byte symbols ("±") survive the single-character filter.
inline TermList tokenize_and_filter(const PublicationRecord& rec,
                                    const std::unordered_set<std::string>& exclusions,
                                    const TokenizerOptions& opt = {}) {
    std::string text = rec.title;
    text.push_back(' ');
    text += rec.abstract;
    for (const auto& kw : rec.keywords) {
        text.push_back(' ');
        text += kw;
    }

    TermList out;
    for (auto& raw : split_words(text)) {
        // trim hyphen runs at the ends; inner hyphens (hiv-1) stay
        std::size_t b = raw.find_first_not_of('-');
        if (b == std::string::npos) continue;
        std::size_t e = raw.find_last_not_of('-');
        std::string tok = raw.substr(b, e - b + 1);

        tok = lemmatize(tok);
        if (is_numeric_token(tok)) continue;
        if (exclusions.count(tok)) continue;
        if (tok.size() < 2) continue;
        if (opt.keep && !opt.keep(tok)) continue;
        out.terms.push_back(std::move(tok));
    }
    return out;
}

inline std::vector<TermList> tokenize_corpus(const Corpus& corpus,
                                             const std::unordered_set<std::string>& exclusions,
                                             const TokenizerOptions& opt = {}) {
    std::vector<TermList> docs;
    docs.reserve(corpus.records.size());
    for (std::size_t i = 0; i < corpus.records.size(); ++i) {
        TermList t = tokenize_and_filter(corpus.records[i], exclusions, opt);
        t.doc_index = i;
        docs.push_back(std::move(t));
    }
    return docs;
}

// One lower-case term per line, '#' starts a comment.
inline std::unordered_set<std::string> load_exclusion_list(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw error("cannot open exclusion list: " + path);
    std::unordered_set<std::string> set;
    std::string line;
    while (std::getline(in, line)) {
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::size_t b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        std::size_t e = line.find_last_not_of(" \t\r");
        std::string term = line.substr(b, e - b + 1);
        std::transform(term.begin(), term.end(), term.begin(),
                       [](unsigned char c) { return std::tolower(c); });
        set.insert(std::move(term));
    }
    return set;
}

enum class EmptyVocabulary { Throw, Allow };

// Global counts (with multiplicity), sorted by count desc then term asc.
// min_count=2 reproduces the "appearing more than once" criterion.
inline Vocabulary build_vocabulary(const std::vector<TermList>& docs,
                                   std::uint64_t min_count = 1,
                                   EmptyVocabulary on_empty = EmptyVocabulary::Throw) {
    std::unordered_map<std::string, std::uint64_t> counts;
    for (const auto& d : docs)
        for (const auto& t : d.terms) ++counts[t];
    if (counts.empty()) throw error("build_vocabulary: empty corpus");

    std::vector<std::pair<std::string, std::uint64_t>> items;
    items.reserve(counts.size());
    for (auto& kv : counts)
        if (kv.second >= min_count) items.emplace_back(kv.first, kv.second);
    if (items.empty() && on_empty == EmptyVocabulary::Throw)
        throw error("build_vocabulary: no term meets the minimum count");

    std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });

    Vocabulary v;
    v.terms.reserve(items.size());
    v.freq.reserve(items.size());
    for (auto& [term, count] : items) {
        v.terms.push_back(std::move(term));
        v.freq.push_back(count);
    }
    v.rebuild_index();
    return v;
}

// Per-author term counts over that author's documents. A co-authored
// document contributes to every owning author's profile.
inline std::vector<AuthorProfile> author_profiles(const Corpus& corpus,
                                                  const std::vector<TermList>& docs,
                                                  std::vector<std::string>* warnings = nullptr) {
    if (docs.size() != corpus.records.size())
        throw error("author_profiles: docs not aligned with corpus records");
    std::unordered_map<std::string, std::size_t> slot;
    std::vector<AuthorProfile> profiles;
    profiles.reserve(corpus.authors.size());
    for (const auto& a : corpus.authors) {
        slot[a.author_id] = profiles.size();
        profiles.push_back({a.author_id, {}});
    }
    for (const auto& d : docs) {
        const auto& author_id = corpus.records[d.doc_index].author_id;
        auto it = slot.find(author_id);
        if (it == slot.end()) throw error("author_profiles: unknown author_id " + author_id);
        auto& counts = profiles[it->second].term_counts;
        for (const auto& t : d.terms) ++counts[t];
    }
    if (warnings) {
        for (const auto& p : profiles)
            if (p.term_counts.empty())
                warnings->push_back("author '" + p.author_id + "' has no retained terms");
    }
    return profiles;
}

}  // namespace atlas
