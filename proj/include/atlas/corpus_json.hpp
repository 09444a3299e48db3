#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "atlas/corpus.hpp"

namespace atlas {

inline constexpr int kCorpusSchemaVersion = 1;

inline nlohmann::json corpus_to_json(const Corpus& c) {
    nlohmann::json j;
    j["version"] = kCorpusSchemaVersion;
    j["retrieved_at"] = c.retrieved_at;
    j["authors"] = nlohmann::json::array();
    for (const auto& a : c.authors)
        j["authors"].push_back({{"author_id", a.author_id},
                                {"display_name", a.display_name},
                                {"query", a.query}});
    j["records"] = nlohmann::json::array();
    for (const auto& r : c.records)
        j["records"].push_back({{"record_id", r.record_id},
                                {"title", r.title},
                                {"abstract", r.abstract},
                                {"keywords", r.keywords},
                                {"authors", r.authors},
                                {"author_id", r.author_id}});
    return j;
}

inline Corpus corpus_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("version"))
        throw error("corpus file: missing schema version");
    if (j.at("version").get<int>() != kCorpusSchemaVersion)
        throw error("corpus file: unknown schema version " + j.at("version").dump());
    Corpus c;
    c.retrieved_at = j.value("retrieved_at", std::string{});
    for (const auto& a : j.at("authors")) {
        AuthorQuery q;
        q.author_id = a.at("author_id").get<std::string>();
        q.display_name = a.at("display_name").get<std::string>();
        q.query = a.at("query").get<std::string>();
        c.authors.push_back(std::move(q));
    }
    for (const auto& r : j.at("records")) {
        PublicationRecord rec;
        rec.record_id = r.at("record_id").get<std::string>();
        rec.title = r.at("title").get<std::string>();
        rec.abstract = r.at("abstract").get<std::string>();
        rec.keywords = r.at("keywords").get<std::vector<std::string>>();
        rec.authors = r.at("authors").get<std::vector<std::string>>();
        rec.author_id = r.at("author_id").get<std::string>();
        c.records.push_back(std::move(rec));
    }
    c.check_invariants();
    return c;
}

inline void persist_corpus(const Corpus& c, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw error("cannot write corpus file: " + path);
    out << corpus_to_json(c).dump(2) << '\n';
    if (!out) throw error("write failed: " + path);
}

inline Corpus load_corpus(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw error("cannot open corpus file: " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        // e.byte is the offset of the offending byte
        throw error("corpus file " + path + ": parse error at byte " +
                    std::to_string(e.byte) + ": " + e.what());
    }
    try {
        return corpus_from_json(j);
    } catch (const nlohmann::json::exception& e) {
        throw error("corpus file " + path + ": " + e.what());
    }
}

}  // namespace atlas
