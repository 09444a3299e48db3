#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "atlas/common.hpp"

namespace atlas {

struct AuthorQuery {
    std::string author_id;      // short unique label, e.g. initials
    std::string display_name;
    std::string query;          // verbatim search expression for the remote database

    bool operator==(const AuthorQuery&) const = default;
};

struct PublicationRecord {
    std::string record_id;               // remote database identifier (PMID-like)
    std::string title;
    std::string abstract;                // may be empty
    std::vector<std::string> keywords;
    std::vector<std::string> authors;
    std::string author_id;               // owning AuthorQuery label

    bool operator==(const PublicationRecord&) const = default;
};

struct Corpus {
    std::vector<AuthorQuery> authors;
    std::vector<PublicationRecord> records;
    std::string retrieved_at;  // ISO-8601

    bool operator==(const Corpus&) const = default;

    void check_invariants() const {
        std::unordered_map<std::string, bool> known;
        for (const auto& a : authors) known[a.author_id] = true;
        for (const auto& r : records) {
            if (r.record_id.empty()) throw error("corpus: record with empty record_id");
            if (!known.count(r.author_id))
                throw error("corpus: record " + r.record_id +
                            " tagged with unknown author_id '" + r.author_id + "'");
        }
    }
};

namespace detail {

// One CSV record; quoted fields may embed commas, doubled quotes escape.
// Returns false at end of input. A record can span lines inside quotes.
inline bool read_csv_record(std::istream& in, std::vector<std::string>& fields) {
    fields.clear();
    std::string field;
    bool in_quotes = false, any = false;
    int ch;
    while ((ch = in.get()) != EOF) {
        any = true;
        const char c = static_cast<char>(ch);
        if (in_quotes) {
            if (c == '"') {
                if (in.peek() == '"') { field.push_back('"'); in.get(); }
                else in_quotes = false;
            } else {
                field.push_back(c);
            }
        } else if (c == '"') {
            in_quotes = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (c == '\n') {
            break;
        } else if (c != '\r') {
            field.push_back(c);
        }
    }
    if (!any) return false;
    fields.push_back(std::move(field));
    return true;
}

inline std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out.push_back('"');
    return out;
}

}  // namespace detail

// CSV with header `author_id,display_name,query`; query fields may be
// double-quoted to embed commas. Order preserved.
inline std::vector<AuthorQuery> parse_query_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw error("cannot open query file: " + path);

    std::vector<std::string> fields;
    if (!detail::read_csv_record(in, fields))
        throw error("query file is empty: " + path);

    std::unordered_map<std::string, int> col;
    for (std::size_t i = 0; i < fields.size(); ++i) col[fields[i]] = static_cast<int>(i);
    for (const char* name : {"author_id", "display_name", "query"})
        if (!col.count(name))
            throw error("query file " + path + ": missing column '" + name + "'");

    std::vector<AuthorQuery> out;
    std::unordered_map<std::string, int> seen_row;  // author_id -> 1-based row number
    int row = 1;
    while (detail::read_csv_record(in, fields)) {
        ++row;
        if (fields.size() == 1 && fields[0].empty()) continue;  // blank line
        if (fields.size() < 3)
            throw error("query file " + path + ": row " + std::to_string(row) +
                        " has " + std::to_string(fields.size()) + " fields, expected 3");
        AuthorQuery q;
        q.author_id = fields[col["author_id"]];
        q.display_name = fields[col["display_name"]];
        q.query = fields[col["query"]];
        if (q.query.empty())
            throw error("query file " + path + ": row " + std::to_string(row) + " has empty query");
        if (auto it = seen_row.find(q.author_id); it != seen_row.end())
            throw error("query file " + path + ": duplicate author_id '" + q.author_id +
                        "' in rows " + std::to_string(it->second) + " and " + std::to_string(row));
        seen_row[q.author_id] = row;
        out.push_back(std::move(q));
    }
    return out;
}

}  // namespace atlas
