#pragma once

#include <charconv>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "atlas/corpus.hpp"
#include "atlas/distance_matrix.hpp"
#include "atlas/docterm.hpp"
#include "atlas/graph.hpp"
#include "atlas/textproc.hpp"
#include "atlas/umap.hpp"
#include "atlas/zipf.hpp"

namespace atlas {

// shortest round-trip decimal form, locale-independent
inline std::string fmt_double(double v) {
    char buf[40];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

namespace io_detail {

inline std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw error("cannot write file: " + path);
    return out;
}

inline std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

}  // namespace io_detail

inline void write_vocabulary_csv(const Vocabulary& vocab, const std::string& path) {
    auto out = io_detail::open_out(path);
    out << "rank,term,count\n";
    for (std::size_t i = 0; i < vocab.size(); ++i)
        out << (i + 1) << ',' << detail::csv_quote(vocab.terms[i]) << ',' << vocab.freq[i] << '\n';
}

inline Vocabulary read_vocabulary_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw error("cannot open vocabulary file: " + path);
    std::vector<std::string> fields;
    if (!detail::read_csv_record(in, fields) || fields.size() < 3 || fields[0] != "rank")
        throw error("vocabulary file " + path + ": bad header");
    Vocabulary v;
    while (detail::read_csv_record(in, fields)) {
        if (fields.size() == 1 && fields[0].empty()) continue;
        if (fields.size() != 3) throw error("vocabulary file " + path + ": malformed row");
        v.terms.push_back(fields[1]);
        v.freq.push_back(std::stoull(fields[2]));
    }
    v.rebuild_index();
    return v;
}

inline void write_zipf_json(const ZipfFit& fit, const std::string& path) {
    nlohmann::json j;
    j["C"] = fit.C;
    j["alpha"] = fit.alpha;
    j["beta"] = fit.beta;
    j["sse"] = fit.sse;
    auto out = io_detail::open_out(path);
    out << j.dump(2) << '\n';
}

inline void write_zipf_curve_csv(const Vocabulary& vocab, const ZipfFit& fit,
                                 const std::string& path) {
    auto out = io_detail::open_out(path);
    out << "rank,observed,fitted\n";
    const auto fitted = zipf_predicted(fit, vocab.size());
    for (std::size_t i = 0; i < vocab.size(); ++i)
        out << (i + 1) << ',' << vocab.freq[i] << ',' << fmt_double(fitted[i]) << '\n';
}

// triplet export plus the sidecar that maps rows back to records
inline void write_matrix_csv(const SparseDocTermMatrix& x, const std::string& path) {
    auto out = io_detail::open_out(path);
    out << "doc,term_rank,value\n";
    for (std::size_t i = 0; i < x.rows.size(); ++i)
        for (auto r : x.rows[i]) out << i << ',' << r << ",1\n";
}

inline void write_matrix_sidecar_json(const SparseDocTermMatrix& x, const std::string& path) {
    nlohmann::json j;
    j["n_docs"] = x.n_docs();
    j["n_terms"] = x.n_terms;
    j["docs"] = nlohmann::json::array();
    for (std::size_t i = 0; i < x.rows.size(); ++i)
        j["docs"].push_back({{"doc", i},
                             {"record_id", x.doc_record[i]},
                             {"author_id", x.doc_author[i]}});
    auto out = io_detail::open_out(path);
    out << j.dump(2) << '\n';
}

inline SparseDocTermMatrix read_matrix_csv(const std::string& path, const std::string& sidecar) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw error("cannot open matrix file: " + path);
    std::vector<std::string> fields;
    if (!detail::read_csv_record(in, fields) || fields.size() != 3 || fields[0] != "doc")
        throw error("matrix file " + path + ": bad header");

    std::ifstream side(sidecar, std::ios::binary);
    if (!side) throw error("cannot open matrix sidecar: " + sidecar);
    nlohmann::json j = nlohmann::json::parse(side);

    SparseDocTermMatrix x;
    x.n_terms = j.at("n_terms").get<std::size_t>();
    const std::size_t n_docs = j.at("n_docs").get<std::size_t>();
    x.rows.resize(n_docs);
    x.doc_record.resize(n_docs);
    x.doc_author.resize(n_docs);
    for (const auto& d : j.at("docs")) {
        const std::size_t i = d.at("doc").get<std::size_t>();
        x.doc_record[i] = d.at("record_id").get<std::string>();
        x.doc_author[i] = d.at("author_id").get<std::string>();
    }
    while (detail::read_csv_record(in, fields)) {
        if (fields.size() == 1 && fields[0].empty()) continue;
        if (fields.size() != 3) throw error("matrix file " + path + ": malformed row");
        const std::size_t doc = std::stoull(fields[0]);
        if (doc >= n_docs) throw error("matrix file " + path + ": doc index out of range");
        x.rows[doc].push_back(std::uint32_t(std::stoul(fields[1])));
    }
    return x;
}

inline void write_embedding_csv(const TermEmbedding& emb, const Vocabulary& vocab,
                                const std::string& path) {
    auto out = io_detail::open_out(path);
    out << "term,rank";
    for (std::size_t c = 0; c < emb.dim; ++c) out << ",x" << (c + 1);
    out << '\n';
    for (std::size_t i = 0; i < emb.size(); ++i) {
        const std::uint32_t rank = emb.ids[i];
        const std::string& term =
            rank >= 1 && rank <= vocab.size() ? vocab.terms[rank - 1] : std::string{};
        out << detail::csv_quote(term) << ',' << rank;
        for (std::size_t c = 0; c < emb.dim; ++c) out << ',' << fmt_double(emb.point(i)[c]);
        out << '\n';
    }
}

inline TermEmbedding read_embedding_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw error("cannot open embedding file: " + path);
    std::vector<std::string> fields;
    if (!detail::read_csv_record(in, fields) || fields.size() < 3 || fields[0] != "term")
        throw error("embedding file " + path + ": bad header");
    TermEmbedding emb;
    emb.dim = fields.size() - 2;
    while (detail::read_csv_record(in, fields)) {
        if (fields.size() == 1 && fields[0].empty()) continue;
        if (fields.size() != emb.dim + 2)
            throw error("embedding file " + path + ": malformed row");
        emb.ids.push_back(std::uint32_t(std::stoul(fields[1])));
        for (std::size_t c = 0; c < emb.dim; ++c)
            emb.coords.push_back(std::stod(fields[2 + c]));
    }
    emb.rebuild_index();
    return emb;
}

// binary condensed format: magic, LE header length, JSON header, float64 LE
inline void write_condensed_binary(const CondensedDistanceMatrix& m, const std::string& path) {
    auto out = io_detail::open_out(path);
    nlohmann::json header;
    header["n"] = m.n;
    header["label"] = m.label;
    header["count"] = m.values.size();
    header["dtype"] = "float64-le";
    const std::string h = header.dump();
    const std::uint32_t len = std::uint32_t(h.size());
    out.write("ATLSDIST", 8);
    char lenbuf[4] = {char(len & 0xff), char((len >> 8) & 0xff), char((len >> 16) & 0xff),
                      char((len >> 24) & 0xff)};
    out.write(lenbuf, 4);
    out.write(h.data(), std::streamsize(h.size()));
    // doubles are stored little-endian; this build targets LE hardware
    out.write(reinterpret_cast<const char*>(m.values.data()),
              std::streamsize(m.values.size() * sizeof(double)));
}

inline CondensedDistanceMatrix read_condensed_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw error("cannot open distance file: " + path);
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, "ATLSDIST", 8) != 0)
        throw error("distance file " + path + ": bad magic");
    char lenbuf[4];
    in.read(lenbuf, 4);
    const std::uint32_t len = std::uint32_t(std::uint8_t(lenbuf[0])) |
                              (std::uint32_t(std::uint8_t(lenbuf[1])) << 8) |
                              (std::uint32_t(std::uint8_t(lenbuf[2])) << 16) |
                              (std::uint32_t(std::uint8_t(lenbuf[3])) << 24);
    std::string h(len, '\0');
    in.read(h.data(), len);
    nlohmann::json header = nlohmann::json::parse(h);
    CondensedDistanceMatrix m;
    m.n = header.at("n").get<std::size_t>();
    m.label = header.at("label").get<std::string>();
    const std::size_t count = header.at("count").get<std::size_t>();
    if (count != CondensedDistanceMatrix::condensed_size(m.n))
        throw error("distance file " + path + ": inconsistent header");
    m.values.resize(count);
    in.read(reinterpret_cast<char*>(m.values.data()), std::streamsize(count * sizeof(double)));
    if (!in) throw error("distance file " + path + ": truncated data");
    return m;
}

// square CSV with the author ids as header and leading column
inline void write_distance_csv(const CondensedDistanceMatrix& m,
                               const std::vector<std::string>& ids, const std::string& path) {
    if (ids.size() != m.n) throw error("write_distance_csv: ids not aligned");
    auto out = io_detail::open_out(path);
    out << "author_id";
    for (const auto& id : ids) out << ',' << detail::csv_quote(id);
    out << '\n';
    for (std::size_t i = 0; i < m.n; ++i) {
        out << detail::csv_quote(ids[i]);
        for (std::size_t j = 0; j < m.n; ++j) out << ',' << fmt_double(m.at(i, j));
        out << '\n';
    }
}

struct VertexAttributes {
    std::string author_id;
    std::string display_name;
    std::string group;       // external label, e.g. department
    int cluster = -1;        // Louvain community
    std::size_t n_abstracts = 0;
};

inline void write_graphml(const std::vector<VertexAttributes>& verts, const Adjacency& undirected,
                          const std::string& path, const CondensedDistanceMatrix* w = nullptr) {
    using io_detail::xml_escape;
    if (verts.size() != undirected.n) throw error("write_graphml: attribute/vertex mismatch");
    auto out = io_detail::open_out(path);
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\""
        << " xmlns:xsi=\"http://www.w3.org/2001/XMLSchema-instance\""
        << " xsi:schemaLocation=\"http://graphml.graphdrawing.org/xmlns"
        << " http://graphml.graphdrawing.org/xmlns/1.0/graphml.xsd\">\n";
    out << "  <key id=\"d0\" for=\"node\" attr.name=\"author_id\" attr.type=\"string\"/>\n"
        << "  <key id=\"d1\" for=\"node\" attr.name=\"display_name\" attr.type=\"string\"/>\n"
        << "  <key id=\"d2\" for=\"node\" attr.name=\"group\" attr.type=\"string\"/>\n"
        << "  <key id=\"d3\" for=\"node\" attr.name=\"cluster\" attr.type=\"int\"/>\n"
        << "  <key id=\"d4\" for=\"node\" attr.name=\"n_abstracts\" attr.type=\"int\"/>\n"
        << "  <key id=\"d5\" for=\"edge\" attr.name=\"distance\" attr.type=\"double\"/>\n";
    out << "  <graph id=\"G\" edgedefault=\"undirected\">\n";
    for (std::size_t i = 0; i < verts.size(); ++i) {
        const auto& v = verts[i];
        out << "    <node id=\"n" << i << "\">\n"
            << "      <data key=\"d0\">" << xml_escape(v.author_id) << "</data>\n"
            << "      <data key=\"d1\">" << xml_escape(v.display_name) << "</data>\n"
            << "      <data key=\"d2\">" << xml_escape(v.group) << "</data>\n"
            << "      <data key=\"d3\">" << v.cluster << "</data>\n"
            << "      <data key=\"d4\">" << v.n_abstracts << "</data>\n"
            << "    </node>\n";
    }
    std::size_t e = 0;
    for (std::size_t i = 0; i < undirected.n; ++i)
        for (std::size_t j = i + 1; j < undirected.n; ++j)
            if (undirected.at(i, j)) {
                out << "    <edge id=\"e" << e++ << "\" source=\"n" << i << "\" target=\"n" << j
                    << "\">";
                if (w) out << "<data key=\"d5\">" << fmt_double(w->at(i, j)) << "</data>";
                out << "</edge>\n";
            }
    out << "  </graph>\n</graphml>\n";
}

inline void write_dot(const std::vector<VertexAttributes>& verts, const Adjacency& undirected,
                      const std::string& path, const CondensedDistanceMatrix* w = nullptr) {
    if (verts.size() != undirected.n) throw error("write_dot: attribute/vertex mismatch");
    auto quote = [](const std::string& s) {
        std::string out = "\"";
        for (char c : s) {
            if (c == '"' || c == '\\') out.push_back('\\');
            out.push_back(c);
        }
        out.push_back('"');
        return out;
    };
    auto out = io_detail::open_out(path);
    out << "graph collab_atlas {\n  node [shape=circle];\n";
    for (std::size_t i = 0; i < verts.size(); ++i) {
        const auto& v = verts[i];
        out << "  n" << i << " [label=" << quote(v.author_id)
            << " tooltip=" << quote(v.display_name) << " cluster=" << v.cluster
            << " group=" << quote(v.group) << " abstracts=" << v.n_abstracts << "];\n";
    }
    for (std::size_t i = 0; i < undirected.n; ++i)
        for (std::size_t j = i + 1; j < undirected.n; ++j)
            if (undirected.at(i, j)) {
                out << "  n" << i << " -- n" << j;
                if (w) out << " [weight=" << fmt_double(w->at(i, j)) << "]";
                out << ";\n";
            }
    out << "}\n";
}

// cluster report: one row per cluster, Table-2 shape
inline void write_cluster_report_csv(const Partition& part,
                                     const std::vector<std::string>& author_ids,
                                     const std::vector<std::vector<ScoredWord>>& words,
                                     const std::string& path) {
    auto out = io_detail::open_out(path);
    out << "cluster,size,members,characteristic_words\n";
    const int nc = part.n_communities();
    for (int c = 0; c < nc; ++c) {
        std::string members, top;
        std::size_t size = 0;
        for (std::size_t v = 0; v < part.assignment.size(); ++v)
            if (part.assignment[v] == c) {
                if (!members.empty()) members.push_back(' ');
                members += author_ids[v];
                ++size;
            }
        if (c < int(words.size()))
            for (const auto& sw : words[c]) {
                if (!top.empty()) top.push_back(' ');
                top += sw.term;
            }
        out << (c + 1) << ',' << size << ',' << detail::csv_quote(members) << ','
            << detail::csv_quote(top) << '\n';
    }
}

}  // namespace atlas
