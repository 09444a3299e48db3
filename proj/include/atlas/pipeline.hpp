#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "atlas/corpus_json.hpp"
#include "atlas/export.hpp"
#include "atlas/geometry.hpp"
#include "atlas/graph.hpp"
#include "atlas/stats.hpp"
#include "atlas/transport.hpp"

namespace atlas {

// Key = value configuration file; '#' comments, values may be double-quoted.
class PipelineConfig {
public:
    PipelineConfig() = default;

    static PipelineConfig from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw error("cannot open config file: " + path);
        PipelineConfig cfg;
        cfg.dir_ = std::filesystem::path(path).parent_path().string();
        std::string line;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
            const auto eq = line.find('=');
            if (eq == std::string::npos) {
                if (line.find_first_not_of(" \t\r") != std::string::npos)
                    throw error("config " + path + " line " + std::to_string(line_no) +
                                ": expected key = value");
                continue;
            }
            auto trim = [](std::string s) {
                const auto b = s.find_first_not_of(" \t\r");
                if (b == std::string::npos) return std::string{};
                const auto e = s.find_last_not_of(" \t\r");
                return s.substr(b, e - b + 1);
            };
            std::string key = trim(line.substr(0, eq));
            std::string value = trim(line.substr(eq + 1));
            if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
                value = value.substr(1, value.size() - 2);
            if (key.empty())
                throw error("config " + path + " line " + std::to_string(line_no) + ": empty key");
            cfg.values_[key] = value;
        }
        return cfg;
    }

    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    bool has(const std::string& key) const { return values_.count(key) > 0; }

    std::string get_string(const std::string& key, const std::string& def = "") const {
        auto it = values_.find(key);
        return it == values_.end() ? def : it->second;
    }

    // paths are resolved relative to the config file's directory
    std::string get_path(const std::string& key, const std::string& def = "") const {
        const std::string v = get_string(key, def);
        if (v.empty() || dir_.empty()) return v;
        std::filesystem::path p(v);
        return p.is_absolute() ? v : (std::filesystem::path(dir_) / p).string();
    }

    double get_double(const std::string& key, double def) const {
        auto it = values_.find(key);
        if (it == values_.end()) return def;
        try {
            return std::stod(it->second);
        } catch (...) {
            throw error("config key '" + key + "': not a number: " + it->second);
        }
    }

    long long get_int(const std::string& key, long long def) const {
        auto it = values_.find(key);
        if (it == values_.end()) return def;
        try {
            return std::stoll(it->second);
        } catch (...) {
            throw error("config key '" + key + "': not an integer: " + it->second);
        }
    }

    bool get_bool(const std::string& key, bool def) const {
        auto it = values_.find(key);
        if (it == values_.end()) return def;
        if (it->second == "true" || it->second == "1") return true;
        if (it->second == "false" || it->second == "0") return false;
        throw error("config key '" + key + "': expected true/false");
    }

    void validate() const {
        if (get_int("vocab_size", 5000) < 100) throw error("config: vocab_size must be >= 100");
    }

    const std::map<std::string, std::string>& raw() const { return values_; }

private:
    std::map<std::string, std::string> values_;
    std::string dir_;
};

enum class Stage { Fetch, Process, Matrix, Embed, Distances, Graph, Report };

inline const char* stage_name(Stage s) {
    switch (s) {
        case Stage::Fetch: return "fetch";
        case Stage::Process: return "process";
        case Stage::Matrix: return "matrix";
        case Stage::Embed: return "embed";
        case Stage::Distances: return "distances";
        case Stage::Graph: return "graph";
        case Stage::Report: return "report";
    }
    return "?";
}

inline Stage stage_from_name(const std::string& name) {
    for (Stage s : {Stage::Fetch, Stage::Process, Stage::Matrix, Stage::Embed, Stage::Distances,
                    Stage::Graph, Stage::Report})
        if (name == stage_name(s)) return s;
    throw error("unknown stage: " + name);
}

namespace pipeline_detail {

inline std::string file_hash_hex(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw error("cannot hash missing file: " + path);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char buf[65536];
    while (in.read(buf, sizeof buf) || in.gcount() > 0)
        h = fnv1a64(buf, std::size_t(in.gcount()), h);
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

inline std::string artifact(const std::string& out_dir, const std::string& name) {
    return (std::filesystem::path(out_dir) / name).string();
}

}  // namespace pipeline_detail

// Records what a stage read and wrote, with content hashes, so reruns can
// detect stale inputs and any output can be traced to its parameters.
class Manifest {
public:
    Manifest(Stage stage, const PipelineConfig& config, std::uint64_t seed)
        : stage_(stage), seed_(seed), start_(std::chrono::steady_clock::now()) {
        for (const auto& [k, v] : config.raw()) params_[k] = v;
    }

    void add_input(const std::string& path) {
        inputs_[path] = pipeline_detail::file_hash_hex(path);
    }
    void add_output(const std::string& path) {
        outputs_[path] = pipeline_detail::file_hash_hex(path);
    }

    void write(const std::string& out_dir) const {
        nlohmann::json j;
        j["stage"] = stage_name(stage_);
        j["seed"] = seed_;
        j["params"] = params_;
        j["inputs"] = inputs_;
        j["outputs"] = outputs_;
        j["elapsed_ms"] =
            std::chrono::duration_cast<std::chrono::milliseconds>(
                std::chrono::steady_clock::now() - start_)
                .count();
        const std::string path = pipeline_detail::artifact(
            out_dir, std::string(stage_name(stage_)) + ".manifest.json");
        std::ofstream out(path, std::ios::binary);
        if (!out) throw error("cannot write manifest: " + path);
        out << j.dump(2) << '\n';
    }

private:
    Stage stage_;
    std::uint64_t seed_;
    std::map<std::string, std::string> params_;
    std::map<std::string, std::string> inputs_;
    std::map<std::string, std::string> outputs_;
    std::chrono::steady_clock::time_point start_;
};

// Require an upstream artifact; if the producing stage's manifest recorded a
// different content hash the file was edited or regenerated out of band.
inline void require_artifact(const std::string& out_dir, const std::string& path,
                             const char* producing_stage, bool force,
                             std::vector<std::string>* warnings = nullptr) {
    if (!std::filesystem::exists(path))
        throw error("missing artifact " + path + ": run the '" + producing_stage +
                    "' stage first");
    const std::string manifest_path = pipeline_detail::artifact(
        out_dir, std::string(producing_stage) + ".manifest.json");
    if (!std::filesystem::exists(manifest_path)) return;  // hand-provided input is fine
    std::ifstream in(manifest_path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (...) {
        return;
    }
    if (!j.contains("outputs") || !j["outputs"].contains(path)) return;
    const std::string recorded = j["outputs"][path].get<std::string>();
    const std::string current = pipeline_detail::file_hash_hex(path);
    if (recorded != current) {
        const std::string msg = "artifact " + path + " does not match the hash recorded by '" +
                                producing_stage + "'";
        if (!force) throw error(msg + " (rerun that stage or pass --force)");
        if (warnings) warnings->push_back(msg + "; proceeding under --force");
    }
}

struct StageIO {
    std::string out_dir;
    bool force = false;
    std::vector<std::string> warnings;

    std::string path(const std::string& name) const {
        return pipeline_detail::artifact(out_dir, name);
    }
};

// ---- tokenized-docs artifact (process stage output) ----

struct TokenizedDocs {
    std::vector<TermList> docs;
    std::vector<DocMeta> meta;  // aligned with docs
};

inline void write_docs_json(const TokenizedDocs& td, const std::string& path) {
    nlohmann::json j;
    j["version"] = 1;
    j["docs"] = nlohmann::json::array();
    for (std::size_t i = 0; i < td.docs.size(); ++i)
        j["docs"].push_back({{"doc_index", td.docs[i].doc_index},
                             {"record_id", td.meta[i].record_id},
                             {"author_id", td.meta[i].author_id},
                             {"terms", td.docs[i].terms}});
    std::ofstream out(path, std::ios::binary);
    if (!out) throw error("cannot write docs file: " + path);
    out << j.dump() << '\n';
}

inline TokenizedDocs read_docs_json(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw error("cannot open docs file: " + path);
    nlohmann::json j = nlohmann::json::parse(in);
    TokenizedDocs td;
    for (const auto& d : j.at("docs")) {
        TermList t;
        t.doc_index = d.at("doc_index").get<std::size_t>();
        t.terms = d.at("terms").get<std::vector<std::string>>();
        td.docs.push_back(std::move(t));
        td.meta.push_back({d.at("record_id").get<std::string>(),
                           d.at("author_id").get<std::string>()});
    }
    return td;
}

// groups file: CSV `author_id,group`
inline std::map<std::string, std::string> read_groups_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw error("cannot open groups file: " + path);
    std::vector<std::string> fields;
    if (!detail::read_csv_record(in, fields) || fields.size() < 2 || fields[0] != "author_id")
        throw error("groups file " + path + ": expected header author_id,group");
    std::map<std::string, std::string> out;
    while (detail::read_csv_record(in, fields)) {
        if (fields.size() == 1 && fields[0].empty()) continue;
        if (fields.size() < 2) throw error("groups file " + path + ": malformed row");
        out[fields[0]] = fields[1];
    }
    return out;
}

// Spearman correlation between two distance matrices over the same authors
// (flattened upper triangles, pairwise).
inline SpearmanResult compare_distances(const CondensedDistanceMatrix& w_wasserstein,
                                        const CondensedDistanceMatrix& w_direct) {
    if (w_wasserstein.n != w_direct.n)
        throw error("compare_distances: matrices cover different author sets");
    return spearman(w_wasserstein.values, w_direct.values);
}

}  // namespace atlas
