#pragma once

#include <filesystem>
#include <set>

#include "atlas/default_exclusions.hpp"
#include "atlas/eutils.hpp"
#include "atlas/pipeline.hpp"

namespace atlas {

namespace stage_detail {

inline std::string corpus_path(const PipelineConfig& cfg, const StageIO& io) {
    const std::string p = cfg.get_path("corpus");
    return p.empty() ? io.path("corpus.json") : p;
}

inline std::unordered_set<std::string> load_exclusions(const PipelineConfig& cfg,
                                                       StageIO& io) {
    std::unordered_set<std::string> set;
    const std::string path = cfg.get_path("exclusions");
    if (!path.empty()) {
        set = load_exclusion_list(path);
    } else {
        set = default_exclusions();
    }
    const std::string extra = cfg.get_path("extra_exclusions");
    if (!extra.empty())
        for (auto& t : load_exclusion_list(extra)) set.insert(t);
    (void)io;
    return set;
}

inline OtParams ot_params(const PipelineConfig& cfg) {
    OtParams p;
    p.p = int(cfg.get_int("ot_p", 2));
    p.threads = std::size_t(cfg.get_int("threads", 1));
    p.memory_budget_bytes = std::size_t(cfg.get_int("memory_budget_mb", 1024)) << 20;
    p.sinkhorn_lambda = cfg.get_double("sinkhorn_lambda", 50.0);
    p.validate();
    return p;
}

inline UmapParams umap_params(const PipelineConfig& cfg) {
    UmapParams p;
    p.n_neighbors = std::size_t(cfg.get_int("umap_neighbors", 15));
    p.min_dist = cfg.get_double("umap_min_dist", 0.1);
    p.n_epochs = std::size_t(cfg.get_int("umap_epochs", 500));
    p.dim = std::size_t(cfg.get_int("umap_dim", 3));
    p.seed = std::uint64_t(cfg.get_int("seed", 42));
    p.layout_threads = std::size_t(cfg.get_int("umap_layout_threads", 1));
    p.validate();
    return p;
}

}  // namespace stage_detail

inline void run_fetch(const PipelineConfig& cfg, StageIO& io, const HttpGetFn& http,
                      Clock* clock = nullptr) {
    const std::string queries_path = cfg.get_path("queries");
    if (queries_path.empty()) throw error("fetch: config key 'queries' is required");
    Manifest manifest(Stage::Fetch, cfg, 0);
    manifest.add_input(queries_path);

    const auto queries = parse_query_file(queries_path);
    ClientConfig cc;
    cc.base_url = cfg.get_string("base_url", cc.base_url);
    cc.base_path = cfg.get_string("base_path", cc.base_path);
    cc.api_key = cfg.get_string("api_key", "");
    cc.max_rate = cfg.get_double("rate", 0.0);
    cc.page_size = std::size_t(cfg.get_int("page_size", 100));
    cc.max_retries = std::size_t(cfg.get_int("retries", 3));

    EutilsClient client(cc, http, clock);
    Corpus corpus = client.fetch_corpus(queries, &io.warnings);

    const std::string out_path = stage_detail::corpus_path(cfg, io);
    persist_corpus(corpus, out_path);
    manifest.add_output(out_path);
    manifest.write(io.out_dir);
}

inline void run_process(const PipelineConfig& cfg, StageIO& io) {
    const std::string corpus_file = stage_detail::corpus_path(cfg, io);
    require_artifact(io.out_dir, corpus_file, "fetch", io.force, &io.warnings);
    Manifest manifest(Stage::Process, cfg, 0);
    manifest.add_input(corpus_file);

    const Corpus corpus = load_corpus(corpus_file);
    const auto exclusions = stage_detail::load_exclusions(cfg, io);
    TokenizedDocs td;
    td.docs = tokenize_corpus(corpus, exclusions);
    for (const auto& r : corpus.records) td.meta.push_back({r.record_id, r.author_id});

    const auto vocab = build_vocabulary(td.docs,
                                        std::uint64_t(cfg.get_int("vocab_min_count", 2)));

    write_docs_json(td, io.path("docs.json"));
    write_vocabulary_csv(vocab, io.path("vocabulary.csv"));
    manifest.add_output(io.path("docs.json"));
    manifest.add_output(io.path("vocabulary.csv"));

    try {
        const ZipfFit fit = fit_zipf_mandelbrot(vocab);
        write_zipf_json(fit, io.path("zipf.json"));
        write_zipf_curve_csv(vocab, fit, io.path("zipf_curve.csv"));
        manifest.add_output(io.path("zipf.json"));
        manifest.add_output(io.path("zipf_curve.csv"));
    } catch (const error& e) {
        io.warnings.push_back(std::string("zipf fit skipped: ") + e.what());
    }
    manifest.write(io.out_dir);
}

inline void run_matrix(const PipelineConfig& cfg, StageIO& io) {
    cfg.validate();
    require_artifact(io.out_dir, io.path("docs.json"), "process", io.force, &io.warnings);
    require_artifact(io.out_dir, io.path("vocabulary.csv"), "process", io.force, &io.warnings);
    Manifest manifest(Stage::Matrix, cfg, 0);
    manifest.add_input(io.path("docs.json"));
    manifest.add_input(io.path("vocabulary.csv"));

    const TokenizedDocs td = read_docs_json(io.path("docs.json"));
    const Vocabulary vocab = read_vocabulary_csv(io.path("vocabulary.csv"));
    const auto truncated = vocab.truncated(std::size_t(cfg.get_int("vocab_size", 5000)));

    const auto full = build_matrix(td.docs, truncated, td.meta, &io.warnings);
    auto [deduped, report] = dedupe_rows(full);

    write_matrix_csv(deduped, io.path("matrix.csv"));
    write_matrix_sidecar_json(deduped, io.path("matrix_docs.json"));
    nlohmann::json dj;
    dj["n_rows_before"] = full.n_docs();
    dj["n_rows_after"] = deduped.n_docs();
    dj["fraction_dropped"] = report.fraction_dropped;
    dj["dropped_rows"] = report.dropped_rows;
    dj["kept_representative"] = nlohmann::json::object();
    for (const auto& [dropped, kept] : report.kept_representative)
        dj["kept_representative"][std::to_string(dropped)] = kept;
    {
        std::ofstream out(io.path("dedup.json"), std::ios::binary);
        out << dj.dump(2) << '\n';
    }
    manifest.add_output(io.path("matrix.csv"));
    manifest.add_output(io.path("matrix_docs.json"));
    manifest.add_output(io.path("dedup.json"));
    manifest.write(io.out_dir);
}

inline void run_embed(const PipelineConfig& cfg, StageIO& io) {
    require_artifact(io.out_dir, io.path("matrix.csv"), "matrix", io.force, &io.warnings);
    require_artifact(io.out_dir, io.path("matrix_docs.json"), "matrix", io.force, &io.warnings);
    require_artifact(io.out_dir, io.path("vocabulary.csv"), "process", io.force, &io.warnings);
    Manifest manifest(Stage::Embed, cfg, std::uint64_t(cfg.get_int("seed", 42)));
    manifest.add_input(io.path("matrix.csv"));
    manifest.add_input(io.path("matrix_docs.json"));
    manifest.add_input(io.path("vocabulary.csv"));

    const auto x = read_matrix_csv(io.path("matrix.csv"), io.path("matrix_docs.json"));
    const Vocabulary vocab = read_vocabulary_csv(io.path("vocabulary.csv"));

    auto term_dist = pairwise_term_distances(x, &io.warnings);
    const auto params = stage_detail::umap_params(cfg);
    const auto emb = umap_embed(term_dist.dist, term_dist.term_ranks, params);

    write_embedding_csv(emb, vocab, io.path("embedding.csv"));
    manifest.add_output(io.path("embedding.csv"));

    if (cfg.get_bool("export_term_distances", false)) {
        write_condensed_binary(term_dist.dist, io.path("term_distances.bin"));
        manifest.add_output(io.path("term_distances.bin"));
    }

    nlohmann::json stats;
    stats["n_points"] = emb.size();
    stats["dim"] = emb.dim;
    // neighbor preservation, reported to guide the choice of dim
    const std::size_t trust_cap = std::size_t(cfg.get_int("trustworthiness_max_points", 2000));
    if (emb.size() <= trust_cap && 2 * emb.size() > 3 * params.n_neighbors + 1) {
        stats["trustworthiness_k"] = params.n_neighbors;
        stats["trustworthiness"] =
            trustworthiness(term_dist.dist, term_dist.term_ranks, emb, params.n_neighbors);
    }
    {
        std::ofstream out(io.path("embed_stats.json"), std::ios::binary);
        out << stats.dump(2) << '\n';
    }
    manifest.add_output(io.path("embed_stats.json"));
    manifest.write(io.out_dir);
}

inline void run_distances(const PipelineConfig& cfg, StageIO& io) {
    const std::string corpus_file = stage_detail::corpus_path(cfg, io);
    require_artifact(io.out_dir, corpus_file, "fetch", io.force, &io.warnings);
    require_artifact(io.out_dir, io.path("docs.json"), "process", io.force, &io.warnings);
    require_artifact(io.out_dir, io.path("vocabulary.csv"), "process", io.force, &io.warnings);
    require_artifact(io.out_dir, io.path("embedding.csv"), "embed", io.force, &io.warnings);
    Manifest manifest(Stage::Distances, cfg, std::uint64_t(cfg.get_int("seed", 42)));
    manifest.add_input(corpus_file);
    manifest.add_input(io.path("docs.json"));
    manifest.add_input(io.path("vocabulary.csv"));
    manifest.add_input(io.path("embedding.csv"));

    const Corpus corpus = load_corpus(corpus_file);
    const TokenizedDocs td = read_docs_json(io.path("docs.json"));
    const Vocabulary vocab = read_vocabulary_csv(io.path("vocabulary.csv"));
    const auto truncated = vocab.truncated(std::size_t(cfg.get_int("vocab_size", 5000)));
    const auto emb = read_embedding_csv(io.path("embedding.csv"));

    const auto profiles = author_profiles(corpus, td.docs, &io.warnings);
    const bool skip_empty = cfg.get_bool("skip_empty_authors", false);

    std::vector<WeightedPointPattern> patterns;
    std::vector<AuthorProfile> used_profiles;
    std::vector<std::string> ids;
    for (const auto& p : profiles) {
        try {
            patterns.push_back(make_point_pattern(p, emb, truncated));
            used_profiles.push_back(p);
            ids.push_back(p.author_id);
        } catch (const error& e) {
            if (!skip_empty) throw;
            io.warnings.push_back(std::string(e.what()) + "; author excluded");
        }
    }

    const auto params = stage_detail::ot_params(cfg);
    const auto w = pairwise_author_distances(patterns, params);
    const auto direct = pairwise_direct_distances(used_profiles, truncated);

    write_condensed_binary(w, io.path("wasserstein.bin"));
    write_distance_csv(w, ids, io.path("wasserstein.csv"));
    write_condensed_binary(direct, io.path("direct.bin"));
    write_distance_csv(direct, ids, io.path("direct.csv"));
    {
        nlohmann::json j;
        j["author_ids"] = ids;
        std::ofstream out(io.path("distance_authors.json"), std::ios::binary);
        out << j.dump(2) << '\n';
    }
    for (const char* f : {"wasserstein.bin", "wasserstein.csv", "direct.bin", "direct.csv",
                          "distance_authors.json"})
        manifest.add_output(io.path(f));
    manifest.write(io.out_dir);
}

namespace stage_detail {

inline std::vector<std::string> load_distance_authors(const StageIO& io) {
    std::ifstream in(io.path("distance_authors.json"), std::ios::binary);
    if (!in) throw error("cannot open " + io.path("distance_authors.json"));
    nlohmann::json j = nlohmann::json::parse(in);
    return j.at("author_ids").get<std::vector<std::string>>();
}

// pooled per-cluster term counts from author profiles
inline std::vector<std::map<std::string, std::uint64_t>> cluster_pooled_counts(
    const Partition& part, const std::vector<std::string>& ids,
    const std::vector<AuthorProfile>& profiles) {
    std::unordered_map<std::string, const AuthorProfile*> by_id;
    for (const auto& p : profiles) by_id[p.author_id] = &p;
    std::vector<std::map<std::string, std::uint64_t>> counts(part.n_communities());
    for (std::size_t v = 0; v < ids.size(); ++v) {
        auto it = by_id.find(ids[v]);
        if (it == by_id.end()) continue;
        for (const auto& [term, c] : it->second->term_counts)
            counts[part.assignment[v]][term] += c;
    }
    return counts;
}

}  // namespace stage_detail

inline void run_graph(const PipelineConfig& cfg, StageIO& io) {
    const std::string corpus_file = stage_detail::corpus_path(cfg, io);
    require_artifact(io.out_dir, io.path("wasserstein.bin"), "distances", io.force, &io.warnings);
    require_artifact(io.out_dir, io.path("distance_authors.json"), "distances", io.force,
                     &io.warnings);
    require_artifact(io.out_dir, io.path("docs.json"), "process", io.force, &io.warnings);
    require_artifact(io.out_dir, io.path("vocabulary.csv"), "process", io.force, &io.warnings);
    const std::uint64_t seed = std::uint64_t(cfg.get_int("seed", 42));
    Manifest manifest(Stage::Graph, cfg, seed);
    manifest.add_input(io.path("wasserstein.bin"));
    manifest.add_input(io.path("distance_authors.json"));

    const auto w = read_condensed_binary(io.path("wasserstein.bin"));
    const auto ids = stage_detail::load_distance_authors(io);
    const Corpus corpus = load_corpus(corpus_file);
    const TokenizedDocs td = read_docs_json(io.path("docs.json"));
    const Vocabulary vocab = read_vocabulary_csv(io.path("vocabulary.csv"));

    const std::size_t k = std::size_t(cfg.get_int("knn_k", 3));
    const AuthorGraph ag = build_author_graph(w, ids, k);
    const auto g = ag.graph();
    const auto louv =
        louvain_best(g, std::size_t(cfg.get_int("louvain_replicates", 20)), seed);

    // vertex attributes for the exports
    std::map<std::string, std::string> groups;
    const std::string groups_path = cfg.get_path("groups");
    if (!groups_path.empty()) groups = read_groups_csv(groups_path);
    std::unordered_map<std::string, std::string> display;
    std::unordered_map<std::string, std::size_t> abstract_count;
    for (const auto& a : corpus.authors) display[a.author_id] = a.display_name;
    for (const auto& r : corpus.records) ++abstract_count[r.author_id];

    std::vector<VertexAttributes> verts(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) {
        verts[i].author_id = ids[i];
        verts[i].display_name = display.count(ids[i]) ? display[ids[i]] : "";
        verts[i].group = groups.count(ids[i]) ? groups[ids[i]] : "";
        verts[i].cluster = louv.best.assignment[i] + 1;
        verts[i].n_abstracts = abstract_count.count(ids[i]) ? abstract_count[ids[i]] : 0;
    }

    write_graphml(verts, ag.undirected, io.path("graph.graphml"), &w);
    write_dot(verts, ag.undirected, io.path("graph.dot"), &w);

    const auto profiles = author_profiles(corpus, td.docs);
    const auto pooled = stage_detail::cluster_pooled_counts(louv.best, ids, profiles);
    std::map<std::string, std::uint64_t> global_counts;
    for (std::size_t i = 0; i < vocab.size(); ++i) global_counts[vocab.terms[i]] = vocab.freq[i];
    const auto words =
        characteristic_words(pooled, global_counts, std::size_t(cfg.get_int("top_words", 10)),
                             std::uint64_t(cfg.get_int("min_word_count", 5)));
    write_cluster_report_csv(louv.best, ids, words, io.path("clusters.csv"));

    nlohmann::json pj;
    pj["epsilon"] = ag.epsilon;
    pj["k"] = k;
    pj["q"] = louv.best.q;
    pj["assignment"] = louv.best.assignment;
    pj["author_ids"] = ids;
    pj["cluster_count_frequency"] = nlohmann::json::object();
    for (const auto& [nc, count] : louv.cluster_count_frequency)
        pj["cluster_count_frequency"][std::to_string(nc)] = count;
    {
        std::ofstream out(io.path("partition.json"), std::ios::binary);
        out << pj.dump(2) << '\n';
    }
    for (const char* f : {"graph.graphml", "graph.dot", "clusters.csv", "partition.json"})
        manifest.add_output(io.path(f));
    manifest.write(io.out_dir);
}

inline void run_report(const PipelineConfig& cfg, StageIO& io) {
    const std::string corpus_file = stage_detail::corpus_path(cfg, io);
    require_artifact(io.out_dir, io.path("wasserstein.bin"), "distances", io.force, &io.warnings);
    require_artifact(io.out_dir, io.path("direct.bin"), "distances", io.force, &io.warnings);
    require_artifact(io.out_dir, io.path("partition.json"), "graph", io.force, &io.warnings);
    const std::uint64_t seed = std::uint64_t(cfg.get_int("seed", 42));
    Manifest manifest(Stage::Report, cfg, seed);
    for (const char* f : {"wasserstein.bin", "direct.bin", "partition.json"})
        manifest.add_input(io.path(f));

    const auto w = read_condensed_binary(io.path("wasserstein.bin"));
    const auto direct = read_condensed_binary(io.path("direct.bin"));
    const auto ids = stage_detail::load_distance_authors(io);
    const Corpus corpus = load_corpus(corpus_file);
    const Vocabulary vocab = read_vocabulary_csv(io.path("vocabulary.csv"));

    nlohmann::json stats;

    Partition louvain_part;
    double epsilon = 0.0;
    std::size_t k = 3;
    {
        std::ifstream in(io.path("partition.json"), std::ios::binary);
        nlohmann::json pj = nlohmann::json::parse(in);
        louvain_part.assignment = pj.at("assignment").get<std::vector<int>>();
        louvain_part.q = pj.at("q").get<double>();
        epsilon = pj.at("epsilon").get<double>();
        k = pj.at("k").get<std::size_t>();
        const auto pids = pj.at("author_ids").get<std::vector<std::string>>();
        if (pids != ids) throw error("report: partition author order mismatch");
    }
    stats["epsilon"] = epsilon;
    stats["k"] = k;
    stats["louvain"] = {{"q", louvain_part.q},
                        {"n_communities", louvain_part.n_communities()}};

    const AuthorGraph ag = build_author_graph(w, ids, k);
    const auto g = ag.graph();
    const auto deg = degree_stats(g);
    stats["degree"] = {{"min", deg.min}, {"max", deg.max}, {"mean", deg.mean}};

    const auto closeness = closeness_centrality(g);
    stats["closeness"] = nlohmann::json::array();
    for (std::size_t v = 0; v < ids.size(); ++v) {
        nlohmann::json jv;
        jv["author_id"] = ids[v];
        jv["in_giant_component"] = bool(closeness.in_giant[v]);
        if (closeness.value[v]) jv["value"] = *closeness.value[v];
        else jv["value"] = nullptr;
        stats["closeness"].push_back(jv);
    }

    // distance-matrix comparison (Wasserstein vs direct word-to-word)
    const auto rho = compare_distances(w, direct);
    stats["spearman_wasserstein_vs_direct"] = {
        {"rho", rho.rho}, {"ci95_low", rho.ci95_low}, {"ci95_high", rho.ci95_high}};
    {
        auto out = io_detail::open_out(io.path("compare_authors.csv"));
        out << "author_id,other_id,wasserstein,direct\n";
        for (std::size_t i = 0; i < ids.size(); ++i)
            for (std::size_t j = 0; j < ids.size(); ++j)
                if (i != j)
                    out << detail::csv_quote(ids[i]) << ',' << detail::csv_quote(ids[j]) << ','
                        << fmt_double(w.at(i, j)) << ',' << fmt_double(direct.at(i, j)) << '\n';
    }

    // closeness comparison against the direct-distance graph, paired over
    // vertices in the Wasserstein graph's giant component
    {
        const AuthorGraph ag_direct = build_author_graph(direct, ids, k);
        const auto closeness_direct = closeness_centrality(ag_direct.graph());
        std::vector<double> cw, cd;
        for (std::size_t v = 0; v < ids.size(); ++v)
            if (closeness.in_giant[v] && closeness.value[v] && closeness_direct.value[v]) {
                cw.push_back(*closeness.value[v]);
                cd.push_back(*closeness_direct.value[v]);
            }
        if (cw.size() >= 3) {
            try {
                const auto wil = wilcoxon_signed_rank(cd, cw);
                stats["wilcoxon_closeness_direct_vs_wasserstein"] = {
                    {"statistic", wil.statistic},
                    {"p_two_sided", wil.p_two_sided},
                    {"n_pairs", wil.n_used},
                    {"exact", wil.exact}};
            } catch (const error& e) {
                io.warnings.push_back(std::string("wilcoxon skipped: ") + e.what());
            }
        }
    }

    // word-pair association for the two most frequent terms
    if (vocab.size() >= 2) {
        const auto x = read_matrix_csv(io.path("matrix.csv"), io.path("matrix_docs.json"));
        std::uint64_t a = 0, b = 0, c = 0, d = 0;
        for (const auto& row : x.rows) {
            const bool has1 = std::binary_search(row.begin(), row.end(), 1u);
            const bool has2 = std::binary_search(row.begin(), row.end(), 2u);
            if (has1 && has2) ++a;
            else if (has1) ++b;
            else if (has2) ++c;
            else ++d;
        }
        try {
            const auto fr = fisher_exact({a, b, c, d});
            stats["fisher_top2"] = {{"word1", vocab.terms[0]},
                                    {"word2", vocab.terms[1]},
                                    {"table", {a, b, c, d}},
                                    {"odds_ratio", fr.odds_ratio},
                                    {"ci95_low", fr.ci95_low},
                                    {"ci95_high", fr.ci95_high},
                                    {"p_two_sided", fr.p_two_sided}};
        } catch (const error& e) {
            io.warnings.push_back(std::string("fisher skipped: ") + e.what());
        }
    }

    // group statistics when external labels are available
    const std::string groups_path = cfg.get_path("groups");
    if (!groups_path.empty()) {
        const auto groups = read_groups_csv(groups_path);
        std::vector<std::string> group_names;
        std::map<std::string, int> group_id;
        std::vector<int> labels(ids.size(), -1);
        for (std::size_t v = 0; v < ids.size(); ++v) {
            auto it = groups.find(ids[v]);
            if (it == groups.end())
                throw error("groups file missing author '" + ids[v] + "'");
            if (!group_id.count(it->second)) {
                group_id[it->second] = int(group_names.size());
                group_names.push_back(it->second);
            }
            labels[v] = group_id[it->second];
        }

        Partition group_part;
        group_part.assignment = labels;
        stats["ari_louvain_vs_groups"] = adjusted_rand_index(louvain_part, group_part);

        const auto within =
            within_cluster_distance(g, labels, int(group_names.size()));
        const auto null_dist = permutation_null(
            g, labels, int(group_names.size()),
            std::size_t(cfg.get_int("permutation_replicates", 500)), seed);
        stats["groups"] = nlohmann::json::array();
        for (std::size_t c2 = 0; c2 < group_names.size(); ++c2) {
            nlohmann::json gj;
            gj["group"] = group_names[c2];
            if (within[c2].mean) gj["within_distance"] = *within[c2].mean;
            else gj["within_distance"] = nullptr;
            gj["n_pairs"] = within[c2].n_pairs;
            gj["n_unreachable"] = within[c2].n_unreachable;
            gj["null_mean"] = null_dist.groups[c2].null_mean;
            gj["null_q05"] = null_dist.groups[c2].q05;
            gj["null_q95"] = null_dist.groups[c2].q95;
            gj["p_leq"] = null_dist.groups[c2].p_leq;
            stats["groups"].push_back(gj);
        }
    }

    {
        std::ofstream out(io.path("stats.json"), std::ios::binary);
        out << stats.dump(2) << '\n';
    }
    manifest.add_output(io.path("stats.json"));
    manifest.add_output(io.path("compare_authors.csv"));
    manifest.write(io.out_dir);
}

inline void run_stage(Stage stage, const PipelineConfig& cfg, StageIO& io,
                      const HttpGetFn& http = nullptr, Clock* clock = nullptr) {
    std::filesystem::create_directories(io.out_dir);
    switch (stage) {
        case Stage::Fetch:
            if (!http) throw error("fetch: no HTTP transport configured");
            run_fetch(cfg, io, http, clock);
            break;
        case Stage::Process: run_process(cfg, io); break;
        case Stage::Matrix: run_matrix(cfg, io); break;
        case Stage::Embed: run_embed(cfg, io); break;
        case Stage::Distances: run_distances(cfg, io); break;
        case Stage::Graph: run_graph(cfg, io); break;
        case Stage::Report: run_report(cfg, io); break;
    }
}

}  // namespace atlas
