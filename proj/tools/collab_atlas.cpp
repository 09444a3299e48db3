// collab-atlas: publication abstracts -> author similarity network.
// Subcommands mirror the pipeline stages; each stage reads its
// predecessors' artifacts from the output directory and records a manifest.

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "atlas/demo_corpus.hpp"
#include "atlas/http_client.hpp"
#include "atlas/stages.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    bool force = false;
};

atlas::PipelineConfig load_config(const CommonArgs& args) {
    atlas::PipelineConfig cfg;
    if (!args.config_path.empty()) cfg = atlas::PipelineConfig::from_file(args.config_path);
    return cfg;
}

std::string resolve_out_dir(const CommonArgs& args, const atlas::PipelineConfig& cfg) {
    if (!args.out_dir.empty()) return args.out_dir;
    const std::string from_cfg = cfg.get_path("output_dir");
    return from_cfg.empty() ? "out" : from_cfg;
}

void print_warnings(const atlas::StageIO& io) {
    for (const auto& w : io.warnings) std::cerr << "warning: " << w << "\n";
}

int run_one_stage(atlas::Stage stage, const CommonArgs& args,
                  long long layout_threads = 0, long long ot_threads = 0) {
    auto cfg = load_config(args);
    if (layout_threads > 0) cfg.set("umap_layout_threads", std::to_string(layout_threads));
    if (ot_threads > 0) cfg.set("threads", std::to_string(ot_threads));
    atlas::StageIO io;
    io.out_dir = resolve_out_dir(args, cfg);
    io.force = args.force;
    atlas::HttpGetFn http;
    if (stage == atlas::Stage::Fetch)
        http = atlas::make_http_get(cfg.get_string("base_url", "https://eutils.ncbi.nlm.nih.gov"));
    atlas::run_stage(stage, cfg, io, http);
    print_warnings(io);
    std::cout << atlas::stage_name(stage) << ": done (artifacts in " << io.out_dir << ")\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"collab-atlas: build a research-interest similarity network from abstracts"};
    app.require_subcommand(1);

    CommonArgs args;
    std::string queries_path, fetch_out;
    double rate = 0.0;
    long long retries = -1;

    auto add_common = [&](CLI::App* sub, bool with_force = true) {
        sub->add_option("--config", args.config_path, "key = value configuration file");
        sub->add_option("--out-dir", args.out_dir, "artifact directory (default: out)");
        if (with_force)
            sub->add_flag("--force", args.force, "proceed despite stale-input hash mismatches");
    };

    auto* fetch = app.add_subcommand("fetch", "retrieve publication records per author query");
    add_common(fetch, false);
    fetch->add_option("--queries", queries_path, "CSV of author queries");
    fetch->add_option("--out", fetch_out, "corpus JSON output path");
    fetch->add_option("--rate", rate, "max requests per second");
    fetch->add_option("--retries", retries, "max retries per request");

    long long layout_threads = 0, ot_threads = 0;
    auto* process = app.add_subcommand("process", "tokenize, build vocabulary, fit Zipf-Mandelbrot");
    add_common(process);
    auto* matrix = app.add_subcommand("matrix", "build and deduplicate the document-term matrix");
    add_common(matrix);
    auto* embed = app.add_subcommand("embed", "term angular distances and UMAP embedding");
    add_common(embed);
    embed->add_option("--layout-threads", layout_threads,
                      "UMAP layout workers (>1 is faster but not bit-reproducible)");
    auto* distances = app.add_subcommand("distances", "pairwise author Wasserstein distances");
    add_common(distances);
    distances->add_option("--threads", ot_threads, "concurrent transport solves");
    auto* graph = app.add_subcommand("graph", "k-NN author graph, Louvain clusters, exports");
    add_common(graph);
    auto* report = app.add_subcommand("report", "summary statistics JSON");
    add_common(report);

    std::string demo_out_dir = "demo";
    std::size_t demo_authors = 12, demo_docs = 15;
    std::uint64_t demo_seed = 7;
    auto* demo = app.add_subcommand("demo-corpus",
                                    "write a synthetic corpus with planted topical clusters");
    demo->add_option("--out-dir", demo_out_dir, "directory for corpus/queries/groups files");
    demo->add_option("--authors", demo_authors, "number of synthetic authors");
    demo->add_option("--docs-per-author", demo_docs, "records per author");
    demo->add_option("--seed", demo_seed, "generator seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (demo->parsed()) {
            std::filesystem::create_directories(demo_out_dir);
            atlas::DemoCorpusOptions opt;
            opt.n_authors = demo_authors;
            opt.docs_per_author = demo_docs;
            opt.seed = demo_seed;
            const auto corpus = atlas::make_demo_corpus(opt);
            const auto dir = std::filesystem::path(demo_out_dir);
            atlas::persist_corpus(corpus, (dir / "corpus.json").string());
            {
                std::ofstream q(dir / "queries.csv", std::ios::binary);
                q << "author_id,display_name,query\n";
                for (const auto& a : corpus.authors)
                    q << a.author_id << ',' << atlas::detail::csv_quote(a.display_name) << ','
                      << atlas::detail::csv_quote(a.query) << '\n';
            }
            {
                std::ofstream g(dir / "groups.csv", std::ios::binary);
                g << "author_id,group\n";
                for (const auto& a : corpus.authors)
                    g << a.author_id << ',' << atlas::demo_group_of(corpus, a.author_id) << '\n';
            }
            std::cout << "demo corpus written to " << demo_out_dir << " ("
                      << corpus.records.size() << " records, " << corpus.authors.size()
                      << " authors)\n";
            return 0;
        }

        atlas::Stage stage;
        if (fetch->parsed()) stage = atlas::Stage::Fetch;
        else if (process->parsed()) stage = atlas::Stage::Process;
        else if (matrix->parsed()) stage = atlas::Stage::Matrix;
        else if (embed->parsed()) stage = atlas::Stage::Embed;
        else if (distances->parsed()) stage = atlas::Stage::Distances;
        else if (graph->parsed()) stage = atlas::Stage::Graph;
        else stage = atlas::Stage::Report;

        if (fetch->parsed()) {
            auto cfg = load_config(args);
            if (!queries_path.empty()) cfg.set("queries", queries_path);
            if (!fetch_out.empty()) cfg.set("corpus", fetch_out);
            if (rate > 0.0) cfg.set("rate", std::to_string(rate));
            if (retries >= 0) cfg.set("retries", std::to_string(retries));
            atlas::StageIO io;
            io.out_dir = resolve_out_dir(args, cfg);
            io.force = args.force;
            auto http = atlas::make_http_get(
                cfg.get_string("base_url", "https://eutils.ncbi.nlm.nih.gov"));
            atlas::run_stage(stage, cfg, io, http);
            print_warnings(io);
            std::cout << "fetch: done\n";
            return 0;
        }
        return run_one_stage(stage, args, layout_threads, ot_threads);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
