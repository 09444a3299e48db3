#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "atlas/common.hpp"
#include "atlas/corpus.hpp"

namespace atlas {

// Synthetic corpus with planted topical clusters: authors draw most of
// their words from their topic's pool plus a shared background pool, with
// stopwords and numerals mixed in to exercise the filters, and occasional
// co-authored records to exercise deduplication.
struct DemoCorpusOptions {
    std::size_t n_authors = 12;
    std::size_t docs_per_author = 15;
    std::uint64_t seed = 7;
    double coauthor_prob = 0.08;  // chance a record is shared with a peer
};

namespace demo_detail {

inline const std::vector<std::vector<std::string>>& topic_pools() {
    static const std::vector<std::vector<std::string>> pools = {
        {"virus", "viral", "infection", "hiv-1", "genome", "replication", "antibody",
         "vaccine", "epitope", "strain", "pathogen", "immune", "lymphocyte", "sequence",
         "mutation", "phylogenetic", "transmission", "outbreak", "serology", "titer",
         "capsid", "glycoprotein", "neutralization", "resistance", "covid",
         "respiratory", "influenza", "hepatitis", "retrovirus", "virology"},
        {"tumor", "cancer", "carcinoma", "metastasis", "biopsy", "chemotherapy",
         "oncogene", "malignant", "prognosis", "survival", "recurrence", "lymph",
         "node", "prostate", "bladder", "radiotherapy", "staging", "grade",
         "histology", "resection", "margin", "adjuvant", "screening", "melanoma",
         "sarcoma", "leukemia", "lymphoma", "oncology", "remission", "cytology"},
        {"neuron", "synaptic", "cortex", "cognitive", "memory", "hippocampus",
         "axon", "dendrite", "glia", "plasticity", "neurodegeneration", "amyloid",
         "tau", "motor", "sensory", "spinal", "cerebral", "dopamine", "receptor",
         "channel", "potential", "stimulus", "behavior", "lesion", "imaging",
         "sclerosis", "dementia", "seizure", "reflex", "neurology"},
        {"cardiac", "myocardial", "heart", "vascular", "artery", "ventricle",
         "ischemia", "infarction", "hypertension", "blood", "pressure", "aortic",
         "valve", "stenosis", "cardiomyocyte", "fibrosis", "arrhythmia",
         "echocardiography", "stent", "bypass", "cholesterol", "lipid", "plaque",
         "thrombosis", "perfusion", "coronary", "atrial", "systolic", "diastolic",
         "cardiology"},
    };
    return pools;
}

inline const std::vector<std::string>& background_pool() {
    static const std::vector<std::string> pool = {
        "patient", "cell", "study", "analysis", "method", "result", "group",
        "control", "sample", "tissue", "protein", "gene", "expression", "level",
        "effect", "model", "clinical", "treatment", "response", "outcome", "risk",
        "factor", "age", "disease", "diagnosis", "therapy", "trial", "cohort",
        "baseline", "followup", "measurement", "assay", "marker", "pathway",
        "mechanism", "function", "structure", "population", "association",
        "significant", "increase", "decrease", "comparison", "evaluation",
        "assessment", "finding", "evidence", "approach", "technique", "procedure",
    };
    return pool;
}

inline const std::vector<std::string>& filler_words() {
    // exercised by the exclusion and numeric filters
    static const std::vector<std::string> pool = {
        "the", "of", "and", "in", "with", "for", "was", "were", "a", "an",
        "0.05", "-0.1", "12", "3.5", "100",
    };
    return pool;
}

}  // namespace demo_detail

inline Corpus make_demo_corpus(const DemoCorpusOptions& opt = {}) {
    using namespace demo_detail;
    const auto& topics = topic_pools();
    const auto& background = background_pool();
    const auto& filler = filler_words();

    Corpus corpus;
    rng64 rng(hash_mix(opt.seed, 0x64656d6fULL));

    for (std::size_t i = 0; i < opt.n_authors; ++i) {
        AuthorQuery q;
        q.author_id = "a" + std::to_string(i + 1);
        const std::size_t topic = i % topics.size();
        q.display_name = "Author " + std::to_string(i + 1);
        q.query = "author " + std::to_string(i + 1) + "[au] AND topic " +
                  std::to_string(topic + 1) + "[mh]";
        corpus.authors.push_back(std::move(q));
    }
    corpus.retrieved_at = "2024-06-01T00:00:00Z";

    // log-skewed rank sampling gives the corpus a Zipf-like tail
    auto skewed_index = [&](std::size_t size) {
        const double u = rng.next_double();
        const auto idx = std::size_t(std::pow(double(size) + 1.0, u)) - 1;
        return std::min(idx, size - 1);
    };
    auto sample_word = [&](std::size_t topic) -> std::string {
        const double roll = rng.next_double();
        if (roll < 0.62) {
            const auto& pool = topics[topic];
            return pool[skewed_index(pool.size())];
        }
        if (roll < 0.90) return background[skewed_index(background.size())];
        return filler[rng.next_below(filler.size())];
    };
    auto sentence = [&](std::size_t topic, std::size_t n_words) {
        std::string s;
        for (std::size_t w = 0; w < n_words; ++w) {
            if (!s.empty()) s.push_back(' ');
            s += sample_word(topic);
        }
        return s;
    };

    std::size_t next_pmid = 1000000;
    for (std::size_t i = 0; i < opt.n_authors; ++i) {
        const std::size_t topic = i % topics.size();
        for (std::size_t d = 0; d < opt.docs_per_author; ++d) {
            PublicationRecord rec;
            rec.record_id = std::to_string(next_pmid++);
            rec.title = sentence(topic, 6 + rng.next_below(5));
            rec.abstract = d % 11 == 10 ? "" : sentence(topic, 60 + rng.next_below(40));
            const std::size_t n_kw = 3 + rng.next_below(3);
            for (std::size_t k = 0; k < n_kw; ++k) rec.keywords.push_back(sample_word(topic));
            rec.authors.push_back(corpus.authors[i].display_name);
            rec.author_id = corpus.authors[i].author_id;

            if (rng.next_double() < opt.coauthor_prob) {
                // same-topic co-author retrieves the same record
                const std::size_t peer =
                    (i + topics.size()) % opt.n_authors;  // next author in this topic
                if (peer != i) {
                    PublicationRecord dup = rec;
                    dup.author_id = corpus.authors[peer].author_id;
                    dup.authors.push_back(corpus.authors[peer].display_name);
                    rec.authors.push_back(corpus.authors[peer].display_name);
                    corpus.records.push_back(rec);
                    corpus.records.push_back(std::move(dup));
                    continue;
                }
            }
            corpus.records.push_back(std::move(rec));
        }
    }
    corpus.check_invariants();
    return corpus;
}

inline std::string demo_group_of(const Corpus& corpus, const std::string& author_id) {
    static const std::array<const char*, 4> names = {"virology", "oncology", "neuroscience",
                                                     "cardiology"};
    for (std::size_t i = 0; i < corpus.authors.size(); ++i)
        if (corpus.authors[i].author_id == author_id)
            return names[i % names.size()];
    throw error("demo corpus: unknown author " + author_id);
}

}  // namespace atlas
