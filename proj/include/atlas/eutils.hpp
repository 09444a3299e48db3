#pragma once

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "atlas/common.hpp"
#include "atlas/corpus.hpp"

namespace atlas {

// Injectable time source so the rate limiter is testable against a mock clock.
struct Clock {
    virtual ~Clock() = default;
    virtual double now() const = 0;            // seconds, monotonic
    virtual void sleep_for(double seconds) = 0;
};

struct SystemClock final : Clock {
    double now() const override {
        return std::chrono::duration<double>(
                   std::chrono::steady_clock::now().time_since_epoch())
            .count();
    }
    void sleep_for(double seconds) override {
        std::this_thread::sleep_for(std::chrono::duration<double>(seconds));
    }
};

// Sliding-window limiter: at most `per_second` acquisitions in any 1-second
// window. Shared across queries, safe for concurrent use.
class RateLimiter {
public:
    RateLimiter(double per_second, Clock& clock) : limit_(per_second), clock_(clock) {
        if (!(per_second > 0.0)) throw error("rate limiter: rate must be positive");
    }

    void acquire() {
        std::unique_lock<std::mutex> lock(mutex_);
        while (true) {
            const double now = clock_.now();
            while (!issued_.empty() && issued_.front() <= now - 1.0) issued_.pop_front();
            if (double(issued_.size()) < limit_) {
                issued_.push_back(now);
                return;
            }
            const double wait = issued_.front() + 1.0 - now;
            lock.unlock();
            clock_.sleep_for(std::max(wait, 1e-4));
            lock.lock();
        }
    }

private:
    double limit_;
    Clock& clock_;
    std::mutex mutex_;
    std::deque<double> issued_;
};

struct HttpResponse {
    bool transport_ok = false;
    int status = 0;
    std::string body;
    std::string error;
};

using HttpGetFn = std::function<HttpResponse(const std::string& path_and_query)>;

struct ClientConfig {
    std::string base_url = "https://eutils.ncbi.nlm.nih.gov";
    std::string base_path = "/entrez/eutils";
    std::string api_key;       // empty = read COLLAB_ATLAS_API_KEY from the environment
    double max_rate = 0.0;     // requests/second; <= 0 picks 3 (no key) or 10 (key)
    std::size_t page_size = 100;
    std::size_t max_retries = 3;
    double backoff_initial_s = 0.5;  // doubled per retry
    double backoff_max_s = 8.0;

    std::string resolved_api_key() const {
        if (!api_key.empty()) return api_key;
        const char* env = std::getenv("COLLAB_ATLAS_API_KEY");
        return env ? env : "";
    }

    double resolved_rate() const {
        if (max_rate > 0.0) return max_rate;
        return resolved_api_key().empty() ? 3.0 : 10.0;
    }
};

namespace eutils_detail {

inline std::string url_encode(const std::string& s) {
    static const char* hex = "0123456789ABCDEF";
    std::string out;
    for (unsigned char c : s) {
        if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
            out.push_back(char(c));
        } else if (c == ' ') {
            out.push_back('+');
        } else {
            out.push_back('%');
            out.push_back(hex[c >> 4]);
            out.push_back(hex[c & 15]);
        }
    }
    return out;
}

inline std::string xml_unescape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        if (s[i] != '&') {
            out.push_back(s[i++]);
            continue;
        }
        const std::size_t semi = s.find(';', i);
        if (semi == std::string::npos || semi - i > 10) {
            out.push_back(s[i++]);
            continue;
        }
        const std::string ent = s.substr(i + 1, semi - i - 1);
        if (ent == "amp") out.push_back('&');
        else if (ent == "lt") out.push_back('<');
        else if (ent == "gt") out.push_back('>');
        else if (ent == "quot") out.push_back('"');
        else if (ent == "apos") out.push_back('\'');
        else if (!ent.empty() && ent[0] == '#') {
            unsigned long code = 0;
            try {
                code = (ent.size() > 1 && (ent[1] == 'x' || ent[1] == 'X'))
                           ? std::stoul(ent.substr(2), nullptr, 16)
                           : std::stoul(ent.substr(1));
            } catch (...) { code = 0; }
            // encode the code point as UTF-8
            if (code == 0) { /* drop */ }
            else if (code < 0x80) out.push_back(char(code));
            else if (code < 0x800) {
                out.push_back(char(0xC0 | (code >> 6)));
                out.push_back(char(0x80 | (code & 0x3F)));
            } else if (code < 0x10000) {
                out.push_back(char(0xE0 | (code >> 12)));
                out.push_back(char(0x80 | ((code >> 6) & 0x3F)));
                out.push_back(char(0x80 | (code & 0x3F)));
            } else {
                out.push_back(char(0xF0 | (code >> 18)));
                out.push_back(char(0x80 | ((code >> 12) & 0x3F)));
                out.push_back(char(0x80 | ((code >> 6) & 0x3F)));
                out.push_back(char(0x80 | (code & 0x3F)));
            }
        } else {
            out.append(s, i, semi - i + 1);
        }
        i = semi + 1;
    }
    return out;
}

inline std::string strip_tags(const std::string& s) {
    std::string out;
    bool in_tag = false;
    for (char c : s) {
        if (c == '<') in_tag = true;
        else if (c == '>') in_tag = false;
        else if (!in_tag) out.push_back(c);
    }
    return out;
}

// All occurrences of <tag ...>inner</tag>, inner returned raw.
inline std::vector<std::string> tag_contents(const std::string& xml, const std::string& tag,
                                             std::size_t from = 0, std::size_t to = std::string::npos) {
    std::vector<std::string> out;
    const std::string open = "<" + tag;
    const std::string close = "</" + tag + ">";
    std::size_t pos = from;
    const std::size_t end = to == std::string::npos ? xml.size() : to;
    while (true) {
        std::size_t a = xml.find(open, pos);
        if (a == std::string::npos || a >= end) break;
        const std::size_t gt = xml.find('>', a);
        if (gt == std::string::npos || gt >= end) break;
        if (xml[gt - 1] == '/') {  // self-closing
            pos = gt + 1;
            out.emplace_back();
            continue;
        }
        const std::size_t b = xml.find(close, gt);
        if (b == std::string::npos || b > end) break;
        out.push_back(xml.substr(gt + 1, b - gt - 1));
        pos = b + close.size();
    }
    return out;
}

inline std::string first_tag_content(const std::string& xml, const std::string& tag) {
    auto all = tag_contents(xml, tag);
    return all.empty() ? std::string{} : all.front();
}

inline std::string clean_text(const std::string& raw) {
    return xml_unescape(strip_tags(raw));
}

// One PubmedArticle block -> PublicationRecord (author_id left empty).
inline PublicationRecord parse_article(const std::string& xml) {
    PublicationRecord rec;
    rec.record_id = clean_text(first_tag_content(xml, "PMID"));
    rec.title = clean_text(first_tag_content(xml, "ArticleTitle"));
    std::string abstract;
    for (const auto& part : tag_contents(xml, "AbstractText")) {
        if (!abstract.empty()) abstract.push_back(' ');
        abstract += clean_text(part);
    }
    rec.abstract = abstract;
    for (const auto& kw : tag_contents(xml, "Keyword"))
        rec.keywords.push_back(clean_text(kw));
    for (const auto& author : tag_contents(xml, "Author")) {
        const std::string last = clean_text(first_tag_content(author, "LastName"));
        const std::string initials = clean_text(first_tag_content(author, "Initials"));
        const std::string collective = clean_text(first_tag_content(author, "CollectiveName"));
        if (!last.empty())
            rec.authors.push_back(initials.empty() ? last : last + " " + initials);
        else if (!collective.empty())
            rec.authors.push_back(collective);
    }
    return rec;
}

inline std::vector<PublicationRecord> parse_article_set(const std::string& xml) {
    std::vector<PublicationRecord> out;
    for (const auto& art : tag_contents(xml, "PubmedArticle"))
        out.push_back(parse_article(art));
    return out;
}

}  // namespace eutils_detail

// Search-then-fetch client for an E-utilities style endpoint. The transport
// is injectable; the default (set by the CLI) is an HTTP client bound to
// config.base_url, and tests drive the same code against a local fixture
// server.
class EutilsClient {
public:
    EutilsClient(ClientConfig config, HttpGetFn http, Clock* clock = nullptr)
        : config_(std::move(config)),
          http_(std::move(http)),
          owned_clock_(clock ? nullptr : std::make_unique<SystemClock>()),
          clock_(clock ? *clock : *owned_clock_),
          limiter_(config_.resolved_rate(), clock_) {}

    // All matching records, paged search then batched fetch, tagged with
    // q.author_id. Zero matches is a warning, not an error.
    std::vector<PublicationRecord> fetch_author_records(const AuthorQuery& q,
                                                        std::vector<std::string>* warnings = nullptr) {
        using namespace eutils_detail;
        std::vector<std::string> ids;
        std::size_t expected = 0;
        std::size_t retstart = 0;
        do {
            std::string path = config_.base_path + "/esearch.fcgi?db=pubmed&retmode=json&term=" +
                               url_encode(q.query) + "&retstart=" + std::to_string(retstart) +
                               "&retmax=" + std::to_string(config_.page_size);
            const std::string body = get_with_retries(path, q);
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(body);
            } catch (const nlohmann::json::parse_error& e) {
                throw error("fetch '" + q.author_id + "': bad esearch response: " + e.what());
            }
            const auto& result = j.at("esearchresult");
            expected = parse_count(result.at("count"));
            for (const auto& id : result.at("idlist"))
                ids.push_back(id.get<std::string>());
            retstart = ids.size();
        } while (ids.size() < expected);

        if (ids.empty()) {
            if (warnings)
                warnings->push_back("query for '" + q.author_id + "' matched no records");
            return {};
        }

        std::vector<PublicationRecord> records;
        for (std::size_t start = 0; start < ids.size(); start += config_.page_size) {
            const std::size_t stop = std::min(ids.size(), start + config_.page_size);
            std::string joined;
            for (std::size_t i = start; i < stop; ++i) {
                if (!joined.empty()) joined.push_back(',');
                joined += ids[i];
            }
            std::string path = config_.base_path + "/efetch.fcgi?db=pubmed&retmode=xml&id=" + joined;
            const std::string body = get_with_retries(path, q);
            for (auto& rec : parse_article_set(body)) {
                rec.author_id = q.author_id;
                records.push_back(std::move(rec));
            }
        }
        return records;
    }

    Corpus fetch_corpus(const std::vector<AuthorQuery>& queries,
                        std::vector<std::string>* warnings = nullptr) {
        Corpus corpus;
        corpus.authors = queries;
        corpus.retrieved_at = iso8601_now();
        for (const auto& q : queries) {
            auto records = fetch_author_records(q, warnings);
            for (auto& r : records) corpus.records.push_back(std::move(r));
        }
        corpus.check_invariants();
        return corpus;
    }

    static std::string iso8601_now() {
        const std::time_t t = std::time(nullptr);
        char buf[32];
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
        return buf;
    }

private:
    ClientConfig config_;
    HttpGetFn http_;
    std::unique_ptr<SystemClock> owned_clock_;
    Clock& clock_;
    RateLimiter limiter_;

    static std::size_t parse_count(const nlohmann::json& v) {
        if (v.is_number_unsigned() || v.is_number_integer()) return v.get<std::size_t>();
        return std::stoull(v.get<std::string>());
    }

    std::string get_with_retries(std::string path, const AuthorQuery& q) {
        const std::string key = config_.resolved_api_key();
        if (!key.empty()) path += "&api_key=" + eutils_detail::url_encode(key);

        double backoff = config_.backoff_initial_s;
        HttpResponse last;
        for (std::size_t attempt = 0; attempt <= config_.max_retries; ++attempt) {
            if (attempt > 0) {
                clock_.sleep_for(backoff);
                backoff = std::min(backoff * 2.0, config_.backoff_max_s);
            }
            limiter_.acquire();
            last = http_(path);
            if (last.transport_ok && last.status == 200) return last.body;
            const bool retryable =
                !last.transport_ok || last.status == 429 || last.status >= 500;
            if (!retryable) break;
        }
        throw error("fetch '" + q.author_id + "' (query: " + q.query + ") failed after " +
                    std::to_string(config_.max_retries) + " retries; last status " +
                    (last.transport_ok ? std::to_string(last.status) : "transport error: " + last.error));
    }
};

}  // namespace atlas
