#pragma once

#include <netdb.h>
#include <sys/socket.h>

#include <algorithm>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "gptwatch/domain.hpp"
#include "gptwatch/sha256.hpp"
#include "gptwatch/store_driver.hpp"
#include "gptwatch/url.hpp"
#include "gptwatch/util.hpp"

namespace gptwatch {

enum class AuditOutcomeKind { Accessible, BrokenLink, HomepageOnly, Timeout, ServerError };
enum class BrokenLinkCause { Placeholder, DnsFailure, ClientError };

inline std::string_view to_string(AuditOutcomeKind k) {
    switch (k) {
    case AuditOutcomeKind::Accessible: return "accessible";
    case AuditOutcomeKind::BrokenLink: return "broken_link";
    case AuditOutcomeKind::HomepageOnly: return "homepage_only";
    case AuditOutcomeKind::Timeout: return "timeout";
    case AuditOutcomeKind::ServerError: return "server_error";
    }
    return "?";
}

inline std::string_view to_string(BrokenLinkCause c) {
    switch (c) {
    case BrokenLinkCause::Placeholder: return "placeholder";
    case BrokenLinkCause::DnsFailure: return "dns_failure";
    case BrokenLinkCause::ClientError: return "client_error";
    }
    return "?";
}

// Five-way accessibility result. `status` carries the deciding HTTP status
// for client/server errors; a redirect chain cut off at the limit gets the
// synthetic status 310.
struct AuditOutcome {
    AuditOutcomeKind kind = AuditOutcomeKind::Accessible;
    std::optional<BrokenLinkCause> cause; // set iff kind == BrokenLink
    std::optional<int> status;

    static AuditOutcome accessible() { return {AuditOutcomeKind::Accessible, {}, {}}; }
    static AuditOutcome homepage_only() { return {AuditOutcomeKind::HomepageOnly, {}, {}}; }
    static AuditOutcome timeout() { return {AuditOutcomeKind::Timeout, {}, {}}; }
    static AuditOutcome server_error(int status) {
        return {AuditOutcomeKind::ServerError, {}, status};
    }
    static AuditOutcome broken(BrokenLinkCause cause, std::optional<int> status = std::nullopt) {
        return {AuditOutcomeKind::BrokenLink, cause, status};
    }

    bool operator==(const AuditOutcome&) const = default;
};

inline constexpr int kRedirectLimitStatus = 310;

struct AuditRecord {
    std::string gizmo_id; // empty for standalone audits outside a snapshot
    PrivacyEntry entry;
    AuditOutcome outcome;
    std::optional<std::string> final_url; // present iff any response was received
    std::optional<int> http_status;
    std::optional<std::string> content_hash; // present iff outcome is Accessible
    std::string fetched_at;                  // RFC 3339 UTC
    std::int64_t elapsed_ms = 0;

    bool operator==(const AuditRecord&) const = default;
};

struct PolicyDocument {
    std::string gizmo_id;
    PrivacyEntry entry;
    std::string text; // non-empty for stored documents
    std::string content_hash;
    std::string fetched_at;

    bool operator==(const PolicyDocument&) const = default;
};

struct AuditPolicy {
    std::chrono::seconds timeout{10}; // per attempt
    int max_redirects = 10;
    int timeout_retries = 1; // retries for no-response candidates only
    int parallelism = 8;
    int per_host = 2;
};

// --- URL shape checks ------------------------------------------------------

// Hosts in the reserved example family: registrable domain example.com/org/net
// or a host under the reserved "example" TLD. Developers paste these straight
// from documentation, so they count as broken before any network activity.
inline bool is_placeholder_host(std::string_view host) {
    while (!host.empty() && host.back() == '.') host.remove_suffix(1);
    if (host.empty()) return false;
    auto labels = split(host, '.');
    if (labels.back() == "example") return true;
    const std::string reg = registrable_domain(host);
    return reg == "example.com" || reg == "example.org" || reg == "example.net";
}

inline bool is_placeholder(const Url& url) { return is_placeholder_host(url.host); }

inline bool is_placeholder(std::string_view url_string) {
    auto url = Url::parse(url_string);
    return url && is_placeholder(*url);
}

// Purely syntactic on the post-redirect URL: a site root with no query.
inline bool is_homepage_only(const Url& final_url) {
    return (final_url.path.empty() || final_url.path == "/") && final_url.query.empty();
}

// --- HTML to plain text ----------------------------------------------------

namespace audit_detail {

inline bool starts_with_ci(std::string_view s, std::size_t pos, std::string_view prefix) {
    if (pos + prefix.size() > s.size()) return false;
    for (std::size_t i = 0; i < prefix.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(s[pos + i])) !=
            std::tolower(static_cast<unsigned char>(prefix[i])))
            return false;
    }
    return true;
}

inline void append_codepoint(std::string& out, std::uint32_t cp) {
    if (cp == 0xA0) { // non-breaking space folds into ordinary whitespace
        out.push_back(' ');
    } else if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp <= 0x10FFFF) {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

// Decodes the entity starting at `i` (which points at '&'); returns the index
// one past the entity on success and appends the decoded text.
inline std::size_t decode_entity(std::string_view s, std::size_t i, std::string& out) {
    const auto semi = s.find(';', i + 1);
    if (semi == std::string_view::npos || semi - i > 10) return std::string_view::npos;
    std::string_view name = s.substr(i + 1, semi - i - 1);
    if (name == "amp") out.push_back('&');
    else if (name == "lt") out.push_back('<');
    else if (name == "gt") out.push_back('>');
    else if (name == "quot") out.push_back('"');
    else if (name == "apos") out.push_back('\'');
    else if (name == "nbsp") out.push_back(' ');
    else if (!name.empty() && name[0] == '#') {
        std::uint32_t cp = 0;
        bool ok = name.size() > 1;
        if (name.size() > 2 && (name[1] == 'x' || name[1] == 'X')) {
            for (std::size_t k = 2; k < name.size(); ++k) {
                const char c = name[k];
                if (!std::isxdigit(static_cast<unsigned char>(c))) { ok = false; break; }
                cp = cp * 16 + static_cast<std::uint32_t>(
                                   std::isdigit(static_cast<unsigned char>(c))
                                       ? c - '0'
                                       : std::tolower(static_cast<unsigned char>(c)) - 'a' + 10);
                if (cp > 0x10FFFF) { ok = false; break; }
            }
        } else {
            for (std::size_t k = 1; k < name.size(); ++k) {
                if (!std::isdigit(static_cast<unsigned char>(name[k]))) { ok = false; break; }
                cp = cp * 10 + static_cast<std::uint32_t>(name[k] - '0');
                if (cp > 0x10FFFF) { ok = false; break; }
            }
        }
        if (!ok || cp == 0) return std::string_view::npos;
        append_codepoint(out, cp);
    } else {
        return std::string_view::npos;
    }
    return semi + 1;
}

// Skips a tag starting at '<', honoring quoted attribute values.
inline std::size_t skip_tag(std::string_view s, std::size_t i) {
    char quote = 0;
    for (std::size_t k = i + 1; k < s.size(); ++k) {
        const char c = s[k];
        if (quote != 0) {
            if (c == quote) quote = 0;
        } else if (c == '"' || c == '\'') {
            quote = c;
        } else if (c == '>') {
            return k + 1;
        }
    }
    return s.size();
}

inline std::size_t skip_element_body(std::string_view s, std::size_t i, std::string_view name) {
    // i points just past the opening tag; scan for </name and then past '>'.
    const std::string close = "</" + std::string(name);
    for (std::size_t k = i; k + close.size() <= s.size(); ++k) {
        if (s[k] == '<' && starts_with_ci(s, k, close)) return skip_tag(s, k);
    }
    return s.size();
}

} // namespace audit_detail

// Markup removed, script/style bodies dropped, entities decoded, whitespace
// collapsed. Never fails: the worst input yields empty text.
inline std::string extract_text(std::string_view html) {
    namespace ad = audit_detail;
    std::string raw;
    raw.reserve(html.size());
    std::size_t i = 0;
    while (i < html.size()) {
        const char c = html[i];
        if (c == '<') {
            if (ad::starts_with_ci(html, i, "<!--")) {
                const auto end = html.find("-->", i + 4);
                i = end == std::string_view::npos ? html.size() : end + 3;
            } else if (ad::starts_with_ci(html, i, "<script")) {
                i = ad::skip_element_body(html, ad::skip_tag(html, i), "script");
            } else if (ad::starts_with_ci(html, i, "<style")) {
                i = ad::skip_element_body(html, ad::skip_tag(html, i), "style");
            } else {
                i = ad::skip_tag(html, i);
            }
            raw.push_back(' ');
        } else if (c == '&') {
            const auto next = ad::decode_entity(html, i, raw);
            if (next == std::string_view::npos) {
                raw.push_back('&');
                ++i;
            } else {
                i = next;
            }
        } else {
            raw.push_back(c);
            ++i;
        }
    }
    std::string out;
    out.reserve(raw.size());
    bool pending_space = false;
    for (char c : raw) {
        if (is_ascii_space(c)) {
            pending_space = !out.empty();
        } else {
            if (pending_space) out.push_back(' ');
            pending_space = false;
            out.push_back(c);
        }
    }
    return out;
}

// --- Fetching --------------------------------------------------------------

// Redirect-following GET with per-hop timeouts and an explicit DNS probe, so
// that "the name does not resolve" and "the host never answered" stay
// distinguishable outcomes. DNS probe results are cached per host.
class HttpFetcher {
public:
    explicit HttpFetcher(AuditPolicy policy) : policy_(policy) {}

    enum class Transport { Ok, DnsFailure, NoResponse };

    struct FetchOutcome {
        Transport transport = Transport::Ok;
        bool got_response = false; // at least one HTTP response on the chain
        int last_status = 0;       // status of the last received response
        std::string final_url;     // URL that produced the last response
        std::string body;          // body of the final response (Ok only)
        std::string content_type;
        bool redirect_limit_exceeded = false;
        bool malformed_redirect = false;
        std::string detail;
    };

    FetchOutcome fetch(const std::string& url_string) {
        FetchOutcome out;
        auto url = Url::parse(url_string);
        if (!url || (url->scheme != "http" && url->scheme != "https")) {
            // Nothing resolvable to connect to.
            out.transport = Transport::DnsFailure;
            out.detail = "not an absolute http(s) URL";
            return out;
        }
        if (!host_resolves(url->host)) {
            out.transport = Transport::DnsFailure;
            out.detail = "name resolution failed for " + url->host;
            return out;
        }
        Url current = *url;
        int redirects_followed = 0;
        for (;;) {
            httplib::Client client(current.origin());
            client.set_connection_timeout(policy_.timeout);
            client.set_read_timeout(policy_.timeout);
            client.set_write_timeout(policy_.timeout);
            client.set_follow_location(false);
            auto res = client.Get(current.request_target());
            if (!res) {
                out.transport = Transport::NoResponse;
                out.detail = httplib::to_string(res.error());
                return out;
            }
            out.got_response = true;
            out.last_status = res->status;
            out.final_url = current.to_string();
            if (res->status >= 300 && res->status < 400) {
                if (!res->has_header("Location")) {
                    out.malformed_redirect = true;
                    out.detail = "redirect without Location";
                    return out;
                }
                if (redirects_followed >= policy_.max_redirects) {
                    out.redirect_limit_exceeded = true;
                    return out;
                }
                auto next = resolve_reference(current, res->get_header_value("Location"));
                if (!next || (next->scheme != "http" && next->scheme != "https")) {
                    out.malformed_redirect = true;
                    out.detail = "unresolvable Location header";
                    return out;
                }
                current = *next;
                ++redirects_followed;
                continue;
            }
            out.body = res->body;
            out.content_type = res->get_header_value("Content-Type");
            return out;
        }
    }

private:
    bool host_resolves(const std::string& host) {
        std::string name = host;
        if (name.size() > 1 && name.front() == '[' && name.back() == ']')
            name = name.substr(1, name.size() - 2);
        {
            std::lock_guard lock(dns_mutex_);
            if (auto it = dns_cache_.find(name); it != dns_cache_.end()) return it->second;
        }
        addrinfo hints{};
        hints.ai_family = AF_UNSPEC;
        hints.ai_socktype = SOCK_STREAM;
        addrinfo* res = nullptr;
        const bool ok = ::getaddrinfo(name.c_str(), nullptr, &hints, &res) == 0;
        if (res) ::freeaddrinfo(res);
        std::lock_guard lock(dns_mutex_);
        dns_cache_[name] = ok;
        return ok;
    }

    AuditPolicy policy_;
    std::mutex dns_mutex_;
    std::unordered_map<std::string, bool> dns_cache_;
};

// --- Classification --------------------------------------------------------

struct AuditResult {
    AuditRecord record;
    std::string document_text; // non-empty iff a document should be stored
};

// Total classification: every failure mode is an outcome, never an error.
// Precedence: placeholder, DNS failure, no response (after retries), 5xx,
// 4xx, homepage shape, accessible.
inline AuditResult audit_link(const PrivacyEntry& entry, const AuditPolicy& policy,
                              HttpFetcher& fetcher) {
    const auto t0 = std::chrono::steady_clock::now();
    AuditResult result;
    AuditRecord& rec = result.record;
    rec.entry = entry;
    rec.fetched_at = now_rfc3339();

    auto finish = [&] {
        rec.elapsed_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::steady_clock::now() - t0)
                             .count();
        return result;
    };

    if (is_placeholder(entry.policy_url)) {
        rec.outcome = AuditOutcome::broken(BrokenLinkCause::Placeholder);
        return finish();
    }

    HttpFetcher::FetchOutcome fetched;
    for (int attempt = 0;; ++attempt) {
        fetched = fetcher.fetch(entry.policy_url);
        if (fetched.transport != HttpFetcher::Transport::NoResponse ||
            attempt >= policy.timeout_retries)
            break;
    }

    if (fetched.got_response) {
        rec.final_url = fetched.final_url;
        rec.http_status = fetched.last_status;
    }

    switch (fetched.transport) {
    case HttpFetcher::Transport::DnsFailure:
        rec.outcome = AuditOutcome::broken(BrokenLinkCause::DnsFailure);
        return finish();
    case HttpFetcher::Transport::NoResponse:
        rec.outcome = AuditOutcome::timeout();
        return finish();
    case HttpFetcher::Transport::Ok:
        break;
    }

    if (fetched.redirect_limit_exceeded) {
        rec.outcome = AuditOutcome::broken(BrokenLinkCause::ClientError, kRedirectLimitStatus);
        rec.http_status = kRedirectLimitStatus;
        return finish();
    }
    if (fetched.malformed_redirect) {
        rec.outcome = AuditOutcome::broken(BrokenLinkCause::ClientError, fetched.last_status);
        return finish();
    }
    const int status = fetched.last_status;
    if (status >= 500) {
        rec.outcome = AuditOutcome::server_error(status);
        return finish();
    }
    if (status >= 400) {
        rec.outcome = AuditOutcome::broken(BrokenLinkCause::ClientError, status);
        return finish();
    }
    if (status < 200) {
        rec.outcome = AuditOutcome::broken(BrokenLinkCause::ClientError, status);
        return finish();
    }

    const auto final_url = Url::parse(fetched.final_url);
    if (final_url && is_homepage_only(*final_url)) {
        rec.outcome = AuditOutcome::homepage_only();
        return finish();
    }

    rec.outcome = AuditOutcome::accessible();
    const std::string type = to_lower(fetched.content_type);
    const bool textual =
        type.empty() || type.find("html") != std::string::npos || type.rfind("text/", 0) == 0;
    if (textual) {
        result.document_text = extract_text(fetched.body);
        rec.content_hash = sha256_hex(result.document_text);
    } else {
        // Non-HTML bodies are fingerprinted raw; there is no text to store.
        rec.content_hash = sha256_hex(fetched.body);
    }
    return finish();
}

inline AuditResult audit_link(const PrivacyEntry& entry, const AuditPolicy& policy) {
    HttpFetcher fetcher(policy);
    return audit_link(entry, policy, fetcher);
}

// --- Corpus audit ----------------------------------------------------------

namespace audit_detail {

// Runs fn(i) for every index with at most `workers` threads and at most
// `per_host` concurrently sharing one host key. Results land wherever fn
// writes them, so output order is independent of completion order.
inline void parallel_for_hosts(const std::vector<std::string>& host_keys, int workers,
                               int per_host, const std::function<void(std::size_t)>& fn) {
    const std::size_t n = host_keys.size();
    if (n == 0) return;
    workers = std::max(1, workers);
    per_host = std::max(1, per_host);

    std::mutex mutex;
    std::condition_variable cv;
    std::vector<char> claimed(n, 0);
    std::size_t unclaimed = n;
    std::unordered_map<std::string, int> active;
    std::exception_ptr failure;

    auto worker = [&] {
        std::unique_lock lock(mutex);
        while (unclaimed > 0 && !failure) {
            std::size_t pick = n;
            for (std::size_t i = 0; i < n; ++i) {
                if (!claimed[i] && active[host_keys[i]] < per_host) {
                    pick = i;
                    break;
                }
            }
            if (pick == n) {
                cv.wait(lock);
                continue;
            }
            claimed[pick] = 1;
            --unclaimed;
            ++active[host_keys[pick]];
            lock.unlock();
            std::exception_ptr err;
            try {
                fn(pick);
            } catch (...) {
                err = std::current_exception();
            }
            lock.lock();
            --active[host_keys[pick]];
            if (err && !failure) failure = err;
            cv.notify_all();
        }
        cv.notify_all();
    };

    std::vector<std::thread> pool;
    const std::size_t count = std::min<std::size_t>(static_cast<std::size_t>(workers), n);
    pool.reserve(count);
    for (std::size_t i = 0; i < count; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

} // namespace audit_detail

struct CorpusAuditResult {
    std::vector<AuditRecord> records;
    std::vector<PolicyDocument> documents;
};

// Audits every (app, entry) pair from one snapshot's panels. Identical policy
// URLs are fetched once and the result replicated per declaring app; output
// is ordered by (gizmo_id, declaration order) regardless of completion order.
inline CorpusAuditResult audit_corpus(const std::vector<PrivacyPanel>& panels,
                                      const AuditPolicy& policy) {
    struct Task {
        std::string gizmo_id;
        PrivacyEntry entry;
    };
    std::vector<const PrivacyPanel*> ordered;
    ordered.reserve(panels.size());
    for (const auto& p : panels) ordered.push_back(&p);
    std::sort(ordered.begin(), ordered.end(), [](const PrivacyPanel* a, const PrivacyPanel* b) {
        return a->gizmo_id.value() < b->gizmo_id.value();
    });

    std::vector<Task> tasks;
    std::vector<std::string> unique_urls;
    std::unordered_map<std::string, std::size_t> url_slot;
    for (const auto* panel : ordered) {
        for (const auto& entry : panel->entries) {
            tasks.push_back({panel->gizmo_id.value(), entry});
            if (url_slot.emplace(entry.policy_url, unique_urls.size()).second)
                unique_urls.push_back(entry.policy_url);
        }
    }

    std::vector<std::string> host_keys;
    host_keys.reserve(unique_urls.size());
    for (const auto& u : unique_urls) {
        auto parsed = Url::parse(u);
        host_keys.push_back(parsed ? parsed->host : std::string());
    }

    HttpFetcher fetcher(policy);
    std::vector<AuditResult> by_url(unique_urls.size());
    audit_detail::parallel_for_hosts(host_keys, policy.parallelism, policy.per_host,
                                     [&](std::size_t i) {
                                         PrivacyEntry probe{host_keys[i], unique_urls[i]};
                                         by_url[i] = audit_link(probe, policy, fetcher);
                                     });

    CorpusAuditResult result;
    result.records.reserve(tasks.size());
    for (const auto& task : tasks) {
        const AuditResult& cached = by_url[url_slot.at(task.entry.policy_url)];
        AuditRecord rec = cached.record;
        rec.gizmo_id = task.gizmo_id;
        rec.entry = task.entry;
        result.records.push_back(rec);
        if (rec.outcome.kind == AuditOutcomeKind::Accessible && !cached.document_text.empty()) {
            result.documents.push_back({task.gizmo_id, task.entry, cached.document_text,
                                        *rec.content_hash, rec.fetched_at});
        }
    }
    return result;
}

// --- Serialization ---------------------------------------------------------

inline json audit_record_to_json(const AuditRecord& r) {
    json j;
    if (!r.gizmo_id.empty()) j["gizmo_id"] = r.gizmo_id;
    j["entry_domain"] = r.entry.domain;
    j["policy_url"] = r.entry.policy_url;
    j["outcome"] = std::string(to_string(r.outcome.kind));
    if (r.outcome.cause) j["cause"] = std::string(to_string(*r.outcome.cause));
    if (r.final_url) j["final_url"] = *r.final_url;
    if (r.http_status) j["http_status"] = *r.http_status;
    if (r.content_hash) j["content_hash"] = *r.content_hash;
    j["fetched_at"] = r.fetched_at;
    j["elapsed_ms"] = r.elapsed_ms;
    return j;
}

inline AuditRecord audit_record_from_json(const json& j) {
    AuditRecord r;
    r.gizmo_id = j.value("gizmo_id", "");
    r.entry.domain = j.at("entry_domain").get<std::string>();
    r.entry.policy_url = j.at("policy_url").get<std::string>();
    const std::string kind = j.at("outcome").get<std::string>();
    bool known = false;
    for (auto k : {AuditOutcomeKind::Accessible, AuditOutcomeKind::BrokenLink,
                   AuditOutcomeKind::HomepageOnly, AuditOutcomeKind::Timeout,
                   AuditOutcomeKind::ServerError}) {
        if (kind == to_string(k)) {
            r.outcome.kind = k;
            known = true;
        }
    }
    if (!known) throw std::invalid_argument("unknown audit outcome \"" + kind + "\"");
    if (j.contains("cause")) {
        const std::string cause = j["cause"].get<std::string>();
        for (auto c : {BrokenLinkCause::Placeholder, BrokenLinkCause::DnsFailure,
                       BrokenLinkCause::ClientError}) {
            if (cause == to_string(c)) r.outcome.cause = c;
        }
        if (!r.outcome.cause)
            throw std::invalid_argument("unknown broken-link cause \"" + cause + "\"");
    }
    if (j.contains("final_url")) r.final_url = j["final_url"].get<std::string>();
    if (j.contains("http_status")) {
        r.http_status = j["http_status"].get<int>();
        if (r.outcome.kind == AuditOutcomeKind::ServerError ||
            (r.outcome.cause && *r.outcome.cause == BrokenLinkCause::ClientError))
            r.outcome.status = r.http_status;
    }
    if (j.contains("content_hash")) r.content_hash = j["content_hash"].get<std::string>();
    r.fetched_at = j.at("fetched_at").get<std::string>();
    r.elapsed_ms = j.at("elapsed_ms").get<std::int64_t>();
    return r;
}

inline json policy_document_to_json(const PolicyDocument& d) {
    return json{{"gizmo_id", d.gizmo_id},     {"entry_domain", d.entry.domain},
                {"policy_url", d.entry.policy_url}, {"text", d.text},
                {"content_hash", d.content_hash},   {"fetched_at", d.fetched_at}};
}

inline PolicyDocument policy_document_from_json(const json& j) {
    return PolicyDocument{j.at("gizmo_id").get<std::string>(),
                          {j.at("entry_domain").get<std::string>(),
                           j.at("policy_url").get<std::string>()},
                          j.at("text").get<std::string>(),
                          j.at("content_hash").get<std::string>(),
                          j.at("fetched_at").get<std::string>()};
}

} // namespace gptwatch
