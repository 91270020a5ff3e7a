#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "gptwatch/core_model.hpp"
#include "gptwatch/rng.hpp"
#include "gptwatch/util.hpp"

namespace gptwatch {

inline constexpr std::string_view kPlaceholderPolicyUrl =
    "https://app.example.com/privacy_policy";

enum class PolicyBehaviorKind {
    DedicatedPolicy,  // 200 HTML policy page at a non-root path
    HomepageRedirect, // 301 to the site root, which returns 200
    NotFound,         // 404
    ServerError,      // 500
    Hang,             // no response for the configured delay
    Placeholder,      // declared URL is the literal reserved-example link
};

inline constexpr std::array<PolicyBehaviorKind, 6> kAllBehaviorKinds = {
    PolicyBehaviorKind::DedicatedPolicy, PolicyBehaviorKind::HomepageRedirect,
    PolicyBehaviorKind::NotFound,        PolicyBehaviorKind::ServerError,
    PolicyBehaviorKind::Hang,            PolicyBehaviorKind::Placeholder,
};

inline std::string_view to_string(PolicyBehaviorKind k) {
    switch (k) {
    case PolicyBehaviorKind::DedicatedPolicy: return "dedicated_policy";
    case PolicyBehaviorKind::HomepageRedirect: return "homepage_redirect";
    case PolicyBehaviorKind::NotFound: return "not_found";
    case PolicyBehaviorKind::ServerError: return "server_error";
    case PolicyBehaviorKind::Hang: return "hang";
    case PolicyBehaviorKind::Placeholder: return "placeholder";
    }
    return "?";
}

inline std::optional<PolicyBehaviorKind> behavior_kind_from_string(std::string_view s) {
    for (auto k : kAllBehaviorKinds)
        if (s == to_string(k)) return k;
    return std::nullopt;
}

struct PolicyBehavior {
    PolicyBehaviorKind kind = PolicyBehaviorKind::DedicatedPolicy;
    // Only meaningful for Hang; must stay above the auditor's timeout so a
    // timeout scenario cannot race the response.
    std::chrono::milliseconds hang_delay{15000};

    bool operator==(const PolicyBehavior&) const = default;
};

class InconsistentConfig : public std::runtime_error {
public:
    explicit InconsistentConfig(const std::string& what) : std::runtime_error(what) {}
};

class BindFailure : public std::runtime_error {
public:
    explicit BindFailure(const std::string& what) : std::runtime_error(what) {}
};

// Shape of the synthetic population: how many apps use zero / one / multiple
// third-party services, and how the declared policy links behave.
struct CorpusConfig {
    std::uint64_t total_apps = 0;
    std::uint64_t zero_domain_apps = 0;
    std::uint64_t one_domain_apps = 0;
    std::uint64_t multi_domain_apps = 0;
    std::uint64_t multi_domain_total_entries = 0;
    std::map<PolicyBehaviorKind, std::uint64_t> behavior_counts;
    std::uint64_t seed = 0;
    std::chrono::milliseconds hang_delay{15000};

    std::uint64_t total_entries() const { return one_domain_apps + multi_domain_total_entries; }

    void validate() const {
        if (zero_domain_apps + one_domain_apps + multi_domain_apps != total_apps) {
            throw InconsistentConfig(
                "zero_domain_apps + one_domain_apps + multi_domain_apps != total_apps (" +
                std::to_string(zero_domain_apps) + " + " + std::to_string(one_domain_apps) +
                " + " + std::to_string(multi_domain_apps) +
                " != " + std::to_string(total_apps) + ")");
        }
        if (multi_domain_total_entries < 2 * multi_domain_apps) {
            throw InconsistentConfig(
                "multi_domain_total_entries < 2 * multi_domain_apps (" +
                std::to_string(multi_domain_total_entries) + " < 2 * " +
                std::to_string(multi_domain_apps) + ")");
        }
        if (multi_domain_apps == 0 && multi_domain_total_entries != 0) {
            throw InconsistentConfig("multi_domain_total_entries != 0 with multi_domain_apps = 0 (" +
                                     std::to_string(multi_domain_total_entries) + " != 0)");
        }
        std::uint64_t behavior_sum = 0;
        for (const auto& [kind, count] : behavior_counts) behavior_sum += count;
        if (behavior_sum != total_entries()) {
            throw InconsistentConfig(
                "sum(behavior_counts) != one_domain_apps + multi_domain_total_entries (" +
                std::to_string(behavior_sum) + " != " + std::to_string(one_domain_apps) + " + " +
                std::to_string(multi_domain_total_entries) + ")");
        }
        if (hang_delay.count() <= 0)
            throw InconsistentConfig("hang_delay_ms must be positive");
    }

    json to_json() const {
        json counts;
        for (const auto& [kind, count] : behavior_counts) counts[std::string(to_string(kind))] = count;
        return json{{"total_apps", total_apps},
                    {"zero_domain_apps", zero_domain_apps},
                    {"one_domain_apps", one_domain_apps},
                    {"multi_domain_apps", multi_domain_apps},
                    {"multi_domain_total_entries", multi_domain_total_entries},
                    {"behavior_counts", counts},
                    {"seed", seed},
                    {"hang_delay_ms", hang_delay.count()}};
    }

    static CorpusConfig from_json(const json& j) {
        if (!j.is_object()) throw std::invalid_argument("corpus config must be a JSON object");
        CorpusConfig c;
        c.total_apps = j.value("total_apps", 0u);
        c.zero_domain_apps = j.value("zero_domain_apps", 0u);
        c.one_domain_apps = j.value("one_domain_apps", 0u);
        c.multi_domain_apps = j.value("multi_domain_apps", 0u);
        c.multi_domain_total_entries = j.value("multi_domain_total_entries", 0u);
        c.seed = j.value("seed", 0u);
        if (j.contains("hang_delay_ms"))
            c.hang_delay = std::chrono::milliseconds(j["hang_delay_ms"].get<std::int64_t>());
        if (j.contains("behavior_counts")) {
            for (const auto& [key, value] : j["behavior_counts"].items()) {
                auto kind = behavior_kind_from_string(key);
                if (!kind) throw std::invalid_argument("unknown behavior kind \"" + key + "\"");
                c.behavior_counts[*kind] = value.get<std::uint64_t>();
            }
        }
        return c;
    }
};

// One declared third-party integration of one app. The policy URL itself is
// only fixed once a server is bound (it embeds the endpoint), so entries keep
// the site-relative path; Placeholder entries ignore it and declare the
// reserved-example literal.
struct CorpusEntry {
    std::string domain;
    PolicyBehavior behavior;
    std::string site_path;   // e.g. "/privacy"
    std::string policy_text; // plain text of the dedicated page, "" otherwise

    bool operator==(const CorpusEntry&) const = default;
};

struct CorpusApp {
    std::string gizmo_id;
    std::string name;
    std::string instructions;
    std::optional<std::string> description;
    std::optional<std::vector<std::string>> conversation;
    std::optional<std::vector<KnowledgeFile>> knowledge;
    std::optional<std::vector<std::string>> capabilities;
    std::vector<CorpusEntry> entries;

    bool operator==(const CorpusApp&) const = default;
};

struct Corpus {
    CorpusConfig config;
    std::vector<CorpusApp> apps;

    std::uint64_t total_entries() const {
        std::uint64_t n = 0;
        for (const auto& app : apps) n += app.entries.size();
        return n;
    }

    bool operator==(const Corpus& other) const { return dump() == other.dump(); }

    // Full structural dump; the determinism contract is byte-identity of this.
    std::string dump() const {
        json apps_json = json::array();
        for (const auto& app : apps) {
            json entries = json::array();
            for (const auto& e : app.entries) {
                entries.push_back({{"domain", e.domain},
                                   {"behavior", std::string(to_string(e.behavior.kind))},
                                   {"hang_delay_ms", e.behavior.hang_delay.count()},
                                   {"site_path", e.site_path},
                                   {"policy_text", e.policy_text}});
            }
            json a = metadata_to_json(to_metadata(app, "{base}"));
            a["entries"] = std::move(entries);
            apps_json.push_back(std::move(a));
        }
        return json{{"config", config.to_json()}, {"apps", apps_json}}.dump();
    }

    static GptMetadata to_metadata(const CorpusApp& app, std::string_view base);
};

inline std::string declared_policy_url(const CorpusEntry& entry, std::string_view base) {
    if (entry.behavior.kind == PolicyBehaviorKind::Placeholder)
        return std::string(kPlaceholderPolicyUrl);
    std::string out(base);
    while (!out.empty() && out.back() == '/') out.pop_back();
    return out + "/site/" + entry.domain + entry.site_path;
}

inline GptMetadata Corpus::to_metadata(const CorpusApp& app, std::string_view base) {
    GptMetadata m{.gizmo_id = GizmoId(app.gizmo_id),
                  .name = app.name,
                  .instructions = app.instructions,
                  .description = app.description,
                  .conversation = app.conversation,
                  .knowledge = app.knowledge,
                  .capabilities = app.capabilities};
    if (!app.entries.empty()) {
        std::vector<ActionDescriptor> actions;
        actions.reserve(app.entries.size());
        for (const auto& e : app.entries)
            actions.push_back({e.domain, declared_policy_url(e, base)});
        m.actions = std::move(actions);
    }
    return m;
}

namespace fixture_detail {

inline const std::vector<std::string>& word_pool() {
    static const std::vector<std::string> words = {
        "amber",  "atlas",  "beacon", "birch",  "bramble", "breeze", "canyon", "cedar",
        "cinder", "cobalt", "coral",  "crest",  "dawn",    "delta",  "drift",  "ember",
        "fable",  "fern",   "flint",  "gale",   "garnet",  "glade",  "grove",  "harbor",
        "hazel",  "heron",  "indigo", "iris",   "jasper",  "juniper","kestrel","lagoon",
        "larch",  "lumen",  "maple",  "meadow", "mesa",    "mica",   "north",  "oakmoss",
        "onyx",   "opal",   "orchid", "osprey", "pebble",  "pine",   "quartz", "raven",
        "reef",   "ridge",  "river",  "sable",  "sage",    "sierra", "slate",  "sparrow",
        "spruce", "summit", "thistle","tundra", "vale",    "willow", "wren",   "zephyr",
    };
    return words;
}

inline std::string capitalize(std::string s) {
    if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
    return s;
}

inline const std::vector<std::string>& policy_path_pool() {
    static const std::vector<std::string> paths = {
        "/privacy", "/privacy-policy", "/legal/privacy", "/policies/privacy.html",
    };
    return paths;
}

inline std::string make_policy_text(SeededRng& rng, const std::string& domain) {
    static const std::vector<std::string> clauses = {
        "We collect only the data required to answer requests sent to our API",
        "Submitted content is retained for thirty days and then deleted",
        "We do not sell personal information to advertisers or data brokers",
        "Aggregated usage statistics may be shared with integration partners",
        "You can request deletion of your account data at any time by email",
        "Request logs include timestamps, endpoint names and response codes",
        "Cookies are used solely to keep an authenticated session alive",
        "Data is encrypted in transit and at rest within our infrastructure",
        "Third-party subprocessors are listed in the appendix of this policy",
        "Security incidents are disclosed to affected users within 72 hours",
    };
    std::string text = "This page describes how " + domain + " handles user data.";
    // At least 200 characters of policy-like text is the served-page contract.
    while (text.size() < 320) {
        text += " ";
        text += rng.pick(clauses);
        text += ".";
    }
    return text;
}

inline std::string unique_domain(SeededRng& rng, std::set<std::string>& used) {
    const auto& words = word_pool();
    for (;;) {
        std::string domain = rng.pick(words) + "." + rng.pick(words) + ".test";
        if (used.insert(domain).second) return domain;
    }
}

inline std::string unique_gizmo_id(SeededRng& rng, std::set<std::string>& used) {
    static constexpr std::string_view alphabet =
        "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789";
    for (;;) {
        std::string id = rng.string_from(alphabet, GizmoId::kLength);
        if (used.insert(id).second) return id;
    }
}

} // namespace fixture_detail

// Deterministic function of (config, seed): the same inputs produce a
// byte-identical corpus. Behaviors are assigned to entries exactly per
// behavior_counts; every multi-domain app receives at least two entries.
inline Corpus generate_corpus(const CorpusConfig& config) {
    config.validate();
    SeededRng rng(config.seed);
    namespace fd = fixture_detail;

    // Per-app entry counts, shuffled so action apps do not cluster.
    std::vector<std::uint64_t> entry_counts;
    entry_counts.reserve(config.total_apps);
    entry_counts.insert(entry_counts.end(), config.zero_domain_apps, 0);
    entry_counts.insert(entry_counts.end(), config.one_domain_apps, 1);
    entry_counts.insert(entry_counts.end(), config.multi_domain_apps, 2);
    std::uint64_t extra = config.multi_domain_total_entries - 2 * config.multi_domain_apps;
    for (std::uint64_t i = 0; i < extra; ++i) {
        const auto idx = config.zero_domain_apps + config.one_domain_apps +
                         rng.below(config.multi_domain_apps);
        ++entry_counts[static_cast<std::size_t>(idx)];
    }
    rng.shuffle(entry_counts);

    // Behavior multiset in fixed kind order, then shuffled across entries.
    std::vector<PolicyBehaviorKind> behaviors;
    behaviors.reserve(static_cast<std::size_t>(config.total_entries()));
    for (auto kind : kAllBehaviorKinds) {
        auto it = config.behavior_counts.find(kind);
        if (it == config.behavior_counts.end()) continue;
        behaviors.insert(behaviors.end(), static_cast<std::size_t>(it->second), kind);
    }
    rng.shuffle(behaviors);

    Corpus corpus{config, {}};
    corpus.apps.reserve(config.total_apps);
    std::set<std::string> used_ids;
    std::set<std::string> used_domains;
    const auto& words = fd::word_pool();
    std::size_t behavior_cursor = 0;

    for (std::uint64_t app_idx = 0; app_idx < config.total_apps; ++app_idx) {
        CorpusApp app;
        app.gizmo_id = fd::unique_gizmo_id(rng, used_ids);
        app.name = fd::capitalize(rng.pick(words)) + " " + fd::capitalize(rng.pick(words));
        app.instructions = "You are a " + rng.pick(words) + " assistant. Guide users through " +
                           rng.pick(words) + " tasks and keep answers short.";
        if (rng.chance(0.7))
            app.description = "Helps with " + rng.pick(words) + " and " + rng.pick(words) + ".";
        if (rng.chance(0.5)) {
            std::vector<std::string> prompts;
            const auto n = 1 + rng.below(3);
            for (std::uint64_t i = 0; i < n; ++i)
                prompts.push_back("Tell me about " + rng.pick(words));
            app.conversation = std::move(prompts);
        }
        const std::uint64_t n_entries = entry_counts[static_cast<std::size_t>(app_idx)];
        const double knowledge_chance = n_entries == 0 ? 0.5 : 0.3;
        if (rng.chance(knowledge_chance)) {
            static const std::vector<std::string> exts = {".pdf", ".txt", ".md"};
            std::vector<KnowledgeFile> files;
            const auto n = 1 + rng.below(3);
            for (std::uint64_t i = 0; i < n; ++i)
                files.push_back({rng.pick(words) + rng.pick(exts), 1024 + rng.below(5 * 1024 * 1024)});
            app.knowledge = std::move(files);
        }
        if (rng.chance(0.4)) {
            static const std::vector<std::string> caps = {"web_browsing", "dalle",
                                                          "code_interpreter"};
            std::vector<std::string> chosen;
            for (const auto& cap : caps)
                if (rng.chance(0.5)) chosen.push_back(cap);
            if (chosen.empty()) chosen.push_back(caps[0]);
            app.capabilities = std::move(chosen);
        }

        for (std::uint64_t e = 0; e < n_entries; ++e) {
            CorpusEntry entry;
            entry.domain = fd::unique_domain(rng, used_domains);
            entry.behavior.kind = behaviors[behavior_cursor++];
            entry.behavior.hang_delay = config.hang_delay;
            entry.site_path = rng.pick(fd::policy_path_pool());
            if (entry.behavior.kind == PolicyBehaviorKind::DedicatedPolicy)
                entry.policy_text = fd::make_policy_text(rng, entry.domain);
            app.entries.push_back(std::move(entry));
        }
        corpus.apps.push_back(std::move(app));
    }
    return corpus;
}

inline void write_corpus_metadata(const Corpus& corpus, std::string_view base,
                                  const std::filesystem::path& path) {
    std::string out;
    for (const auto& app : corpus.apps) {
        out += metadata_to_json(Corpus::to_metadata(app, base)).dump();
        out += '\n';
    }
    write_file(path, out);
}

// The dedicated policy page served for an entry. Tests mirror this layout to
// derive expected extracted text by plain string composition.
inline std::string policy_page_html(const CorpusEntry& entry) {
    return "<!doctype html><html><head><title>" + entry.domain +
           " privacy policy</title></head><body><h1>Privacy policy for " + entry.domain +
           "</h1><p>" + entry.policy_text + "</p></body></html>";
}

// Canned response for hand-constructed audit scenarios (redirect chains,
// loops, odd statuses) registered next to the corpus routes.
struct CustomRoute {
    int status = 200;
    std::string body;
    std::string content_type = "text/html";
    std::string location;                 // emitted verbatim when non-empty
    std::chrono::milliseconds delay{0};   // abortable server-side delay
};

// One loopback listener plays the store and every third-party policy host;
// virtual hosts are routed by the /site/{domain} path prefix. Hang responses
// never block unrelated requests (the pool is sized past the worst case) and
// abort early on shutdown.
class FixtureServer {
public:
    explicit FixtureServer(Corpus corpus) : corpus_(std::move(corpus)) {}

    FixtureServer(const FixtureServer&) = delete;
    FixtureServer& operator=(const FixtureServer&) = delete;

    ~FixtureServer() { stop(); }

    void add_route(const std::string& path, CustomRoute route) {
        custom_routes_[path] = std::move(route);
    }

    // Binds and serves; port 0 picks an ephemeral port. Returns the base URL.
    std::string start(const std::string& host = "127.0.0.1", int port = 0) {
        if (running_) throw std::logic_error("fixture server already running");
        build_tables();
        server_.new_task_queue = [] { return new httplib::ThreadPool(16); };
        install_handlers();
        if (port == 0) {
            port = server_.bind_to_any_port(host);
            if (port < 0) throw BindFailure("cannot bind to an ephemeral port on " + host);
        } else if (!server_.bind_to_port(host, port)) {
            throw BindFailure("cannot bind to " + host + ":" + std::to_string(port));
        }
        port_ = port;
        base_url_ = "http://" + host + ":" + std::to_string(port);
        closing_ = false;
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
        running_ = true;
        return base_url_;
    }

    void stop() {
        if (!running_) return;
        closing_ = true;
        server_.stop();
        if (thread_.joinable()) thread_.join();
        running_ = false;
    }

    const std::string& base_url() const { return base_url_; }
    int port() const { return port_; }
    const Corpus& corpus() const { return corpus_; }

    std::uint64_t request_count() const { return total_requests_.load(); }

    std::uint64_t request_count(const std::string& path) const {
        std::lock_guard lock(counter_mutex_);
        auto it = path_requests_.find(path);
        return it == path_requests_.end() ? 0 : it->second;
    }

private:
    void build_tables() {
        panels_.clear();
        sites_.clear();
        for (const auto& app : corpus_.apps) {
            json entries = json::array();
            for (const auto& e : app.entries) {
                entries.push_back({{"domain", e.domain},
                                   {"privacy_policy", declared_policy_url(e, "{base}")}});
                if (e.behavior.kind != PolicyBehaviorKind::Placeholder)
                    sites_["/site/" + e.domain + e.site_path] = &e;
            }
            panels_[app.gizmo_id] =
                json{{"gizmo_id", app.gizmo_id}, {"entries", std::move(entries)}}.dump();
        }
    }

    void install_handlers() {
        server_.set_pre_routing_handler([this](const httplib::Request& req, httplib::Response&) {
            ++total_requests_;
            std::lock_guard lock(counter_mutex_);
            ++path_requests_[req.path];
            return httplib::Server::HandlerResponse::Unhandled;
        });
        server_.Get(R"(/g/g\-([A-Za-z0-9]+)/privacy)",
                    [this](const httplib::Request& req, httplib::Response& res) {
                        if (custom_routes_.contains(req.path)) {
                            handle_generic(req, res);
                            return;
                        }
                        auto it = panels_.find(req.matches[1].str());
                        if (it == panels_.end()) {
                            res.status = 404;
                            res.set_content("no such app\n", "text/plain");
                            return;
                        }
                        // The panel body embeds declared URLs under the bound endpoint.
                        std::string body = it->second;
                        replace_all(body, "{base}", base_url_);
                        res.set_content(body, "application/json");
                    });
        server_.Get(R"(/.*)", [this](const httplib::Request& req, httplib::Response& res) {
            handle_generic(req, res);
        });
    }

    void handle_generic(const httplib::Request& req, httplib::Response& res) {
        if (auto it = custom_routes_.find(req.path); it != custom_routes_.end()) {
            const CustomRoute& route = it->second;
            if (route.delay.count() > 0) abortable_sleep(route.delay);
            res.status = route.status;
            if (!route.location.empty()) res.set_header("Location", route.location);
            if (!route.body.empty()) res.set_content(route.body, route.content_type);
            return;
        }
        if (req.path == "/") {
            res.set_content("<html><head><title>Fixture landing page</title></head>"
                            "<body><h1>Welcome</h1><p>Generic site homepage.</p></body></html>",
                            "text/html");
            return;
        }
        if (auto it = sites_.find(req.path); it != sites_.end()) {
            respond_for_entry(*it->second, res);
            return;
        }
        res.status = 404;
        res.set_content("not found\n", "text/plain");
    }

    void respond_for_entry(const CorpusEntry& entry, httplib::Response& res) {
        switch (entry.behavior.kind) {
        case PolicyBehaviorKind::DedicatedPolicy:
            res.set_content(policy_page_html(entry), "text/html");
            return;
        case PolicyBehaviorKind::HomepageRedirect:
            res.status = 301;
            res.set_header("Location", "/");
            return;
        case PolicyBehaviorKind::NotFound:
            res.status = 404;
            res.set_content("not found\n", "text/plain");
            return;
        case PolicyBehaviorKind::ServerError:
            res.status = 500;
            res.set_content("internal error\n", "text/plain");
            return;
        case PolicyBehaviorKind::Hang:
            abortable_sleep(entry.behavior.hang_delay);
            res.set_content("finally\n", "text/plain");
            return;
        case PolicyBehaviorKind::Placeholder:
            // Placeholder hosts are never registered; reaching here means the
            // route table is broken.
            res.status = 404;
            return;
        }
    }

    void abortable_sleep(std::chrono::milliseconds total) const {
        const auto deadline = std::chrono::steady_clock::now() + total;
        while (!closing_ && std::chrono::steady_clock::now() < deadline)
            std::this_thread::sleep_for(std::chrono::milliseconds(25));
    }

    static void replace_all(std::string& s, std::string_view needle, std::string_view sub) {
        std::size_t pos = 0;
        while ((pos = s.find(needle, pos)) != std::string::npos) {
            s.replace(pos, needle.size(), sub);
            pos += sub.size();
        }
    }

    Corpus corpus_;
    httplib::Server server_;
    std::thread thread_;
    std::atomic<bool> closing_{false};
    bool running_ = false;
    int port_ = 0;
    std::string base_url_;
    std::unordered_map<std::string, std::string> panels_;       // gizmo_id -> panel JSON
    std::unordered_map<std::string, const CorpusEntry*> sites_; // path -> entry
    std::map<std::string, CustomRoute> custom_routes_;
    std::atomic<std::uint64_t> total_requests_{0};
    mutable std::mutex counter_mutex_;
    std::map<std::string, std::uint64_t> path_requests_;
};

} // namespace gptwatch
