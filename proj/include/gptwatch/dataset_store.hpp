#pragma once

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "gptwatch/core_model.hpp"
#include "gptwatch/policy_audit.hpp"
#include "gptwatch/sha256.hpp"
#include "gptwatch/store_driver.hpp"
#include "gptwatch/util.hpp"

namespace gptwatch {

class DuplicateSnapshotId : public std::runtime_error {
public:
    explicit DuplicateSnapshotId(const std::string& id)
        : std::runtime_error("snapshot id already exists: " + id) {}
};

class SnapshotNotFound : public std::runtime_error {
public:
    explicit SnapshotNotFound(const std::string& id)
        : std::runtime_error("no snapshot with id: " + id) {}
};

class CorruptManifest : public std::runtime_error {
public:
    CorruptManifest(std::string file, const std::string& what)
        : std::runtime_error(what), file_(std::move(file)) {}
    const std::string& file() const { return file_; }

private:
    std::string file_;
};

class InvalidSnapshot : public std::runtime_error {
public:
    explicit InvalidSnapshot(const std::string& what) : std::runtime_error(what) {}
};

// A timestamped corpus-wide capture: metadata, panels, audit results and the
// policy documents that were accessible at capture time.
struct Snapshot {
    std::string snapshot_id;
    std::vector<GptMetadata> apps;
    std::vector<PrivacyPanel> panels;
    std::vector<AuditRecord> audits;
    std::vector<PolicyDocument> documents;
    bool partial = false; // a crawl that lost apps mid-run marks its capture

    bool operator==(const Snapshot&) const = default;

    void validate() const {
        std::set<std::string> ids;
        for (const auto& app : apps) {
            if (!ids.insert(app.gizmo_id.value()).second)
                throw InvalidSnapshot("duplicate app gizmo_id " + app.gizmo_id.value());
        }
        std::set<std::pair<std::string, PrivacyEntry>> panel_entries;
        for (const auto& panel : panels) {
            if (!ids.contains(panel.gizmo_id.value()))
                throw InvalidSnapshot("panel references unknown app " + panel.gizmo_id.value());
            for (const auto& e : panel.entries)
                panel_entries.insert({panel.gizmo_id.value(), e});
        }
        for (const auto& audit : audits) {
            if (!panel_entries.contains({audit.gizmo_id, audit.entry}))
                throw InvalidSnapshot("audit entry (" + audit.gizmo_id + ", " +
                                      audit.entry.domain + ") appears in no panel");
        }
    }
};

// RFC 3339 timestamp plus a short random disambiguator, e.g.
// "2025-04-01T08:30:00Z-k4x2". Identity is temporal, not content-based.
inline std::string make_snapshot_id() {
    static constexpr std::string_view alphabet = "abcdefghijklmnopqrstuvwxyz0123456789";
    std::random_device rd;
    std::string tag;
    for (int i = 0; i < 4; ++i) tag.push_back(alphabet[rd() % alphabet.size()]);
    return now_rfc3339() + "-" + tag;
}

namespace store_detail {

inline json panel_to_json(const PrivacyPanel& p) {
    json entries = json::array();
    for (const auto& e : p.entries)
        entries.push_back({{"domain", e.domain}, {"policy_url", e.policy_url}});
    return json{{"gizmo_id", p.gizmo_id.value()},
                {"retrieved_at", p.retrieved_at},
                {"entries", std::move(entries)}};
}

inline PrivacyPanel panel_from_json(const json& j) {
    PrivacyPanel p{GizmoId(j.at("gizmo_id").get<std::string>()), {},
                   j.at("retrieved_at").get<std::string>()};
    for (const auto& e : j.at("entries"))
        p.entries.push_back({e.at("domain").get<std::string>(),
                             e.at("policy_url").get<std::string>()});
    return p;
}

template <class T, class ToJson>
std::string to_jsonl(const std::vector<T>& items, ToJson&& to_json_fn) {
    std::string out;
    for (const auto& item : items) {
        out += to_json_fn(item).dump();
        out += '\n';
    }
    return out;
}

template <class FromJson>
void from_jsonl(const std::string& text, const std::string& file, FromJson&& fn) {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        try {
            fn(json::parse(line));
        } catch (const std::exception& e) {
            throw CorruptManifest(file, file + " line " + std::to_string(line_no) +
                                            " does not parse: " + e.what());
        }
    }
}

inline constexpr std::array<std::string_view, 4> kDataFiles = {
    "apps.jsonl", "panels.jsonl", "audits.jsonl", "documents.jsonl"};

} // namespace store_detail

// Writes root/{snapshot_id}/{apps,panels,audits,documents}.jsonl plus a
// manifest with per-file counts and digests. The write goes through a temp
// directory and a final rename, so readers never observe a partial snapshot.
inline std::filesystem::path write_snapshot(const Snapshot& s,
                                            const std::filesystem::path& root) {
    namespace fs = std::filesystem;
    namespace sd = store_detail;
    s.validate();
    if (s.snapshot_id.empty()) throw InvalidSnapshot("snapshot_id is empty");

    const fs::path target = root / s.snapshot_id;
    std::error_code ec;
    if (fs::exists(target, ec)) throw DuplicateSnapshotId(s.snapshot_id);
    fs::create_directories(root, ec);
    if (ec) throw IoFailure("cannot create snapshot root " + root.string() + ": " + ec.message());

    const fs::path tmp = root / (".tmp-" + s.snapshot_id);
    fs::remove_all(tmp, ec);
    fs::create_directory(tmp, ec);
    if (ec) throw IoFailure("cannot create temp dir " + tmp.string() + ": " + ec.message());

    try {
        std::map<std::string, std::string> contents;
        contents["apps.jsonl"] =
            sd::to_jsonl(s.apps, [](const GptMetadata& m) { return metadata_to_json(m); });
        contents["panels.jsonl"] =
            sd::to_jsonl(s.panels, [](const PrivacyPanel& p) { return sd::panel_to_json(p); });
        contents["audits.jsonl"] =
            sd::to_jsonl(s.audits, [](const AuditRecord& r) { return audit_record_to_json(r); });
        contents["documents.jsonl"] = sd::to_jsonl(
            s.documents, [](const PolicyDocument& d) { return policy_document_to_json(d); });

        json manifest{{"snapshot_id", s.snapshot_id},
                      {"partial", s.partial},
                      {"counts",
                       {{"apps", s.apps.size()},
                        {"panels", s.panels.size()},
                        {"audits", s.audits.size()},
                        {"documents", s.documents.size()}}},
                      {"digests", json::object()}};
        for (auto name : sd::kDataFiles) {
            const std::string& body = contents.at(std::string(name));
            write_file(tmp / name, body);
            manifest["digests"][std::string(name)] = sha256_hex(body);
        }
        write_file(tmp / "manifest.json", manifest.dump(2) + "\n");

        fs::rename(tmp, target, ec);
        if (ec) throw IoFailure("cannot finalize snapshot " + target.string() + ": " + ec.message());
    } catch (...) {
        fs::remove_all(tmp, ec);
        throw;
    }
    return target;
}

// Inverse of write_snapshot; every data file is digest-checked against the
// manifest before parsing, and a mismatch names the corrupted file.
inline Snapshot load_snapshot(const std::filesystem::path& root, const std::string& id) {
    namespace fs = std::filesystem;
    namespace sd = store_detail;
    const fs::path dir = root / id;
    if (!fs::exists(dir / "manifest.json")) throw SnapshotNotFound(id);

    json manifest;
    try {
        manifest = json::parse(read_file(dir / "manifest.json"));
    } catch (const std::exception& e) {
        throw CorruptManifest("manifest.json", std::string("manifest does not parse: ") + e.what());
    }

    Snapshot s;
    s.snapshot_id = manifest.value("snapshot_id", id);
    s.partial = manifest.value("partial", false);

    std::map<std::string, std::string> contents;
    for (auto name : sd::kDataFiles) {
        const std::string key(name);
        std::string body;
        try {
            body = read_file(dir / key);
        } catch (const IoFailure& e) {
            throw CorruptManifest(key, e.what());
        }
        const std::string expected = manifest.at("digests").at(key).get<std::string>();
        if (sha256_hex(body) != expected)
            throw CorruptManifest(key, "digest mismatch for " + key + " in snapshot " + id);
        contents[key] = std::move(body);
    }

    sd::from_jsonl(contents["apps.jsonl"], "apps.jsonl",
                   [&](const json& j) { s.apps.push_back(metadata_from_json(j)); });
    sd::from_jsonl(contents["panels.jsonl"], "panels.jsonl",
                   [&](const json& j) { s.panels.push_back(sd::panel_from_json(j)); });
    sd::from_jsonl(contents["audits.jsonl"], "audits.jsonl",
                   [&](const json& j) { s.audits.push_back(audit_record_from_json(j)); });
    sd::from_jsonl(contents["documents.jsonl"], "documents.jsonl",
                   [&](const json& j) { s.documents.push_back(policy_document_from_json(j)); });

    const auto& counts = manifest.at("counts");
    if (counts.at("apps").get<std::size_t>() != s.apps.size() ||
        counts.at("panels").get<std::size_t>() != s.panels.size() ||
        counts.at("audits").get<std::size_t>() != s.audits.size() ||
        counts.at("documents").get<std::size_t>() != s.documents.size()) {
        throw CorruptManifest("manifest.json", "manifest counts disagree with data files");
    }
    s.validate();
    return s;
}

inline std::vector<std::string> list_snapshots(const std::filesystem::path& root) {
    namespace fs = std::filesystem;
    std::vector<std::string> ids;
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(root, ec)) {
        if (!entry.is_directory()) continue;
        const std::string name = entry.path().filename().string();
        if (name.starts_with(".")) continue;
        if (fs::exists(entry.path() / "manifest.json")) ids.push_back(name);
    }
    std::sort(ids.begin(), ids.end());
    return ids;
}

// --- Diffing ---------------------------------------------------------------

enum class ChangeKind {
    DomainAdded,
    DomainRemoved,
    PolicyUrlChanged,
    PolicyTextChanged,
    AppAdded,
    AppRemoved,
    ClassChanged,
};

inline std::string_view to_string(ChangeKind k) {
    switch (k) {
    case ChangeKind::DomainAdded: return "domain_added";
    case ChangeKind::DomainRemoved: return "domain_removed";
    case ChangeKind::PolicyUrlChanged: return "policy_url_changed";
    case ChangeKind::PolicyTextChanged: return "policy_text_changed";
    case ChangeKind::AppAdded: return "app_added";
    case ChangeKind::AppRemoved: return "app_removed";
    case ChangeKind::ClassChanged: return "class_changed";
    }
    return "?";
}

struct ChangeEvent {
    ChangeKind kind;
    std::string gizmo_id;
    std::string domain; // set for domain-scoped kinds
    std::string url;    // set for PolicyTextChanged
    std::string before; // kind-appropriate: URLs, hashes, class names
    std::string after;

    bool operator==(const ChangeEvent&) const = default;
    auto operator<=>(const ChangeEvent&) const = default;
};

inline json change_event_to_json(const ChangeEvent& e) {
    json j;
    j["kind"] = std::string(to_string(e.kind));
    j["gizmo_id"] = e.gizmo_id;
    if (!e.domain.empty()) j["domain"] = e.domain;
    if (!e.url.empty()) j["url"] = e.url;
    if (!e.before.empty()) j["before"] = e.before;
    if (!e.after.empty()) j["after"] = e.after;
    return j;
}

struct SnapshotDiff {
    std::string from_id;
    std::string to_id;
    std::vector<ChangeEvent> events; // sorted by gizmo_id, then kind
};

namespace store_detail {

struct AppView {
    const GptMetadata* meta = nullptr;
    // domain -> declared URLs in declaration order
    std::map<std::string, std::vector<std::string>> urls_by_domain;
    // (domain, url) -> content hash of the accessible document
    std::map<std::pair<std::string, std::string>, std::string> hashes;
};

inline std::map<std::string, AppView> index_snapshot(const Snapshot& s) {
    std::map<std::string, AppView> views;
    for (const auto& app : s.apps) views[app.gizmo_id.value()].meta = &app;
    for (const auto& panel : s.panels) {
        auto& view = views[panel.gizmo_id.value()];
        for (const auto& e : panel.entries) view.urls_by_domain[e.domain].push_back(e.policy_url);
    }
    for (const auto& audit : s.audits) {
        if (audit.outcome.kind == AuditOutcomeKind::Accessible && audit.content_hash)
            views[audit.gizmo_id].hashes[{audit.entry.domain, audit.entry.policy_url}] =
                *audit.content_hash;
    }
    return views;
}

inline std::string joined_urls(const std::vector<std::string>& urls) {
    auto sorted = urls;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    return join(sorted, " ");
}

} // namespace store_detail

// Change events between two snapshots. An app present on only one side yields
// a single app-level event with no per-domain noise; apps on both sides are
// compared by panel domain set, per-domain URL set, document hash for
// unchanged (domain, url) pairs, and classification.
inline SnapshotDiff diff_snapshots(const Snapshot& a, const Snapshot& b) {
    namespace sd = store_detail;
    SnapshotDiff diff{a.snapshot_id, b.snapshot_id, {}};
    const auto va = sd::index_snapshot(a);
    const auto vb = sd::index_snapshot(b);

    std::set<std::string> ids;
    for (const auto& [id, _] : va) ids.insert(id);
    for (const auto& [id, _] : vb) ids.insert(id);

    for (const auto& id : ids) {
        const auto ita = va.find(id);
        const auto itb = vb.find(id);
        if (ita == va.end()) {
            diff.events.push_back({ChangeKind::AppAdded, id, "", "", "", ""});
            continue;
        }
        if (itb == vb.end()) {
            diff.events.push_back({ChangeKind::AppRemoved, id, "", "", "", ""});
            continue;
        }
        const sd::AppView& left = ita->second;
        const sd::AppView& right = itb->second;

        for (const auto& [domain, urls] : right.urls_by_domain) {
            if (!left.urls_by_domain.contains(domain))
                diff.events.push_back({ChangeKind::DomainAdded, id, domain, "", "", ""});
        }
        for (const auto& [domain, urls] : left.urls_by_domain) {
            if (!right.urls_by_domain.contains(domain))
                diff.events.push_back({ChangeKind::DomainRemoved, id, domain, "", "", ""});
        }
        for (const auto& [domain, urls_a] : left.urls_by_domain) {
            const auto common = right.urls_by_domain.find(domain);
            if (common == right.urls_by_domain.end()) continue;
            const std::string before = sd::joined_urls(urls_a);
            const std::string after = sd::joined_urls(common->second);
            if (before != after) {
                diff.events.push_back({ChangeKind::PolicyUrlChanged, id, domain, "", before, after});
            }
            // Text comparison only makes sense for URLs declared on both sides.
            for (const auto& url : urls_a) {
                if (std::find(common->second.begin(), common->second.end(), url) ==
                    common->second.end())
                    continue;
                const auto ha = left.hashes.find({domain, url});
                const auto hb = right.hashes.find({domain, url});
                if (ha != left.hashes.end() && hb != right.hashes.end() &&
                    ha->second != hb->second) {
                    diff.events.push_back({ChangeKind::PolicyTextChanged, id, domain, url,
                                           ha->second, hb->second});
                }
            }
        }
        if (left.meta && right.meta) {
            const GptClass ca = classify(*left.meta);
            const GptClass cb = classify(*right.meta);
            if (ca != cb) {
                diff.events.push_back({ChangeKind::ClassChanged, id, "", "",
                                       std::string(to_string(ca)), std::string(to_string(cb))});
            }
        }
    }

    std::sort(diff.events.begin(), diff.events.end(),
              [](const ChangeEvent& x, const ChangeEvent& y) {
                  if (x.gizmo_id != y.gizmo_id) return x.gizmo_id < y.gizmo_id;
                  if (x.kind != y.kind) return static_cast<int>(x.kind) < static_cast<int>(y.kind);
                  if (x.domain != y.domain) return x.domain < y.domain;
                  return x.url < y.url;
              });
    return diff;
}

} // namespace gptwatch
