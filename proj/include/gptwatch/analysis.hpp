#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gptwatch/core_model.hpp"
#include "gptwatch/dataset_store.hpp"
#include "gptwatch/util.hpp"

namespace gptwatch {

class InconsistentSnapshot : public std::runtime_error {
public:
    explicit InconsistentSnapshot(const std::string& what) : std::runtime_error(what) {}
};

struct DomainCountDistribution {
    std::uint64_t zero = 0;
    std::uint64_t one = 0;
    std::uint64_t two_plus = 0;
    std::map<std::string, std::uint64_t> per_app; // gizmo_id -> distinct domain count

    bool operator==(const DomainCountDistribution&) const = default;
};

// (domain, number of distinct apps declaring it), descending by count with
// lexicographic tie-break. An app contributes at most one per domain.
struct DomainFrequency {
    std::vector<std::pair<std::string, std::uint64_t>> items;

    bool operator==(const DomainFrequency&) const = default;
};

struct AuditDistribution {
    std::uint64_t accessible = 0;
    std::uint64_t broken = 0;
    std::uint64_t homepage = 0;
    std::uint64_t timeout = 0;
    std::uint64_t server_error = 0;

    std::uint64_t total() const { return accessible + broken + homepage + timeout + server_error; }

    bool operator==(const AuditDistribution&) const = default;
};

inline DomainCountDistribution domain_count_distribution(const Snapshot& s) {
    DomainCountDistribution dist;
    std::map<std::string, std::set<std::string>> domains;
    for (const auto& app : s.apps) domains[app.gizmo_id.value()];
    for (const auto& panel : s.panels) {
        auto& set = domains[panel.gizmo_id.value()];
        for (const auto& e : panel.entries) set.insert(e.domain);
    }
    for (const auto& [id, set] : domains) {
        dist.per_app[id] = set.size();
        if (set.empty()) ++dist.zero;
        else if (set.size() == 1) ++dist.one;
        else ++dist.two_plus;
    }
    return dist;
}

inline DomainFrequency domain_frequency(const Snapshot& s) {
    std::map<std::string, std::set<std::string>> apps_per_domain;
    for (const auto& panel : s.panels)
        for (const auto& e : panel.entries)
            apps_per_domain[e.domain].insert(panel.gizmo_id.value());
    DomainFrequency freq;
    freq.items.reserve(apps_per_domain.size());
    for (const auto& [domain, apps] : apps_per_domain) freq.items.emplace_back(domain, apps.size());
    std::sort(freq.items.begin(), freq.items.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    return freq;
}

inline AuditDistribution audit_distribution(const std::vector<AuditRecord>& records) {
    AuditDistribution dist;
    for (const auto& r : records) {
        switch (r.outcome.kind) {
        case AuditOutcomeKind::Accessible: ++dist.accessible; break;
        case AuditOutcomeKind::BrokenLink: ++dist.broken; break;
        case AuditOutcomeKind::HomepageOnly: ++dist.homepage; break;
        case AuditOutcomeKind::Timeout: ++dist.timeout; break;
        case AuditOutcomeKind::ServerError: ++dist.server_error; break;
        }
    }
    return dist;
}

// Classifies every app and cross-checks panels against metadata: an app whose
// panel lists entries must be action-based, otherwise the snapshot lies about
// itself.
inline std::map<GptClass, std::uint64_t> classification_distribution(const Snapshot& s) {
    std::map<std::string, GptClass> classes;
    std::map<GptClass, std::uint64_t> counts;
    for (const auto& app : s.apps) {
        const GptClass c = classify(app);
        classes[app.gizmo_id.value()] = c;
        ++counts[c];
    }
    for (const auto& panel : s.panels) {
        if (panel.entries.empty()) continue;
        auto it = classes.find(panel.gizmo_id.value());
        if (it != classes.end() && it->second != GptClass::ActionBased)
            throw InconsistentSnapshot("app " + panel.gizmo_id.value() +
                                       " has panel entries but no actions metadata");
    }
    return counts;
}

enum class ReportFormat { Csv, Json };

inline std::optional<ReportFormat> report_format_from_string(std::string_view s) {
    if (s == "csv") return ReportFormat::Csv;
    if (s == "json") return ReportFormat::Json;
    return std::nullopt;
}

namespace analysis_detail {

// CSV rows carry only observed (non-zero) buckets; an empty snapshot exports
// headers only. The JSON files always carry the full objects.
inline std::string domain_count_csv(const DomainCountDistribution& d) {
    std::string out = "bucket,count\n";
    if (d.zero > 0) out += "0," + std::to_string(d.zero) + "\n";
    if (d.one > 0) out += "1," + std::to_string(d.one) + "\n";
    if (d.two_plus > 0) out += "2+," + std::to_string(d.two_plus) + "\n";
    return out;
}

inline std::string domain_frequency_csv(const DomainFrequency& f) {
    std::string out = "domain,app_count\n";
    for (const auto& [domain, count] : f.items)
        out += domain + "," + std::to_string(count) + "\n";
    return out;
}

inline std::string audit_csv(const AuditDistribution& d) {
    std::string out = "outcome,count\n";
    const std::pair<std::string, std::uint64_t> rows[] = {
        {"accessible", d.accessible}, {"broken", d.broken},          {"homepage", d.homepage},
        {"timeout", d.timeout},       {"server_error", d.server_error}};
    for (const auto& [name, count] : rows)
        if (count > 0) out += name + "," + std::to_string(count) + "\n";
    return out;
}

inline std::string classification_csv(const std::map<GptClass, std::uint64_t>& counts) {
    std::string out = "class,count\n";
    for (auto c : {GptClass::PromptBased, GptClass::KnowledgeBased, GptClass::ActionBased}) {
        const auto it = counts.find(c);
        if (it != counts.end() && it->second > 0)
            out += std::string(to_string(c)) + "," + std::to_string(it->second) + "\n";
    }
    return out;
}

} // namespace analysis_detail

// Emits the four aggregate measurements for a snapshot. Orderings are total,
// so repeated exports are byte-identical.
inline std::vector<std::filesystem::path> export_report(const Snapshot& s, ReportFormat format,
                                                        const std::filesystem::path& dir) {
    namespace ad = analysis_detail;
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoFailure("cannot create report dir " + dir.string() + ": " + ec.message());

    const auto counts = domain_count_distribution(s);
    const auto freq = domain_frequency(s);
    const auto audits = audit_distribution(s.audits);
    const auto classes = classification_distribution(s);

    std::vector<std::filesystem::path> written;
    auto emit = [&](std::string_view stem, const std::string& body) {
        const auto path = dir / (std::string(stem) + (format == ReportFormat::Csv ? ".csv" : ".json"));
        write_file(path, body);
        written.push_back(path);
    };

    if (format == ReportFormat::Csv) {
        emit("domain_count_distribution", ad::domain_count_csv(counts));
        emit("domain_frequency", ad::domain_frequency_csv(freq));
        emit("audit_distribution", ad::audit_csv(audits));
        emit("classification", ad::classification_csv(classes));
        return written;
    }

    json count_json{{"zero", counts.zero}, {"one", counts.one}, {"two_plus", counts.two_plus}};
    json freq_json = json::array();
    for (const auto& [domain, count] : freq.items)
        freq_json.push_back({{"domain", domain}, {"app_count", count}});
    json audit_json{{"accessible", audits.accessible},
                    {"broken", audits.broken},
                    {"homepage", audits.homepage},
                    {"timeout", audits.timeout},
                    {"server_error", audits.server_error}};
    json class_json;
    for (auto c : {GptClass::PromptBased, GptClass::KnowledgeBased, GptClass::ActionBased}) {
        const auto it = classes.find(c);
        class_json[std::string(to_string(c))] = it == classes.end() ? 0 : it->second;
    }
    emit("domain_count_distribution", count_json.dump(2) + "\n");
    emit("domain_frequency", freq_json.dump(2) + "\n");
    emit("audit_distribution", audit_json.dump(2) + "\n");
    emit("classification", class_json.dump(2) + "\n");
    return written;
}

} // namespace gptwatch
