#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "gptwatch/analysis.hpp"
#include "gptwatch/core_model.hpp"
#include "gptwatch/dataset_store.hpp"
#include "gptwatch/policy_audit.hpp"
#include "gptwatch/store_driver.hpp"

namespace gptwatch {

enum class DriverChoice { Simulated, NativeStub };

struct RunConfig {
    std::string base_url{kDefaultStoreBase};
    DriverChoice driver = DriverChoice::Simulated;
    AuditPolicy audit;
    std::filesystem::path snapshot_root{"snapshots"};
    double rate_limit_per_sec = 2.0;
    std::uint64_t max_requests = 0;

    void validate() const {
        if (audit.parallelism < 1) throw std::invalid_argument("parallelism must be >= 1");
        auto base = Url::parse(base_url);
        if (!base || (base->scheme != "http" && base->scheme != "https"))
            throw std::invalid_argument("base URL must be absolute http(s): " + base_url);
    }

    std::unique_ptr<StoreDriver> make_driver() const {
        if (driver == DriverChoice::NativeStub) return std::make_unique<NativeUiDriver>();
        SimulatedDriverConfig cfg;
        cfg.base_url = base_url;
        cfg.rate_limit_per_sec = rate_limit_per_sec;
        cfg.max_requests = max_requests;
        cfg.request_timeout = audit.timeout;
        return std::make_unique<SimulatedDriver>(cfg);
    }
};

struct IngestSummary {
    IngestResult result;
    std::map<GptClass, std::size_t> class_counts;
};

inline IngestSummary run_ingest(const std::filesystem::path& path) {
    IngestSummary summary{ingest_metadata_file(path), {}};
    for (const auto& app : summary.result.apps) ++summary.class_counts[classify(app)];
    return summary;
}

struct CrawlReport {
    std::string snapshot_id;
    bool partial = false;
    std::size_t transport_failures = 0;
    std::size_t apps = 0;
    std::size_t panels = 0;
    std::size_t audits = 0;
    std::size_t documents = 0;
    std::vector<std::string> app_errors; // "<gizmo_id>: <message>", crawl order
};

// Full pipeline pass: fetch every app's panel (empty for non-action apps),
// audit all declared links, store accessible documents, write one snapshot.
// Apps that fail to yield a panel are reported and mark the capture partial;
// the snapshot still lands.
inline CrawlReport run_crawl(const std::vector<GptMetadata>& apps, StoreDriver& driver,
                             const RunConfig& config) {
    config.validate();

    std::vector<std::optional<PrivacyPanel>> fetched(apps.size());
    std::vector<std::string> errors(apps.size());
    std::vector<char> transport_failed(apps.size(), 0);

    std::vector<std::string> keys(apps.size());
    auto base = Url::parse(config.base_url);
    for (auto& k : keys) k = base ? base->host : std::string();
    audit_detail::parallel_for_hosts(
        keys, config.audit.parallelism, config.audit.parallelism, [&](std::size_t i) {
            try {
                fetched[i] = driver.fetch_privacy_panel(apps[i].gizmo_id);
            } catch (const DriverError& e) {
                errors[i] = apps[i].gizmo_id.value() + ": " + e.what();
                if (e.kind() == DriverErrorKind::TransportFailure) transport_failed[i] = 1;
            } catch (const std::exception& e) {
                errors[i] = apps[i].gizmo_id.value() + ": " + e.what();
                transport_failed[i] = 1;
            }
        });

    Snapshot snapshot;
    snapshot.snapshot_id = make_snapshot_id();
    snapshot.apps = apps;
    CrawlReport report;
    for (std::size_t i = 0; i < apps.size(); ++i) {
        if (fetched[i]) {
            snapshot.panels.push_back(std::move(*fetched[i]));
        } else {
            report.app_errors.push_back(errors[i]);
            if (transport_failed[i]) ++report.transport_failures;
        }
    }
    snapshot.partial = snapshot.panels.size() != apps.size();

    auto audited = audit_corpus(snapshot.panels, config.audit);
    snapshot.audits = std::move(audited.records);
    snapshot.documents = std::move(audited.documents);

    write_snapshot(snapshot, config.snapshot_root);

    report.snapshot_id = snapshot.snapshot_id;
    report.partial = snapshot.partial;
    report.apps = snapshot.apps.size();
    report.panels = snapshot.panels.size();
    report.audits = snapshot.audits.size();
    report.documents = snapshot.documents.size();
    return report;
}

inline std::vector<std::filesystem::path> run_report(const std::filesystem::path& root,
                                                     const std::string& snapshot_id,
                                                     ReportFormat format,
                                                     const std::filesystem::path& out_dir) {
    return export_report(load_snapshot(root, snapshot_id), format, out_dir);
}

inline SnapshotDiff run_diff(const std::filesystem::path& root, const std::string& id_a,
                             const std::string& id_b) {
    return diff_snapshots(load_snapshot(root, id_a), load_snapshot(root, id_b));
}

} // namespace gptwatch
