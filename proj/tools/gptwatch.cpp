// Command-line pipeline: ingest app metadata, crawl privacy panels through a
// store driver, audit the declared policy links, snapshot the results, report
// aggregates and diff snapshots. `serve-fixture` runs the deterministic local
// store + policy-host fixture the test corpus is crawled against.
//
// Exit codes: 0 success, 1 usage error, 2 runtime failure, 3 diff found
// changes.

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "gptwatch/gptwatch.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitDiffFound = 3;

std::atomic<bool> g_stop{false};

void handle_signal(int) { g_stop = true; }

struct CommonOptions {
    gptwatch::RunConfig config;
    std::string driver_name = "simulated";
    long timeout_secs = 10;
    std::string snapshot_root = "snapshots";

    void add_audit_flags(CLI::App& cmd) {
        cmd.add_option("--timeout-secs", timeout_secs, "Per-attempt fetch timeout in seconds")
            ->check(CLI::PositiveNumber);
        cmd.add_option("--max-redirects", config.audit.max_redirects,
                       "Redirect hops before a link counts as broken")
            ->check(CLI::NonNegativeNumber);
        cmd.add_option("--parallelism", config.audit.parallelism, "Concurrent fetch workers")
            ->check(CLI::PositiveNumber);
        cmd.add_option("--per-host", config.audit.per_host,
                       "Concurrent fetches allowed per host")
            ->check(CLI::PositiveNumber);
    }

    void add_crawl_flags(CLI::App& cmd) {
        add_audit_flags(cmd);
        cmd.add_option("--base-url", config.base_url, "Store base URL");
        cmd.add_option("--snapshot-root", snapshot_root, "Directory snapshots are stored under");
        cmd.add_option("--driver", driver_name, "Store driver: simulated or native-stub")
            ->check(CLI::IsMember({"simulated", "native-stub"}));
        cmd.add_option("--rate-limit", config.rate_limit_per_sec,
                       "Store requests per second, 0 for unlimited");
        cmd.add_option("--max-requests", config.max_requests,
                       "Total store request budget, 0 for unlimited");
    }

    gptwatch::RunConfig finish() {
        config.audit.timeout = std::chrono::seconds(timeout_secs);
        config.snapshot_root = snapshot_root;
        config.driver = driver_name == "native-stub" ? gptwatch::DriverChoice::NativeStub
                                                     : gptwatch::DriverChoice::Simulated;
        config.validate();
        return config;
    }
};

void print_ingest_diagnostics(const gptwatch::IngestResult& result) {
    for (const auto& err : result.errors) {
        std::cerr << "line " << err.line << ": "
                  << (err.kind == gptwatch::IngestError::Kind::Parse ? "parse error"
                                                                     : "validation error");
        if (!err.field.empty()) std::cerr << " [" << err.field << "]";
        std::cerr << ": " << err.message << "\n";
    }
}

int cmd_ingest(const std::string& path) {
    auto summary = gptwatch::run_ingest(path);
    print_ingest_diagnostics(summary.result);
    gptwatch::json classes;
    for (const auto& [cls, count] : summary.class_counts)
        classes[std::string(gptwatch::to_string(cls))] = count;
    gptwatch::json out{{"ingested", summary.result.apps.size()},
                       {"rejected", summary.result.errors.size()},
                       {"classes", classes}};
    std::cout << out.dump() << "\n";
    std::cerr << summary.result.apps.size() << " ingested, " << summary.result.errors.size()
              << " rejected\n";
    return summary.result.errors.empty() ? kExitOk : kExitRuntime;
}

int cmd_crawl(const std::string& path, CommonOptions& opts) {
    const auto config = opts.finish();
    auto summary = gptwatch::run_ingest(path);
    if (!summary.result.errors.empty()) {
        print_ingest_diagnostics(summary.result);
        std::cerr << "refusing to crawl: " << summary.result.errors.size()
                  << " invalid metadata record(s)\n";
        return kExitRuntime;
    }
    auto driver = config.make_driver();
    auto report = gptwatch::run_crawl(summary.result.apps, *driver, config);
    for (const auto& err : report.app_errors) std::cerr << err << "\n";
    gptwatch::json out{{"snapshot_id", report.snapshot_id},
                       {"partial", report.partial},
                       {"apps", report.apps},
                       {"panels", report.panels},
                       {"audits", report.audits},
                       {"documents", report.documents},
                       {"transport_failures", report.transport_failures}};
    std::cout << out.dump() << "\n";
    return report.transport_failures == 0 ? kExitOk : kExitRuntime;
}

int cmd_audit(const std::string& input, CommonOptions& opts) {
    opts.config.base_url = "http://127.0.0.1"; // unused by standalone audits
    const auto config = opts.finish();

    std::ifstream in(input);
    if (!in) throw gptwatch::IoFailure("cannot open " + input + " for reading");
    std::vector<gptwatch::PrivacyPanel> panels;
    std::string line;
    std::size_t line_no = 0;
    // Entries are grouped into one synthetic panel per gizmo_id (or one
    // anonymous panel) so the corpus auditor's ordering and caching apply.
    std::map<std::string, std::vector<gptwatch::PrivacyEntry>> grouped;
    while (std::getline(in, line)) {
        ++line_no;
        if (gptwatch::trim(line).empty()) continue;
        gptwatch::json j;
        try {
            j = gptwatch::json::parse(line);
        } catch (const gptwatch::json::parse_error& e) {
            std::cerr << "line " << line_no << ": invalid JSON: " << e.what() << "\n";
            return kExitRuntime;
        }
        try {
            gptwatch::PrivacyEntry entry{
                gptwatch::normalize_domain(j.at("domain").get<std::string>()),
                j.at("privacy_policy").get<std::string>()};
            grouped[j.value("gizmo_id", "")].push_back(std::move(entry));
        } catch (const std::exception& e) {
            std::cerr << "line " << line_no << ": " << e.what() << "\n";
            return kExitRuntime;
        }
    }
    const bool anonymous = grouped.contains("");
    if (anonymous && grouped.size() > 1) {
        std::cerr << "entries must either all carry a gizmo_id or none\n";
        return kExitRuntime;
    }
    for (auto& [gizmo, entries] : grouped) {
        gptwatch::PrivacyPanel panel{gptwatch::GizmoId(gizmo.empty() ? "000000000" : gizmo),
                                     std::move(entries), gptwatch::now_rfc3339()};
        panels.push_back(std::move(panel));
    }
    auto audited = gptwatch::audit_corpus(panels, config.audit);
    for (auto& record : audited.records) {
        if (anonymous) record.gizmo_id.clear();
        std::cout << gptwatch::audit_record_to_json(record).dump() << "\n";
    }
    return kExitOk;
}

int cmd_report(const std::string& snapshot_id, const std::string& format_name,
               const std::string& out_dir, const std::string& root) {
    auto format = gptwatch::report_format_from_string(format_name);
    if (!format) {
        std::cerr << "unknown report format \"" << format_name << "\" (use csv or json)\n";
        return kExitUsage;
    }
    auto files = gptwatch::run_report(root, snapshot_id, *format, out_dir);
    gptwatch::json names = gptwatch::json::array();
    for (const auto& f : files) names.push_back(f.filename().string());
    std::cout << gptwatch::json{{"report_dir", out_dir}, {"files", names}}.dump() << "\n";
    return kExitOk;
}

int cmd_diff(const std::string& id_a, const std::string& id_b, const std::string& root) {
    auto diff = gptwatch::run_diff(root, id_a, id_b);
    for (const auto& event : diff.events)
        std::cout << gptwatch::change_event_to_json(event).dump() << "\n";
    return diff.events.empty() ? kExitOk : kExitDiffFound;
}

struct ServeOptions {
    std::string config_path;
    std::string host = "127.0.0.1";
    int port = 0;
    long seed = -1; // overrides the config's seed when >= 0
    std::string metadata_out;
    std::string endpoint_file;
};

int cmd_serve_fixture(const ServeOptions& opts) {
    auto config = gptwatch::CorpusConfig::from_json(
        gptwatch::json::parse(gptwatch::read_file(opts.config_path)));
    if (opts.seed >= 0) config.seed = static_cast<std::uint64_t>(opts.seed);
    auto corpus = gptwatch::generate_corpus(config);

    gptwatch::FixtureServer server(std::move(corpus));
    const std::string base = server.start(opts.host, opts.port);

    if (!opts.metadata_out.empty())
        gptwatch::write_corpus_metadata(server.corpus(), base, opts.metadata_out);
    if (!opts.endpoint_file.empty()) gptwatch::write_file(opts.endpoint_file, base + "\n");

    gptwatch::json out{{"endpoint", base},
                       {"apps", server.corpus().apps.size()},
                       {"entries", server.corpus().total_entries()}};
    std::cout << out.dump() << std::endl;

    std::signal(SIGINT, handle_signal);
    std::signal(SIGTERM, handle_signal);
    while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
    server.stop();
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"GPT-store third-party service and privacy-policy auditing pipeline"};
    app.require_subcommand(1);

    std::string metadata_path;
    std::string audit_input;
    std::string snapshot_id, diff_a, diff_b;
    std::string report_format = "csv";
    std::string report_out = "report";
    CommonOptions crawl_opts, audit_opts;
    ServeOptions serve_opts;
    std::string report_root = "snapshots", diff_root = "snapshots";

    auto* ingest = app.add_subcommand("ingest", "Validate a JSON Lines metadata file");
    ingest->add_option("metadata", metadata_path, "Path to metadata JSON Lines")->required();

    auto* crawl = app.add_subcommand(
        "crawl", "Fetch panels for every app, audit the links, write a snapshot");
    crawl->add_option("metadata", metadata_path, "Path to metadata JSON Lines")->required();
    crawl_opts.add_crawl_flags(*crawl);

    auto* audit = app.add_subcommand("audit", "Audit privacy entries from a JSON Lines file");
    audit->add_option("--input", audit_input, "Entries file: {\"domain\", \"privacy_policy\"}")
        ->required();
    audit_opts.add_audit_flags(*audit);

    auto* report = app.add_subcommand("report", "Export aggregate measurements for a snapshot");
    report->add_option("snapshot", snapshot_id, "Snapshot id")->required();
    report->add_option("--format", report_format, "csv or json");
    report->add_option("--out", report_out, "Output directory");
    report->add_option("--snapshot-root", report_root, "Directory snapshots are stored under");

    auto* diff = app.add_subcommand("diff", "Print change events between two snapshots");
    diff->add_option("from", diff_a, "Older snapshot id")->required();
    diff->add_option("to", diff_b, "Newer snapshot id")->required();
    diff->add_option("--snapshot-root", diff_root, "Directory snapshots are stored under");

    auto* serve = app.add_subcommand("serve-fixture", "Serve a deterministic store fixture");
    serve->add_option("--config", serve_opts.config_path, "Corpus config JSON file")->required();
    serve->add_option("--seed", serve_opts.seed, "Override the config's seed");
    serve->add_option("--host", serve_opts.host, "Bind host");
    serve->add_option("--port", serve_opts.port, "Bind port, 0 for ephemeral");
    serve->add_option("--metadata-out", serve_opts.metadata_out,
                      "Write the corpus metadata JSON Lines here");
    serve->add_option("--endpoint-file", serve_opts.endpoint_file,
                      "Write the bound base URL here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*ingest) return cmd_ingest(metadata_path);
        if (*crawl) return cmd_crawl(metadata_path, crawl_opts);
        if (*audit) return cmd_audit(audit_input, audit_opts);
        if (*report) return cmd_report(snapshot_id, report_format, report_out, report_root);
        if (*diff) return cmd_diff(diff_a, diff_b, diff_root);
        if (*serve) return cmd_serve_fixture(serve_opts);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitUsage;
}
