#pragma once

#include <chrono>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "gptwatch/core_model.hpp"
#include "gptwatch/domain.hpp"
#include "gptwatch/url.hpp"
#include "gptwatch/util.hpp"

namespace gptwatch {

// One (third-party domain, policy URL) pair as read from an app's privacy
// settings panel. The domain is kept in canonical form; the URL stays exactly
// as the developer declared it.
struct PrivacyEntry {
    std::string domain;
    std::string policy_url;

    bool operator==(const PrivacyEntry&) const = default;
    auto operator<=>(const PrivacyEntry&) const = default;
};

struct PrivacyPanel {
    GizmoId gizmo_id;
    std::vector<PrivacyEntry> entries; // empty: the app declares no actions
    std::string retrieved_at;          // RFC 3339 UTC

    bool operator==(const PrivacyPanel&) const = default;
};

enum class DriverErrorKind { AppNotFound, PanelUnavailable, TransportFailure, RateLimited };

inline std::string_view to_string(DriverErrorKind k) {
    switch (k) {
    case DriverErrorKind::AppNotFound: return "app_not_found";
    case DriverErrorKind::PanelUnavailable: return "panel_unavailable";
    case DriverErrorKind::TransportFailure: return "transport_failure";
    case DriverErrorKind::RateLimited: return "rate_limited";
    }
    return "?";
}

class DriverError : public std::runtime_error {
public:
    DriverError(DriverErrorKind kind, const std::string& detail)
        : std::runtime_error(std::string(to_string(kind)) + ": " + detail), kind_(kind) {}
    DriverErrorKind kind() const { return kind_; }

private:
    DriverErrorKind kind_;
};

// Sliding one-second-window limiter: at most `per_second` acquisitions within
// any trailing second. Shared by all workers using one driver instance.
class RateLimiter {
public:
    explicit RateLimiter(double per_second) : per_second_(per_second) {}

    void acquire() {
        if (per_second_ <= 0) return; // unlimited
        using clock = std::chrono::steady_clock;
        std::unique_lock lock(mutex_);
        for (;;) {
            const auto now = clock::now();
            const auto window_start = now - std::chrono::seconds(1);
            while (!stamps_.empty() && stamps_.front() <= window_start) stamps_.pop_front();
            if (static_cast<double>(stamps_.size()) + 1.0 <= per_second_) {
                stamps_.push_back(now);
                return;
            }
            const auto wake = stamps_.front() + std::chrono::seconds(1);
            lock.unlock();
            std::this_thread::sleep_until(wake);
            lock.lock();
        }
    }

private:
    double per_second_;
    std::mutex mutex_;
    std::deque<std::chrono::steady_clock::time_point> stamps_;
};

// Page-interaction workflow behind a protocol: construct the access link for
// an app, open its details panel, read the privacy settings entries. Panels
// are immutable once returned, so drivers may be shared across workers.
class StoreDriver {
public:
    virtual ~StoreDriver() = default;
    virtual PrivacyPanel fetch_privacy_panel(const GizmoId& id) = 0;
};

struct SimulatedDriverConfig {
    std::string base_url{kDefaultStoreBase};
    double rate_limit_per_sec = 2.0;  // 0 disables limiting
    std::uint64_t max_requests = 0;   // total budget; 0 = unlimited
    std::chrono::seconds request_timeout{10};
    std::vector<std::chrono::milliseconds> retry_backoff{
        std::chrono::milliseconds(250), std::chrono::milliseconds(500),
        std::chrono::milliseconds(1000)};
};

// Driver against a store speaking the structured wire format:
// GET {base}/g/g-{id}/privacy -> {"gizmo_id":..., "entries":[{"domain":...,
// "privacy_policy":...}]}. Entries are normalized and panel-level duplicate
// (domain, url) pairs are dropped, first occurrence kept, so downstream
// counts never double-count a developer copy-paste.
class SimulatedDriver : public StoreDriver {
public:
    explicit SimulatedDriver(SimulatedDriverConfig config)
        : config_(std::move(config)), limiter_(config_.rate_limit_per_sec) {
        auto base = Url::parse(config_.base_url);
        if (!base || (base->scheme != "http" && base->scheme != "https"))
            throw std::invalid_argument("driver base URL must be absolute http(s): " +
                                        config_.base_url);
        base_ = *base;
    }

    PrivacyPanel fetch_privacy_panel(const GizmoId& id) override {
        const std::string target = base_.path + "/g/g-" + id.value() + "/privacy";
        auto res = get_with_retries(target);
        if (res->status == 404)
            throw DriverError(DriverErrorKind::AppNotFound, "no app for id " + id.value());
        if (res->status == 429)
            throw DriverError(DriverErrorKind::RateLimited, "store rejected request for " +
                                                                id.value());
        if (res->status != 200)
            throw DriverError(DriverErrorKind::PanelUnavailable,
                              "store returned status " + std::to_string(res->status) + " for " +
                                  id.value());
        return parse_panel(id, res->body);
    }

private:
    httplib::Result get_with_retries(const std::string& target) {
        std::string last_error;
        for (std::size_t attempt = 0;; ++attempt) {
            limiter_.acquire();
            take_budget();
            httplib::Client client(base_.origin());
            client.set_connection_timeout(config_.request_timeout);
            client.set_read_timeout(config_.request_timeout);
            client.set_write_timeout(config_.request_timeout);
            auto res = client.Get(target);
            if (res) return res;
            last_error = httplib::to_string(res.error());
            if (attempt >= config_.retry_backoff.size()) break;
            std::this_thread::sleep_for(config_.retry_backoff[attempt]);
        }
        throw DriverError(DriverErrorKind::TransportFailure,
                          last_error + " (GET " + base_.origin() + target + ")");
    }

    void take_budget() {
        if (config_.max_requests == 0) return;
        std::lock_guard lock(budget_mutex_);
        if (requests_made_ >= config_.max_requests)
            throw DriverError(DriverErrorKind::RateLimited,
                              "request budget of " + std::to_string(config_.max_requests) +
                                  " exhausted");
        ++requests_made_;
    }

    PrivacyPanel parse_panel(const GizmoId& id, const std::string& body) const {
        json j;
        try {
            j = json::parse(body);
        } catch (const json::parse_error& e) {
            throw DriverError(DriverErrorKind::PanelUnavailable,
                              std::string("panel payload is not JSON: ") + e.what());
        }
        if (!j.is_object() || !j.contains("entries") || !j["entries"].is_array())
            throw DriverError(DriverErrorKind::PanelUnavailable,
                              "panel payload missing \"entries\" array");
        PrivacyPanel panel{id, {}, now_rfc3339()};
        for (const auto& e : j["entries"]) {
            if (!e.is_object() || !e.contains("domain") || !e["domain"].is_string() ||
                !e.contains("privacy_policy") || !e["privacy_policy"].is_string()) {
                throw DriverError(DriverErrorKind::PanelUnavailable,
                                  "panel entries must be {\"domain\", \"privacy_policy\"}");
            }
            PrivacyEntry entry;
            try {
                entry.domain = normalize_domain(e["domain"].get<std::string>());
            } catch (const InvalidHost& err) {
                throw DriverError(DriverErrorKind::PanelUnavailable, err.what());
            }
            entry.policy_url = std::string(trim(e["privacy_policy"].get<std::string>()));
            auto url = Url::parse(entry.policy_url);
            if (!url || (url->scheme != "http" && url->scheme != "https"))
                throw DriverError(DriverErrorKind::PanelUnavailable,
                                  "policy link is not an absolute http(s) URL: " +
                                      entry.policy_url);
            bool duplicate = false;
            for (const auto& seen : panel.entries)
                if (seen == entry) { duplicate = true; break; }
            if (!duplicate) panel.entries.push_back(std::move(entry));
        }
        return panel;
    }

    SimulatedDriverConfig config_;
    Url base_;
    RateLimiter limiter_;
    std::mutex budget_mutex_;
    std::uint64_t requests_made_ = 0;
};

// Interface slot for the native macOS UI automation driver. The extraction
// contract is identical to SimulatedDriver; the screen-interaction mechanics
// are platform-bound and not implemented here.
class NativeUiDriver : public StoreDriver {
public:
    [[noreturn]] PrivacyPanel fetch_privacy_panel(const GizmoId&) override {
        throw std::logic_error("native UI driver is not implemented on this platform");
    }
};

} // namespace gptwatch
