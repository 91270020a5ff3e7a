#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <string_view>

#include "gptwatch/url.hpp"
#include "gptwatch/util.hpp"

namespace gptwatch {

class InvalidHost : public std::runtime_error {
public:
    explicit InvalidHost(const std::string& what) : std::runtime_error(what) {}
};

// Lowercased DNS host: labels of [a-z0-9-], dot-separated, no empty label.
inline bool is_valid_host(std::string_view host) {
    if (host.empty()) return false;
    std::size_t label_len = 0;
    for (char c : host) {
        if (c == '.') {
            if (label_len == 0) return false;
            label_len = 0;
            continue;
        }
        const bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-';
        if (!ok) return false;
        ++label_len;
    }
    return label_len > 0;
}

// Canonical form of a developer-supplied domain slot. Developers paste all
// sorts of things into it: full URLs, uppercase hosts, trailing dots. The
// canonical form keeps subdomains intact (account.x.com != x.com) so that
// per-domain usage counts stay well-defined.
inline std::string normalize_domain(std::string_view raw) {
    std::string_view s = trim(raw);
    if (s.empty()) throw InvalidHost("empty domain");

    std::string host;
    if (s.find("://") != std::string_view::npos) {
        auto url = Url::parse(s);
        if (!url) throw InvalidHost("domain looks like a URL but does not parse: " + std::string(raw));
        host = url->host;
    } else {
        // Bare host, possibly with a pasted path, query or port.
        if (auto cut = s.find_first_of("/?#"); cut != std::string_view::npos) s = s.substr(0, cut);
        if (auto colon = s.rfind(':'); colon != std::string_view::npos) s = s.substr(0, colon);
        host = to_lower(s);
    }
    while (!host.empty() && host.back() == '.') host.pop_back();
    if (!is_valid_host(host))
        throw InvalidHost("not a valid DNS host: \"" + std::string(raw) + "\"");
    return host;
}

// Public-suffix-plus-one under a small static suffix table. Unknown
// single-label suffixes fall back to the final label, which is the standard
// rule for TLDs the table does not list.
inline std::string registrable_domain(std::string_view host) {
    static constexpr std::array<std::string_view, 12> two_level = {
        "co.uk", "org.uk", "ac.uk", "gov.uk", "com.au", "net.au",
        "org.au", "co.jp", "co.nz", "com.br", "co.in", "com.cn",
    };
    auto labels = split(host, '.');
    if (labels.size() <= 1) return std::string(host);
    const std::string last_two = labels[labels.size() - 2] + "." + labels.back();
    for (auto suffix : two_level) {
        if (last_two == suffix) {
            if (labels.size() == 2) return last_two;
            return labels[labels.size() - 3] + "." + last_two;
        }
    }
    return last_two;
}

} // namespace gptwatch
