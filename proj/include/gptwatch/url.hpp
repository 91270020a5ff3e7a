#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gptwatch/util.hpp"

namespace gptwatch {

// Minimal absolute-URL representation: enough for link auditing (scheme,
// host, port, path, query) plus RFC 3986 reference resolution for redirects.
struct Url {
    std::string scheme;   // lowercased
    std::string host;     // lowercased; IPv6 literals keep their brackets
    std::optional<std::uint16_t> port;
    std::string path;     // as given, "" or starting with '/'
    std::string query;    // without '?'
    std::string fragment; // without '#'

    static std::optional<Url> parse(std::string_view raw);

    std::uint16_t effective_port() const {
        if (port) return *port;
        return scheme == "https" ? 443 : 80;
    }

    std::string origin() const {
        std::string out = scheme + "://" + host;
        if (port) out += ":" + std::to_string(*port);
        return out;
    }

    // Path + query as sent on the request line; empty path becomes "/".
    std::string request_target() const {
        std::string out = path.empty() ? "/" : path;
        if (!query.empty()) out += "?" + query;
        return out;
    }

    std::string to_string() const {
        std::string out = origin() + path;
        if (!query.empty()) out += "?" + query;
        if (!fragment.empty()) out += "#" + fragment;
        return out;
    }

    bool operator==(const Url&) const = default;
};

namespace detail {

inline bool valid_scheme(std::string_view s) {
    if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) return false;
    for (char c : s) {
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '+' && c != '-' && c != '.')
            return false;
    }
    return true;
}

// Splits authority into host[:port], dropping any userinfo.
inline bool parse_authority(std::string_view auth, Url& out) {
    if (auto at = auth.rfind('@'); at != std::string_view::npos) auth.remove_prefix(at + 1);
    if (auth.empty()) return false;
    std::string_view host_part = auth;
    std::string_view port_part;
    if (auth.front() == '[') {
        auto close = auth.find(']');
        if (close == std::string_view::npos) return false;
        host_part = auth.substr(0, close + 1);
        auto rest = auth.substr(close + 1);
        if (!rest.empty()) {
            if (rest.front() != ':') return false;
            port_part = rest.substr(1);
        }
    } else if (auto colon = auth.rfind(':'); colon != std::string_view::npos) {
        host_part = auth.substr(0, colon);
        port_part = auth.substr(colon + 1);
    }
    if (host_part.empty()) return false;
    if (!port_part.empty()) {
        std::uint32_t value = 0;
        for (char c : port_part) {
            if (!std::isdigit(static_cast<unsigned char>(c))) return false;
            value = value * 10 + static_cast<std::uint32_t>(c - '0');
            if (value > 65535) return false;
        }
        out.port = static_cast<std::uint16_t>(value);
    }
    out.host = to_lower(host_part);
    return true;
}

// RFC 3986 §5.2.4.
inline std::string remove_dot_segments(std::string_view path) {
    std::vector<std::string> stack;
    bool absolute = !path.empty() && path.front() == '/';
    bool trailing_slash = false;
    std::size_t i = 0;
    while (i < path.size()) {
        while (i < path.size() && path[i] == '/') ++i;
        std::size_t start = i;
        while (i < path.size() && path[i] != '/') ++i;
        std::string_view seg = path.substr(start, i - start);
        if (seg == ".") {
            trailing_slash = true;
        } else if (seg == "..") {
            if (!stack.empty()) stack.pop_back();
            trailing_slash = true;
        } else if (!seg.empty()) {
            stack.emplace_back(seg);
            trailing_slash = false;
        }
    }
    if (!path.empty() && path.back() == '/') trailing_slash = true;
    std::string out;
    for (const auto& seg : stack) {
        out += '/';
        out += seg;
    }
    if (out.empty()) return absolute ? "/" : "";
    if (trailing_slash) out += '/';
    return out;
}

} // namespace detail

inline std::optional<Url> Url::parse(std::string_view raw) {
    raw = trim(raw);
    auto scheme_end = raw.find("://");
    if (scheme_end == std::string_view::npos || scheme_end == 0) return std::nullopt;
    Url url;
    std::string_view scheme = raw.substr(0, scheme_end);
    if (!detail::valid_scheme(scheme)) return std::nullopt;
    url.scheme = to_lower(scheme);
    std::string_view rest = raw.substr(scheme_end + 3);

    auto auth_end = rest.find_first_of("/?#");
    std::string_view authority = rest.substr(0, auth_end);
    if (!detail::parse_authority(authority, url)) return std::nullopt;
    if (auth_end == std::string_view::npos) return url;
    rest = rest.substr(auth_end);

    if (auto frag = rest.find('#'); frag != std::string_view::npos) {
        url.fragment = std::string(rest.substr(frag + 1));
        rest = rest.substr(0, frag);
    }
    if (auto q = rest.find('?'); q != std::string_view::npos) {
        url.query = std::string(rest.substr(q + 1));
        rest = rest.substr(0, q);
    }
    url.path = std::string(rest);
    return url;
}

// Resolves a redirect target against the URL it was served from.
inline std::optional<Url> resolve_reference(const Url& base, std::string_view ref) {
    ref = trim(ref);
    if (ref.empty()) return base;
    if (auto abs = Url::parse(ref)) return abs;

    Url out = base;
    out.fragment.clear();
    if (ref.rfind("//", 0) == 0) {
        // Network-path reference: keep the scheme only.
        auto with_scheme = std::string(base.scheme) + ":" + std::string(ref);
        return Url::parse(with_scheme);
    }
    if (auto frag = ref.find('#'); frag != std::string_view::npos) {
        out.fragment = std::string(ref.substr(frag + 1));
        ref = ref.substr(0, frag);
    }
    if (ref.empty()) return out;
    if (ref.front() == '?') {
        out.query = std::string(ref.substr(1));
        return out;
    }
    std::string_view query;
    if (auto q = ref.find('?'); q != std::string_view::npos) {
        query = ref.substr(q + 1);
        ref = ref.substr(0, q);
    }
    out.query = std::string(query);
    if (!ref.empty() && ref.front() == '/') {
        out.path = detail::remove_dot_segments(ref);
    } else {
        // Merge with the base path, dropping its last segment.
        std::string merged;
        if (auto slash = base.path.rfind('/'); slash != std::string::npos)
            merged = base.path.substr(0, slash + 1);
        else
            merged = "/";
        merged += ref;
        out.path = detail::remove_dot_segments(merged);
    }
    return out;
}

} // namespace gptwatch
