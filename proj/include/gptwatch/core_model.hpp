#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "gptwatch/util.hpp"

namespace gptwatch {

using json = nlohmann::ordered_json;

// Default production store; tests point this at a loopback fixture instead.
inline constexpr std::string_view kDefaultStoreBase = "https://chatgpt.com";

enum class GizmoIdError { InvalidLength, InvalidCharacter };

class InvalidGizmoId : public std::runtime_error {
public:
    InvalidGizmoId(GizmoIdError kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}
    GizmoIdError kind() const { return kind_; }

private:
    GizmoIdError kind_;
};

// The store's 9-character alphanumeric app identifier. This is the only
// identity key used anywhere downstream; app names are not unique.
class GizmoId {
public:
    static constexpr std::size_t kLength = 9;

    explicit GizmoId(std::string_view raw) : value_(raw) {
        if (value_.size() != kLength) {
            throw InvalidGizmoId(GizmoIdError::InvalidLength,
                                 "gizmo id must be exactly 9 characters, got " +
                                     std::to_string(value_.size()));
        }
        for (char c : value_) {
            if (!std::isalnum(static_cast<unsigned char>(c)) ||
                static_cast<unsigned char>(c) > 0x7f) {
                throw InvalidGizmoId(GizmoIdError::InvalidCharacter,
                                     std::string("gizmo id contains invalid character '") + c +
                                         "'");
            }
        }
    }

    const std::string& value() const { return value_; }

    auto operator<=>(const GizmoId&) const = default;

private:
    std::string value_;
};

inline GizmoId validate_gizmo_id(std::string_view raw) { return GizmoId(raw); }

// Access link for an app page: {base}/g/g-{id}, no trailing slash.
inline std::string build_access_url(const GizmoId& id,
                                    std::string_view base = kDefaultStoreBase) {
    std::string out(base);
    while (!out.empty() && out.back() == '/') out.pop_back();
    out += "/g/g-";
    out += id.value();
    return out;
}

struct KnowledgeFile {
    std::string name;
    std::uint64_t bytes = 0;

    bool operator==(const KnowledgeFile&) const = default;
};

struct ActionDescriptor {
    std::string domain;
    std::string privacy_policy;

    bool operator==(const ActionDescriptor&) const = default;
};

// One app's metadata record. name and instructions are mandatory; the five
// optional slots distinguish "never supplied" (nullopt) from present-but-empty.
struct GptMetadata {
    GizmoId gizmo_id;
    std::string name;
    std::string instructions;
    std::optional<std::string> description;
    std::optional<std::vector<std::string>> conversation;
    std::optional<std::vector<KnowledgeFile>> knowledge;
    std::optional<std::vector<std::string>> capabilities;
    std::optional<std::vector<ActionDescriptor>> actions;

    bool operator==(const GptMetadata&) const = default;
};

enum class GptClass { PromptBased, KnowledgeBased, ActionBased };

inline std::string_view to_string(GptClass c) {
    switch (c) {
    case GptClass::PromptBased: return "prompt_based";
    case GptClass::KnowledgeBased: return "knowledge_based";
    case GptClass::ActionBased: return "action_based";
    }
    return "?";
}

namespace detail {
// A supplied-but-empty list counts as absent: an empty upload supplies nothing.
template <class T>
bool slot_supplied(const std::optional<std::vector<T>>& slot) {
    return slot.has_value() && !slot->empty();
}
} // namespace detail

// Three-way classification. Actions presence dominates knowledge presence;
// the three labels partition the app universe.
inline GptClass classify(const GptMetadata& meta) {
    if (detail::slot_supplied(meta.actions)) return GptClass::ActionBased;
    if (detail::slot_supplied(meta.knowledge)) return GptClass::KnowledgeBased;
    return GptClass::PromptBased;
}

// --- JSON Lines metadata codec -------------------------------------------

class MetadataError : public std::runtime_error {
public:
    MetadataError(std::string field, const std::string& what)
        : std::runtime_error(what), field_(std::move(field)) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

inline json metadata_to_json(const GptMetadata& m) {
    json j;
    j["gizmo_id"] = m.gizmo_id.value();
    j["name"] = m.name;
    j["instructions"] = m.instructions;
    if (m.description) j["description"] = *m.description;
    if (m.conversation) j["conversation"] = *m.conversation;
    if (m.knowledge) {
        json files = json::array();
        for (const auto& f : *m.knowledge) files.push_back({{"name", f.name}, {"bytes", f.bytes}});
        j["knowledge"] = std::move(files);
    }
    if (m.capabilities) j["capabilities"] = *m.capabilities;
    if (m.actions) {
        json acts = json::array();
        for (const auto& a : *m.actions)
            acts.push_back({{"domain", a.domain}, {"privacy_policy", a.privacy_policy}});
        j["actions"] = std::move(acts);
    }
    return j;
}

namespace detail {

inline const json& require_field(const json& j, const char* name) {
    auto it = j.find(name);
    if (it == j.end())
        throw MetadataError(name, std::string("missing mandatory field \"") + name + "\"");
    return *it;
}

inline std::string require_nonempty_string(const json& j, const char* name) {
    const json& v = require_field(j, name);
    if (!v.is_string() || v.get<std::string>().empty())
        throw MetadataError(name, std::string("field \"") + name + "\" must be a non-empty string");
    return v.get<std::string>();
}

inline std::vector<std::string> string_list(const json& v, const char* name) {
    if (!v.is_array())
        throw MetadataError(name, std::string("field \"") + name + "\" must be an array");
    std::vector<std::string> out;
    for (const auto& item : v) {
        if (!item.is_string())
            throw MetadataError(name, std::string("entries of \"") + name + "\" must be strings");
        out.push_back(item.get<std::string>());
    }
    return out;
}

} // namespace detail

inline GptMetadata metadata_from_json(const json& j) {
    if (!j.is_object()) throw MetadataError("", "metadata record must be a JSON object");
    GizmoId id = [&] {
        const std::string raw = detail::require_nonempty_string(j, "gizmo_id");
        try {
            return validate_gizmo_id(raw);
        } catch (const InvalidGizmoId& e) {
            throw MetadataError("gizmo_id", e.what());
        }
    }();

    GptMetadata m{.gizmo_id = std::move(id),
                  .name = detail::require_nonempty_string(j, "name"),
                  .instructions = detail::require_nonempty_string(j, "instructions")};

    if (auto it = j.find("description"); it != j.end()) {
        if (!it->is_string())
            throw MetadataError("description", "field \"description\" must be a string");
        m.description = it->get<std::string>();
    }
    if (auto it = j.find("conversation"); it != j.end())
        m.conversation = detail::string_list(*it, "conversation");
    if (auto it = j.find("knowledge"); it != j.end()) {
        if (!it->is_array())
            throw MetadataError("knowledge", "field \"knowledge\" must be an array");
        std::vector<KnowledgeFile> files;
        for (const auto& f : *it) {
            if (!f.is_object() || !f.contains("name") || !f["name"].is_string() ||
                !f.contains("bytes") || !f["bytes"].is_number_integer() ||
                f["bytes"].get<std::int64_t>() < 0) {
                throw MetadataError(
                    "knowledge", "knowledge entries must be {\"name\": text, \"bytes\": int >= 0}");
            }
            files.push_back({f["name"].get<std::string>(), f["bytes"].get<std::uint64_t>()});
        }
        m.knowledge = std::move(files);
    }
    if (auto it = j.find("capabilities"); it != j.end())
        m.capabilities = detail::string_list(*it, "capabilities");
    if (auto it = j.find("actions"); it != j.end()) {
        if (!it->is_array()) throw MetadataError("actions", "field \"actions\" must be an array");
        std::vector<ActionDescriptor> acts;
        for (const auto& a : *it) {
            if (!a.is_object() || !a.contains("domain") || !a["domain"].is_string() ||
                a["domain"].get<std::string>().empty() || !a.contains("privacy_policy") ||
                !a["privacy_policy"].is_string()) {
                throw MetadataError("actions",
                                    "action entries must be {\"domain\": text, "
                                    "\"privacy_policy\": text} with a non-empty domain");
            }
            acts.push_back({a["domain"].get<std::string>(), a["privacy_policy"].get<std::string>()});
        }
        m.actions = std::move(acts);
    }
    return m;
}

struct IngestError {
    enum class Kind { Parse, Validation };
    Kind kind;
    std::size_t line = 0; // 1-based
    std::string field;    // empty for parse failures
    std::string message;
};

struct IngestResult {
    std::vector<GptMetadata> apps;
    std::vector<IngestError> errors;
};

// Parses one metadata record per line; malformed or invalid lines are
// collected with their line numbers instead of aborting the run. Duplicate
// gizmo ids are rejected: the id is the only identity key.
inline IngestResult ingest_metadata(std::istream& in) {
    IngestResult result;
    std::set<std::string> seen_ids;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            result.errors.push_back(
                {IngestError::Kind::Parse, line_no, "", std::string("invalid JSON: ") + e.what()});
            continue;
        }
        try {
            GptMetadata m = metadata_from_json(j);
            if (!seen_ids.insert(m.gizmo_id.value()).second) {
                result.errors.push_back({IngestError::Kind::Validation, line_no, "gizmo_id",
                                         "duplicate gizmo_id \"" + m.gizmo_id.value() + "\""});
                continue;
            }
            result.apps.push_back(std::move(m));
        } catch (const MetadataError& e) {
            result.errors.push_back(
                {IngestError::Kind::Validation, line_no, e.field(), e.what()});
        }
    }
    return result;
}

inline IngestResult ingest_metadata_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot open " + path.string() + " for reading");
    return ingest_metadata(in);
}

} // namespace gptwatch
