#pragma once

// Strict JSON readers shared by the scenario and deployment parsers. Every
// failure is a validation error naming the element path.

#include <cstdint>
#include <optional>
#include <set>
#include <string>

#include <nlohmann/json.hpp>

#include "tiersim/error.hpp"
#include "tiersim/model.hpp"

namespace tiersim::detail {

using ordered_json = nlohmann::ordered_json;

[[noreturn]] inline void schema_fail(const std::string& path, const std::string& msg) {
    throw error(error_code::validation, path + ": " + msg);
}

// Tracks which keys of an object were consumed so leftovers can be rejected.
class object_reader {
public:
    object_reader(const ordered_json& j, std::string path) : json_(j), path_(std::move(path)) {
        if (!json_.is_object()) schema_fail(path_, "expected an object");
    }

    const std::string& path() const { return path_; }
    std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    bool has(const std::string& key) const { return json_.contains(key); }

    const ordered_json& require(const std::string& key) {
        if (!json_.contains(key)) schema_fail(path_.empty() ? "<root>" : path_, "missing key '" + key + "'");
        seen_.insert(key);
        return json_.at(key);
    }

    const ordered_json* optional(const std::string& key) {
        if (!json_.contains(key)) return nullptr;
        seen_.insert(key);
        return &json_.at(key);
    }

    void finish() const {
        for (auto it = json_.begin(); it != json_.end(); ++it) {
            if (!seen_.count(it.key()))
                schema_fail(path_.empty() ? "<root>" : path_, "unknown key '" + it.key() + "'");
        }
    }

private:
    const ordered_json& json_;
    std::string path_;
    std::set<std::string> seen_;
};

inline std::string read_string(const ordered_json& j, const std::string& path) {
    if (!j.is_string()) schema_fail(path, "expected a string");
    return j.get<std::string>();
}

inline double read_number(const ordered_json& j, const std::string& path) {
    if (!j.is_number()) schema_fail(path, "expected a number");
    return j.get<double>();
}

inline std::int64_t read_integer(const ordered_json& j, const std::string& path) {
    if (j.is_number_unsigned()) {
        auto v = j.get<std::uint64_t>();
        if (v > static_cast<std::uint64_t>(INT64_MAX)) schema_fail(path, "integer out of range");
        return static_cast<std::int64_t>(v);
    }
    if (!j.is_number_integer()) schema_fail(path, "expected an integer");
    return j.get<std::int64_t>();
}

// Integer, or the given keyword string meaning "no bound".
inline std::optional<std::int64_t> read_bound(const ordered_json& j, const std::string& path,
                                              const char* keyword) {
    if (j.is_string()) {
        if (j.get<std::string>() != keyword)
            schema_fail(path, std::string("expected an integer or \"") + keyword + "\"");
        return std::nullopt;
    }
    return read_integer(j, path);
}

distribution read_distribution(const ordered_json& j, const std::string& path);
ordered_json write_distribution(const distribution& d);

// Resource entry: either a bare name or {name, replicas, queue_capacity, balancer}.
resource_spec read_resource(const ordered_json& j, const std::string& path);
ordered_json write_resource(const resource_spec& r);

}  // namespace tiersim::detail
