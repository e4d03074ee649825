#include "tiersim/model.hpp"

#include <cmath>
#include <map>
#include <set>

#include "json_schema.hpp"

namespace tiersim {

const char* to_string(error_code code) noexcept {
    switch (code) {
        case error_code::syntax: return "SYNTAX_ERROR";
        case error_code::validation: return "VALIDATION_ERROR";
        case error_code::domain: return "DOMAIN_ERROR";
        case error_code::io: return "IO_ERROR";
        case error_code::series_disabled: return "SERIES_DISABLED";
        case error_code::internal: return "INTERNAL_ERROR";
    }
    return "UNKNOWN_ERROR";
}

double mean(const distribution& dist) {
    return std::visit(
        [](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, exponential>) return 1.0 / d.rate;
            else if constexpr (std::is_same_v<T, deterministic>) return d.value;
            else return 0.5 * (d.lo + d.hi);
        },
        dist);
}

const char* to_string(balancer_policy policy) noexcept {
    switch (policy) {
        case balancer_policy::jsq: return "jsq";
        case balancer_policy::round_robin: return "round_robin";
        case balancer_policy::random: return "random";
    }
    return "jsq";
}

std::optional<balancer_policy> balancer_policy_from_string(std::string_view s) {
    if (s == "jsq") return balancer_policy::jsq;
    if (s == "round_robin") return balancer_policy::round_robin;
    if (s == "random") return balancer_policy::random;
    return std::nullopt;
}

bool is_identifier(std::string_view s) {
    if (s.empty()) return false;
    for (char ch : s) {
        const bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') ||
                        (ch >= '0' && ch <= '9') || ch == '_' || ch == '-' || ch == '.';
        if (!ok) return false;
    }
    return true;
}

std::vector<const resource_spec*> scenario_model::resources() const {
    std::vector<const resource_spec*> out;
    for (const auto& t : tiers)
        for (const auto& r : t.resources) out.push_back(&r);
    return out;
}

const resource_spec* scenario_model::find_resource(std::string_view name) const {
    for (const auto& t : tiers)
        for (const auto& r : t.resources)
            if (r.name == name) return &r;
    return nullptr;
}

// --- validation -------------------------------------------------------------

namespace {

void check_distribution(const distribution& dist, const std::string& path, validation_report& out) {
    std::visit(
        [&](const auto& d) {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, exponential>) {
                if (!(d.rate > 0.0) || !std::isfinite(d.rate))
                    out.push_back({path, "exponential rate must be positive and finite"});
            } else if constexpr (std::is_same_v<T, deterministic>) {
                if (!(d.value >= 0.0) || !std::isfinite(d.value))
                    out.push_back({path, "deterministic value must be non-negative and finite"});
            } else {
                if (!(d.lo >= 0.0) || !(d.lo <= d.hi) || !std::isfinite(d.hi))
                    out.push_back({path, "uniform bounds must satisfy 0 <= lo <= hi"});
            }
        },
        dist);
}

}  // namespace

validation_report validate(const scenario_model& model) {
    validation_report out;
    if (!is_identifier(model.name)) out.push_back({"name", "invalid identifier '" + model.name + "'"});

    if (model.tiers.empty()) out.push_back({"tiers", "at least one tier is required"});

    std::set<std::string> tier_names;
    std::set<std::string> resource_names;
    for (std::size_t ti = 0; ti < model.tiers.size(); ++ti) {
        const auto& t = model.tiers[ti];
        const std::string tpath = "tiers[" + std::to_string(ti) + "]";
        if (!is_identifier(t.name)) out.push_back({tpath, "invalid identifier '" + t.name + "'"});
        else if (!tier_names.insert(t.name).second)
            out.push_back({tpath, "duplicate tier name '" + t.name + "'"});
        if (t.resources.empty()) out.push_back({tpath, "tier '" + t.name + "' has no resources"});

        for (std::size_t ri = 0; ri < t.resources.size(); ++ri) {
            const auto& r = t.resources[ri];
            const std::string rpath = tpath + ".resources[" + std::to_string(ri) + "]";
            if (!is_identifier(r.name)) out.push_back({rpath, "invalid identifier '" + r.name + "'"});
            else if (!resource_names.insert(r.name).second)
                out.push_back({rpath, "duplicate resource name '" + r.name + "'"});
            if (r.replicas < 1)
                out.push_back({rpath, "resource '" + r.name + "' must have at least one replica"});
            if (r.queue_capacity && *r.queue_capacity < 0)
                out.push_back({rpath, "resource '" + r.name + "' has negative queue_capacity"});
        }
    }

    if (model.classes.empty()) out.push_back({"classes", "at least one workload class is required"});

    std::set<std::string> class_names;
    for (std::size_t ci = 0; ci < model.classes.size(); ++ci) {
        const auto& c = model.classes[ci];
        const std::string cpath = "classes[" + std::to_string(ci) + "]";
        if (!is_identifier(c.name)) out.push_back({cpath, "invalid identifier '" + c.name + "'"});
        else if (!class_names.insert(c.name).second)
            out.push_back({cpath, "duplicate class name '" + c.name + "'"});
        check_distribution(c.arrival, cpath + ".arrival", out);
        if (c.max_requests && *c.max_requests < 1)
            out.push_back({cpath, "max_requests must be positive"});
        if (c.path.empty()) out.push_back({cpath, "class '" + c.name + "' has an empty path"});
        for (std::size_t vi = 0; vi < c.path.size(); ++vi) {
            const auto& v = c.path[vi];
            const std::string vpath = cpath + ".path[" + std::to_string(vi) + "]";
            if (!model.find_resource(v.resource))
                out.push_back({vpath, "unknown resource '" + v.resource + "'"});
            check_distribution(v.demand, vpath + ".demand", out);
        }
    }

    if (const auto* n = std::get_if<stop_after_requests>(&model.run.stop)) {
        if (n->count < 1) out.push_back({"run.stop", "request count must be at least 1"});
    } else {
        const double t = std::get<stop_after_time>(model.run.stop).seconds;
        if (!(t > 0.0) || !std::isfinite(t)) out.push_back({"run.stop", "stop time must be positive and finite"});
    }
    if (!(model.run.warmup >= 0.0) || !std::isfinite(model.run.warmup))
        out.push_back({"run.warmup", "warmup must be non-negative and finite"});

    return out;
}

// --- JSON -------------------------------------------------------------------

namespace detail {

distribution read_distribution(const ordered_json& j, const std::string& path) {
    object_reader obj(j, path);
    const std::string kind = read_string(obj.require("kind"), obj.child("kind"));
    distribution out;
    if (kind == "exponential") {
        out = exponential{read_number(obj.require("rate"), obj.child("rate"))};
    } else if (kind == "deterministic") {
        out = deterministic{read_number(obj.require("value"), obj.child("value"))};
    } else if (kind == "uniform") {
        const double lo = read_number(obj.require("lo"), obj.child("lo"));
        const double hi = read_number(obj.require("hi"), obj.child("hi"));
        out = uniform{lo, hi};
    } else {
        schema_fail(obj.child("kind"), "unknown distribution kind '" + kind + "'");
    }
    obj.finish();
    return out;
}

ordered_json write_distribution(const distribution& d) {
    ordered_json j;
    std::visit(
        [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, exponential>) {
                j["kind"] = "exponential";
                j["rate"] = v.rate;
            } else if constexpr (std::is_same_v<T, deterministic>) {
                j["kind"] = "deterministic";
                j["value"] = v.value;
            } else {
                j["kind"] = "uniform";
                j["lo"] = v.lo;
                j["hi"] = v.hi;
            }
        },
        d);
    return j;
}

resource_spec read_resource(const ordered_json& j, const std::string& path) {
    resource_spec r;
    if (j.is_string()) {
        r.name = j.get<std::string>();
        return r;
    }
    object_reader obj(j, path);
    r.name = read_string(obj.require("name"), obj.child("name"));
    if (const auto* v = obj.optional("replicas")) r.replicas = read_integer(*v, obj.child("replicas"));
    if (const auto* v = obj.optional("queue_capacity"))
        r.queue_capacity = read_bound(*v, obj.child("queue_capacity"), "inf");
    if (const auto* v = obj.optional("discipline")) {
        if (read_string(*v, obj.child("discipline")) != "fcfs")
            schema_fail(obj.child("discipline"), "only \"fcfs\" is supported");
    }
    if (const auto* v = obj.optional("balancer")) {
        const auto s = read_string(*v, obj.child("balancer"));
        const auto policy = balancer_policy_from_string(s);
        if (!policy) schema_fail(obj.child("balancer"), "unknown balancer policy '" + s + "'");
        r.balancer = *policy;
    }
    obj.finish();
    return r;
}

ordered_json write_resource(const resource_spec& r) {
    ordered_json j;
    j["name"] = r.name;
    j["replicas"] = r.replicas;
    if (r.queue_capacity) j["queue_capacity"] = *r.queue_capacity;
    else j["queue_capacity"] = "inf";
    j["balancer"] = to_string(r.balancer);
    return j;
}

}  // namespace detail

namespace {

using detail::object_reader;
using detail::ordered_json;
using detail::read_integer;
using detail::read_number;
using detail::read_string;
using detail::schema_fail;

// nlohmann reports a 1-based count of bytes consumed up to the error.
std::pair<std::size_t, std::size_t> line_and_column(std::string_view text, std::size_t byte) {
    const std::size_t pos = std::min(byte > 0 ? byte - 1 : 0, text.size());
    std::size_t line = 1, line_start = 0;
    for (std::size_t i = 0; i < pos; ++i) {
        if (text[i] == '\n') {
            ++line;
            line_start = i + 1;
        }
    }
    return {line, pos - line_start + 1};
}

const ordered_json& require_array(object_reader& obj, const std::string& key) {
    const auto& j = obj.require(key);
    if (!j.is_array()) schema_fail(obj.child(key), "expected an array");
    return j;
}

run_config read_run(const ordered_json& j, const std::string& path) {
    object_reader obj(j, path);
    run_config run;
    if (const auto* v = obj.optional("seed")) {
        if (!v->is_number_unsigned()) schema_fail(obj.child("seed"), "expected a non-negative integer");
        run.seed = v->get<std::uint64_t>();
    }
    if (const auto* v = obj.optional("stop")) {
        object_reader stop(*v, obj.child("stop"));
        const bool by_requests = stop.has("requests");
        const bool by_time = stop.has("time");
        if (by_requests == by_time) schema_fail(stop.path(), "expected exactly one of 'requests' or 'time'");
        if (by_requests) run.stop = stop_after_requests{read_integer(stop.require("requests"), stop.child("requests"))};
        else run.stop = stop_after_time{read_number(stop.require("time"), stop.child("time"))};
        stop.finish();
    }
    if (const auto* v = obj.optional("warmup")) run.warmup = read_number(*v, obj.child("warmup"));
    if (const auto* v = obj.optional("series")) {
        if (!v->is_boolean()) schema_fail(obj.child("series"), "expected a boolean");
        run.series_enabled = v->get<bool>();
    }
    obj.finish();
    return run;
}

}  // namespace

scenario_model parse_scenario(std::string_view text) {
    ordered_json root;
    try {
        root = ordered_json::parse(text.begin(), text.end());
    } catch (const nlohmann::json::parse_error& e) {
        const auto [line, col] = line_and_column(text, e.byte);
        throw error(error_code::syntax, "line " + std::to_string(line) + ", column " + std::to_string(col) +
                                            ": malformed JSON (" + e.what() + ")");
    }

    scenario_model m;
    object_reader top(root, "");
    if (const auto* v = top.optional("format_version")) {
        if (read_integer(*v, "format_version") != 1) schema_fail("format_version", "unsupported version");
    }
    m.name = read_string(top.require("name"), "name");

    const auto& tiers = require_array(top, "tiers");
    for (std::size_t ti = 0; ti < tiers.size(); ++ti) {
        const std::string tpath = "tiers[" + std::to_string(ti) + "]";
        object_reader tobj(tiers[ti], tpath);
        tier t;
        t.name = read_string(tobj.require("name"), tobj.child("name"));
        const auto& res = require_array(tobj, "resources");
        for (std::size_t ri = 0; ri < res.size(); ++ri)
            t.resources.push_back(detail::read_resource(res[ri], tpath + ".resources[" + std::to_string(ri) + "]"));
        tobj.finish();
        m.tiers.push_back(std::move(t));
    }

    const auto& classes = require_array(top, "classes");
    for (std::size_t ci = 0; ci < classes.size(); ++ci) {
        const std::string cpath = "classes[" + std::to_string(ci) + "]";
        object_reader cobj(classes[ci], cpath);
        workload_class c;
        c.name = read_string(cobj.require("name"), cobj.child("name"));
        c.arrival = detail::read_distribution(cobj.require("arrival"), cobj.child("arrival"));
        const auto& path = require_array(cobj, "path");
        for (std::size_t vi = 0; vi < path.size(); ++vi) {
            const std::string vpath = cpath + ".path[" + std::to_string(vi) + "]";
            object_reader vobj(path[vi], vpath);
            visit v;
            v.resource = read_string(vobj.require("resource"), vobj.child("resource"));
            v.demand = detail::read_distribution(vobj.require("demand"), vobj.child("demand"));
            vobj.finish();
            c.path.push_back(std::move(v));
        }
        if (const auto* v = cobj.optional("max_requests"))
            c.max_requests = detail::read_bound(*v, cobj.child("max_requests"), "unbounded");
        cobj.finish();
        m.classes.push_back(std::move(c));
    }

    if (const auto* v = top.optional("run")) m.run = read_run(*v, "run");
    top.finish();

    const auto report = validate(m);
    if (!report.empty()) {
        std::string msg;
        for (const auto& issue : report) {
            if (!msg.empty()) msg += "; ";
            msg += issue.path + ": " + issue.message;
        }
        throw error(error_code::validation, msg);
    }
    return m;
}

std::string serialize(const scenario_model& model) {
    ordered_json root;
    root["format_version"] = 1;
    root["name"] = model.name;
    root["tiers"] = ordered_json::array();
    for (const auto& t : model.tiers) {
        ordered_json tj;
        tj["name"] = t.name;
        tj["resources"] = ordered_json::array();
        for (const auto& r : t.resources) tj["resources"].push_back(detail::write_resource(r));
        root["tiers"].push_back(std::move(tj));
    }
    root["classes"] = ordered_json::array();
    for (const auto& c : model.classes) {
        ordered_json cj;
        cj["name"] = c.name;
        cj["arrival"] = detail::write_distribution(c.arrival);
        cj["path"] = ordered_json::array();
        for (const auto& v : c.path) {
            ordered_json vj;
            vj["resource"] = v.resource;
            vj["demand"] = detail::write_distribution(v.demand);
            cj["path"].push_back(std::move(vj));
        }
        if (c.max_requests) cj["max_requests"] = *c.max_requests;
        else cj["max_requests"] = "unbounded";
        root["classes"].push_back(std::move(cj));
    }
    ordered_json run;
    run["seed"] = model.run.seed;
    if (const auto* n = std::get_if<stop_after_requests>(&model.run.stop)) run["stop"]["requests"] = n->count;
    else run["stop"]["time"] = std::get<stop_after_time>(model.run.stop).seconds;
    run["warmup"] = model.run.warmup;
    run["series"] = model.run.series_enabled;
    root["run"] = std::move(run);
    return root.dump(2) + "\n";
}

}  // namespace tiersim
