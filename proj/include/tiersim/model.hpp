#pragma once

// Domain types for a multi-tier open queueing network, plus the JSON scenario
// format that describes one.
//
// A scenario is a list of tiers, each holding named resources (CPUs, disks,
// network links). Workload classes generate requests that walk an ordered
// path of visits; each visit names a resource and the service demand the
// request places on it.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace tiersim {

struct exponential {
    double rate = 1.0;  // 1/seconds
    bool operator==(const exponential&) const = default;
};

struct deterministic {
    double value = 0.0;  // seconds
    bool operator==(const deterministic&) const = default;
};

struct uniform {
    double lo = 0.0;
    double hi = 0.0;
    bool operator==(const uniform&) const = default;
};

using distribution = std::variant<exponential, deterministic, uniform>;

double mean(const distribution& dist);

enum class discipline { fcfs };

enum class balancer_policy { jsq, round_robin, random };

const char* to_string(balancer_policy policy) noexcept;
std::optional<balancer_policy> balancer_policy_from_string(std::string_view s);

// queue_capacity counts waiting slots only; nullopt means unbounded. A
// resource with c replicas and capacity K holds at most c + K requests.
struct resource_spec {
    std::string name;
    std::int64_t replicas = 1;
    std::optional<std::int64_t> queue_capacity;
    discipline disc = discipline::fcfs;
    balancer_policy balancer = balancer_policy::jsq;

    bool operator==(const resource_spec&) const = default;
};

struct tier {
    std::string name;
    std::vector<resource_spec> resources;

    bool operator==(const tier&) const = default;
};

struct visit {
    std::string resource;
    distribution demand;

    bool operator==(const visit&) const = default;
};

struct workload_class {
    std::string name;
    distribution arrival;  // interarrival times
    std::vector<visit> path;
    std::optional<std::int64_t> max_requests;  // nullopt = unbounded

    bool operator==(const workload_class&) const = default;
};

struct stop_after_requests {
    std::int64_t count = 1;
    bool operator==(const stop_after_requests&) const = default;
};

struct stop_after_time {
    double seconds = 1.0;
    bool operator==(const stop_after_time&) const = default;
};

using stop_condition = std::variant<stop_after_requests, stop_after_time>;

struct run_config {
    std::uint64_t seed = 1;
    stop_condition stop = stop_after_requests{1000};
    double warmup = 0.0;
    bool series_enabled = false;

    bool operator==(const run_config&) const = default;
};

struct scenario_model {
    std::string name;
    std::vector<tier> tiers;
    std::vector<workload_class> classes;
    run_config run;

    bool operator==(const scenario_model&) const = default;

    // Resources in tier order. Valid only after validate() reports clean.
    std::vector<const resource_spec*> resources() const;
    const resource_spec* find_resource(std::string_view name) const;
};

struct validation_issue {
    std::string path;     // e.g. "tiers[1].resources[0]"
    std::string message;
};

using validation_report = std::vector<validation_issue>;

validation_report validate(const scenario_model& model);

// Throws tiersim::error with code syntax (malformed JSON; message carries
// line and column) or validation (schema or invariant violation).
scenario_model parse_scenario(std::string_view text);
std::string serialize(const scenario_model& model);

bool is_identifier(std::string_view s);

}  // namespace tiersim
