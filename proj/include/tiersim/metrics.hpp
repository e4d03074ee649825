#pragma once

// Statistics collected during a run and the finalized report.
//
// Resource averages are per visit; class averages are per session and cover
// completed sessions only. A session dropped mid-path still contributes the
// visits it finished to the resources it passed through.
//
// Time-based figures (utilization, idle probability, mean population) are
// integrated over [warmup, stop]. Visits that entered a resource before the
// warmup boundary are excluded from the averages.

#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "tiersim/model.hpp"

namespace tiersim {

struct resource_metrics {
    std::string name;
    std::int64_t replicas = 1;
    double avg_response = 0.0;
    double avg_service = 0.0;
    double avg_waiting = 0.0;
    double utilization = 0.0;     // mean busy-replica fraction
    double p_idle = 1.0;          // fraction of time with every replica idle
    double p_drop = 0.0;          // dropped / offered
    double mean_in_system = 0.0;  // time-average population (waiting + in service)
    double throughput = 0.0;      // served / elapsed
    std::uint64_t offered = 0;
    std::uint64_t served = 0;
    std::uint64_t dropped = 0;
};

struct class_metrics {
    std::string name;
    std::uint64_t generated = 0;
    std::uint64_t completed = 0;
    std::uint64_t dropped = 0;
    double mean_response = 0.0;
    double p50_response = 0.0;
    double p95_response = 0.0;
    double p99_response = 0.0;
};

struct series_point {
    static constexpr std::uint32_t end_to_end = std::numeric_limits<std::uint32_t>::max();

    std::uint32_t resource = end_to_end;  // index into metrics_report::resources
    double arrival_time = 0.0;
    double response_time = 0.0;
};

struct metrics_report {
    std::string scenario;
    std::uint64_t seed = 0;
    double warmup = 0.0;
    double stop_time = 0.0;
    double elapsed = 0.0;  // stop_time - warmup, never negative
    std::uint64_t generated = 0;
    std::uint64_t completed = 0;
    std::uint64_t dropped = 0;
    std::uint64_t in_flight = 0;
    std::vector<resource_metrics> resources;  // model order
    std::vector<class_metrics> classes;
    bool series_enabled = false;
    std::vector<series_point> series;  // sorted by arrival_time (stable)

    const resource_metrics* find(std::string_view name) const;
};

// Streaming mean (Welford).
class running_mean {
public:
    void add(double x) noexcept {
        ++n_;
        const double delta = x - mean_;
        mean_ += delta / static_cast<double>(n_);
        m2_ += delta * (x - mean_);
    }
    std::uint64_t count() const noexcept { return n_; }
    double mean() const noexcept { return mean_; }
    double variance() const noexcept { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }

private:
    std::uint64_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

class metrics_accumulator {
public:
    explicit metrics_accumulator(const scenario_model& model);

    // Resource hooks; `resource` indexes model.resources().
    void record_admission(std::size_t resource, double time);
    void record_visit(std::size_t resource, double enqueue, double start, double end);
    void record_drop(std::size_t resource, double time);
    void record_busy(std::size_t resource, double start, double end);      // one replica busy interval
    void record_any_busy(std::size_t resource, double start, double end);  // >= 1 replica busy
    void record_population(std::size_t resource, double time, std::int64_t population);

    // Session hooks; `cls` indexes model.classes.
    void record_generated(std::size_t cls, double time);
    void record_completion(std::size_t cls, double arrival, double end);
    void record_session_drop(std::size_t cls, double arrival);

    struct totals {
        std::uint64_t generated = 0;
        std::uint64_t completed = 0;
        std::uint64_t dropped = 0;
        std::uint64_t in_flight = 0;
    };

    // Caller must have closed open busy intervals at stop_time.
    metrics_report finalize(double stop_time, const totals& t) const;

private:
    struct resource_acc {
        std::string name;
        std::int64_t replicas = 1;
        running_mean response, service, waiting;
        std::uint64_t offered = 0, dropped = 0;
        double busy_time = 0.0;
        double any_busy_time = 0.0;
        double population_area = 0.0;
        double last_change = 0.0;
        std::int64_t population = 0;
    };
    struct class_acc {
        std::string name;
        std::uint64_t generated = 0, completed = 0, dropped = 0;
        running_mean response;
        std::vector<double> samples;
    };

    double clip(double t) const noexcept { return t < window_start_ ? window_start_ : t; }

    std::string scenario_;
    std::uint64_t seed_ = 0;
    double window_start_ = 0.0;
    bool series_enabled_ = false;
    std::vector<resource_acc> resources_;
    std::vector<class_acc> classes_;
    std::vector<series_point> series_;
};

// Stable JSON rendering: identical reports give identical bytes.
std::string to_json(const metrics_report& report);
metrics_report report_from_json(std::string_view text);

// Aligned text table with one row per resource.
std::string to_table(const metrics_report& report);

// CSV `resource,arrival_time,response_time` with `__end_to_end__` rows for
// sessions. Throws error(series_disabled) when the run did not collect series.
std::string export_series(const metrics_report& report);

inline constexpr std::string_view end_to_end_label = "__end_to_end__";

}  // namespace tiersim
