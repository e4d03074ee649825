#pragma once

// Discrete-event simulation core.
//
// Requests of each workload class arrive as an open stream, walk their path
// of visits in order and either complete or are dropped. A drop terminates
// the whole session: later visits never see it, and it is attributed to the
// resource that rejected it. Service is non-preemptive FCFS per replica.
//
// Events are applied in (time, seq) order, where seq is the scheduling order.
// A run is strictly single-threaded; independent simulators may run on
// different threads.

#include <cstdint>
#include <deque>
#include <optional>
#include <queue>
#include <span>
#include <vector>

#include "tiersim/balancer.hpp"
#include "tiersim/metrics.hpp"
#include "tiersim/model.hpp"
#include "tiersim/workload.hpp"

namespace tiersim {

enum class event_kind : std::uint8_t { arrival, service_complete };

struct applied_event {
    double time = 0.0;
    std::uint64_t seq = 0;
    event_kind kind = event_kind::arrival;
    std::size_t cls = 0;       // arrival
    std::size_t resource = 0;  // service_complete
    std::size_t replica = 0;   // service_complete
    std::uint64_t request = 0;
};

enum class request_outcome : std::uint8_t { in_flight, completed, dropped };

struct visit_times {
    std::size_t resource = 0;
    double enqueue_time = 0.0;
    double service_start = 0.0;
    double service_end = 0.0;
};

struct request_record {
    std::uint64_t id = 0;
    std::size_t cls = 0;
    std::size_t visit_index = 0;
    double arrival_time = 0.0;
    std::vector<visit_times> visits;  // only visits that were admitted
    request_outcome outcome = request_outcome::in_flight;
    std::optional<std::size_t> dropped_at;
};

struct replica_state {
    bool busy = false;
    double busy_since = 0.0;
    double busy_time = 0.0;  // closed busy periods, whole run
    std::deque<std::size_t> queue;  // request slots waiting for this replica
};

struct resource_state {
    std::vector<replica_state> replicas;
    std::vector<std::int64_t> capacities;
    balancer_state balancer;
    std::int64_t busy_count = 0;
    double any_busy_since = 0.0;
    std::uint64_t offered = 0;
    std::uint64_t started = 0;
    std::uint64_t completed = 0;
    std::uint64_t dropped = 0;

    std::size_t queued() const noexcept;
    std::int64_t population() const noexcept;
};

struct simulator_options {
    bool keep_records = false;  // retain a request_record per terminated session
};

class simulator {
public:
    using options = simulator_options;

    // Throws error(validation) if the model does not validate.
    explicit simulator(scenario_model model, options opts = {});
    simulator(const simulator&) = delete;
    simulator& operator=(const simulator&) = delete;

    // Applies the next event. Returns nullopt once the stop condition has been
    // reached or no events remain.
    std::optional<applied_event> step();
    bool finished() const noexcept { return finished_; }

    // Steps to completion, then finalizes.
    metrics_report run();
    metrics_report finalize() const;

    const scenario_model& model() const noexcept { return model_; }
    double now() const noexcept { return now_; }
    double stop_time() const noexcept { return finished_ ? stop_time_ : now_; }
    std::uint64_t events_applied() const noexcept { return events_applied_; }
    std::size_t pending_events() const noexcept { return events_.size(); }

    std::uint64_t generated() const noexcept { return generated_; }
    std::uint64_t completed() const noexcept { return completed_; }
    std::uint64_t dropped() const noexcept { return dropped_; }
    std::uint64_t in_flight() const noexcept { return generated_ - completed_ - dropped_; }

    std::size_t resource_index(std::string_view name) const;
    const resource_state& resource(std::size_t index) const { return resources_.at(index); }
    std::span<const request_record> records() const noexcept { return records_; }

private:
    struct event {
        double time;
        std::uint64_t seq;
        event_kind kind;
        std::uint32_t target;   // class or resource index
        std::uint32_t replica;
        std::size_t slot;

        bool operator>(const event& o) const noexcept {
            return time != o.time ? time > o.time : seq > o.seq;
        }
    };

    void schedule(double time, event_kind kind, std::size_t target, std::size_t replica, std::size_t slot);
    void on_arrival(std::size_t cls);
    void on_service_complete(std::size_t resource, std::size_t replica, std::size_t slot);
    void enter(std::size_t slot);
    void start_service(std::size_t resource, std::size_t replica, std::size_t slot);
    void terminate(std::size_t slot, request_outcome outcome);
    std::size_t allocate_slot();

    scenario_model model_;
    options opts_;
    std::vector<std::vector<std::size_t>> path_resources_;  // [class][visit] -> resource index
    std::vector<const resource_spec*> specs_;
    std::vector<resource_state> resources_;
    std::vector<stream> arrival_streams_;
    std::vector<stream> demand_streams_;
    std::vector<std::uint64_t> class_generated_;
    std::vector<replica_load> loads_scratch_;

    std::priority_queue<event, std::vector<event>, std::greater<>> events_;
    std::uint64_t next_seq_ = 0;
    double now_ = 0.0;
    bool finished_ = false;
    double stop_time_ = 0.0;
    std::uint64_t events_applied_ = 0;

    std::vector<request_record> slots_;
    std::vector<std::size_t> free_slots_;
    std::vector<request_record> records_;
    std::uint64_t next_request_id_ = 0;

    std::uint64_t generated_ = 0;
    std::uint64_t completed_ = 0;
    std::uint64_t dropped_ = 0;

    metrics_accumulator metrics_;
};

// Convenience: build a simulator, run it, return the report.
metrics_report run(const scenario_model& model);

}  // namespace tiersim
