#include "tiersim/engine.hpp"

#include <cmath>

#include "tiersim/error.hpp"

namespace tiersim {

std::size_t resource_state::queued() const noexcept {
    std::size_t n = 0;
    for (const auto& r : replicas) n += r.queue.size();
    return n;
}

std::int64_t resource_state::population() const noexcept {
    return busy_count + static_cast<std::int64_t>(queued());
}

simulator::simulator(scenario_model model, options opts)
    : model_(std::move(model)), opts_(opts), metrics_(model_) {
    const auto report = validate(model_);
    if (!report.empty())
        throw error(error_code::validation, report.front().path + ": " + report.front().message);

    specs_ = model_.resources();
    for (const auto* spec : specs_) {
        resource_state rs;
        rs.replicas.resize(static_cast<std::size_t>(spec->replicas));
        rs.capacities = replica_capacities(spec->replicas, spec->queue_capacity);
        resources_.push_back(std::move(rs));
        demand_streams_.emplace_back(model_.run.seed, "resource/" + spec->name);
    }
    for (const auto& c : model_.classes) {
        std::vector<std::size_t> path;
        for (const auto& v : c.path) path.push_back(resource_index(v.resource));
        path_resources_.push_back(std::move(path));
        arrival_streams_.emplace_back(model_.run.seed, "class/" + c.name);
    }
    class_generated_.assign(model_.classes.size(), 0);

    for (std::size_t c = 0; c < model_.classes.size(); ++c)
        schedule(sample(model_.classes[c].arrival, arrival_streams_[c]), event_kind::arrival, c, 0, 0);
}

std::size_t simulator::resource_index(std::string_view name) const {
    for (std::size_t i = 0; i < specs_.size(); ++i)
        if (specs_[i]->name == name) return i;
    throw error(error_code::validation, "unknown resource '" + std::string(name) + "'");
}

void simulator::schedule(double time, event_kind kind, std::size_t target, std::size_t replica, std::size_t slot) {
    if (!std::isfinite(time)) throw error(error_code::internal, "simulation clock overflow");
    events_.push(event{time, next_seq_++, kind, static_cast<std::uint32_t>(target),
                       static_cast<std::uint32_t>(replica), slot});
}

std::optional<applied_event> simulator::step() {
    if (finished_) return std::nullopt;
    const auto* time_stop = std::get_if<stop_after_time>(&model_.run.stop);

    if (events_.empty() || (time_stop && events_.top().time > time_stop->seconds)) {
        finished_ = true;
        stop_time_ = time_stop ? time_stop->seconds : now_;
        return std::nullopt;
    }

    const event ev = events_.top();
    events_.pop();
    now_ = ev.time;
    ++events_applied_;

    applied_event out;
    out.time = ev.time;
    out.seq = ev.seq;
    out.kind = ev.kind;
    if (ev.kind == event_kind::arrival) {
        out.cls = ev.target;
        out.request = next_request_id_;
        on_arrival(ev.target);
    } else {
        out.resource = ev.target;
        out.replica = ev.replica;
        out.request = slots_[ev.slot].id;
        on_service_complete(ev.target, ev.replica, ev.slot);
    }

    if (const auto* n = std::get_if<stop_after_requests>(&model_.run.stop)) {
        if (completed_ + dropped_ >= static_cast<std::uint64_t>(n->count)) {
            finished_ = true;
            stop_time_ = now_;
        }
    }
    return out;
}

std::size_t simulator::allocate_slot() {
    if (!free_slots_.empty()) {
        const std::size_t slot = free_slots_.back();
        free_slots_.pop_back();
        return slot;
    }
    slots_.emplace_back();
    return slots_.size() - 1;
}

void simulator::on_arrival(std::size_t cls) {
    const auto& wc = model_.classes[cls];
    ++class_generated_[cls];
    ++generated_;
    if (!wc.max_requests || class_generated_[cls] < static_cast<std::uint64_t>(*wc.max_requests))
        schedule(now_ + sample(wc.arrival, arrival_streams_[cls]), event_kind::arrival, cls, 0, 0);

    const std::size_t slot = allocate_slot();
    auto& req = slots_[slot];
    req.id = next_request_id_++;
    req.cls = cls;
    req.visit_index = 0;
    req.arrival_time = now_;
    req.visits.clear();
    req.outcome = request_outcome::in_flight;
    req.dropped_at.reset();

    metrics_.record_generated(cls, now_);
    enter(slot);
}

void simulator::enter(std::size_t slot) {
    auto& req = slots_[slot];
    const std::size_t r = path_resources_[req.cls][req.visit_index];
    auto& rs = resources_[r];

    auto& loads = loads_scratch_;
    loads.resize(rs.replicas.size());
    for (std::size_t i = 0; i < rs.replicas.size(); ++i)
        loads[i] = {(rs.replicas[i].busy ? 1 : 0) + static_cast<std::int64_t>(rs.replicas[i].queue.size()),
                    rs.capacities[i]};
    const auto choice = select_replica(loads, specs_[r]->balancer, rs.balancer, demand_streams_[r]);

    ++rs.offered;
    if (!choice) {
        ++rs.dropped;
        metrics_.record_drop(r, now_);
        req.dropped_at = r;
        terminate(slot, request_outcome::dropped);
        return;
    }

    metrics_.record_admission(r, now_);
    req.visits.push_back({r, now_, now_, now_});
    auto& replica = rs.replicas[*choice];
    if (!replica.busy) {
        start_service(r, *choice, slot);
    } else {
        replica.queue.push_back(slot);
    }
    metrics_.record_population(r, now_, rs.population());
}

void simulator::start_service(std::size_t r, std::size_t replica_index, std::size_t slot) {
    auto& rs = resources_[r];
    auto& replica = rs.replicas[replica_index];
    auto& req = slots_[slot];

    ++rs.started;
    if (!replica.busy) {
        replica.busy = true;
        replica.busy_since = now_;
        if (rs.busy_count++ == 0) rs.any_busy_since = now_;
    }
    req.visits.back().service_start = now_;
    const auto& demand = model_.classes[req.cls].path[req.visit_index].demand;
    schedule(now_ + sample(demand, demand_streams_[r]), event_kind::service_complete, r, replica_index, slot);
}

void simulator::on_service_complete(std::size_t r, std::size_t replica_index, std::size_t slot) {
    auto& rs = resources_[r];
    auto& replica = rs.replicas[replica_index];
    auto& req = slots_[slot];

    auto& vt = req.visits.back();
    vt.service_end = now_;
    ++rs.completed;
    metrics_.record_visit(r, vt.enqueue_time, vt.service_start, vt.service_end);

    if (!replica.queue.empty()) {
        const std::size_t next = replica.queue.front();
        replica.queue.pop_front();
        start_service(r, replica_index, next);
    } else {
        replica.busy = false;
        replica.busy_time += now_ - replica.busy_since;
        metrics_.record_busy(r, replica.busy_since, now_);
        if (--rs.busy_count == 0) metrics_.record_any_busy(r, rs.any_busy_since, now_);
    }
    metrics_.record_population(r, now_, rs.population());

    ++req.visit_index;
    if (req.visit_index < path_resources_[req.cls].size()) {
        enter(slot);
    } else {
        terminate(slot, request_outcome::completed);
    }
}

void simulator::terminate(std::size_t slot, request_outcome outcome) {
    auto& req = slots_[slot];
    req.outcome = outcome;
    if (outcome == request_outcome::completed) {
        ++completed_;
        metrics_.record_completion(req.cls, req.arrival_time, now_);
    } else {
        ++dropped_;
        metrics_.record_session_drop(req.cls, req.arrival_time);
    }
    if (opts_.keep_records) records_.push_back(req);
    free_slots_.push_back(slot);
}

metrics_report simulator::run() {
    while (step()) {
    }
    return finalize();
}

metrics_report simulator::finalize() const {
    const double stop = stop_time();
    metrics_accumulator acc = metrics_;
    for (std::size_t r = 0; r < resources_.size(); ++r) {
        const auto& rs = resources_[r];
        for (const auto& replica : rs.replicas)
            if (replica.busy) acc.record_busy(r, replica.busy_since, stop);
        if (rs.busy_count > 0) acc.record_any_busy(r, rs.any_busy_since, stop);
    }
    return acc.finalize(stop, {generated_, completed_, dropped_, in_flight()});
}

metrics_report run(const scenario_model& model) {
    simulator sim(model);
    return sim.run();
}

}  // namespace tiersim
