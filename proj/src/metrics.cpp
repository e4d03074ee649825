#include "tiersim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <nlohmann/json.hpp>

#include "tiersim/error.hpp"

namespace tiersim {

const resource_metrics* metrics_report::find(std::string_view name) const {
    for (const auto& r : resources)
        if (r.name == name) return &r;
    return nullptr;
}

metrics_accumulator::metrics_accumulator(const scenario_model& model)
    : scenario_(model.name),
      seed_(model.run.seed),
      window_start_(model.run.warmup),
      series_enabled_(model.run.series_enabled) {
    for (const auto* r : model.resources()) {
        resource_acc acc;
        acc.name = r->name;
        acc.replicas = r->replicas;
        acc.last_change = window_start_;
        resources_.push_back(std::move(acc));
    }
    for (const auto& c : model.classes) {
        class_acc acc;
        acc.name = c.name;
        classes_.push_back(std::move(acc));
    }
}

void metrics_accumulator::record_admission(std::size_t resource, double time) {
    if (time >= window_start_) ++resources_[resource].offered;
}

void metrics_accumulator::record_visit(std::size_t resource, double enqueue, double start, double end) {
    if (enqueue < window_start_) return;
    auto& r = resources_[resource];
    r.response.add(end - enqueue);
    r.service.add(end - start);
    r.waiting.add(start - enqueue);
    if (series_enabled_) series_.push_back({static_cast<std::uint32_t>(resource), enqueue, end - enqueue});
}

void metrics_accumulator::record_drop(std::size_t resource, double time) {
    if (time < window_start_) return;
    auto& r = resources_[resource];
    ++r.offered;
    ++r.dropped;
}

void metrics_accumulator::record_busy(std::size_t resource, double start, double end) {
    const double a = clip(start), b = clip(end);
    if (b > a) resources_[resource].busy_time += b - a;
}

void metrics_accumulator::record_any_busy(std::size_t resource, double start, double end) {
    const double a = clip(start), b = clip(end);
    if (b > a) resources_[resource].any_busy_time += b - a;
}

void metrics_accumulator::record_population(std::size_t resource, double time, std::int64_t population) {
    auto& r = resources_[resource];
    const double t = clip(time);
    if (t > r.last_change) {
        r.population_area += static_cast<double>(r.population) * (t - r.last_change);
        r.last_change = t;
    }
    r.population = population;
}

void metrics_accumulator::record_generated(std::size_t cls, double time) {
    if (time >= window_start_) ++classes_[cls].generated;
}

void metrics_accumulator::record_completion(std::size_t cls, double arrival, double end) {
    if (arrival < window_start_) return;
    auto& c = classes_[cls];
    ++c.completed;
    c.response.add(end - arrival);
    c.samples.push_back(end - arrival);
    if (series_enabled_) series_.push_back({series_point::end_to_end, arrival, end - arrival});
}

void metrics_accumulator::record_session_drop(std::size_t cls, double arrival) {
    if (arrival >= window_start_) ++classes_[cls].dropped;
}

namespace {

double fraction(double num, double den) {
    if (!(den > 0.0)) return 0.0;
    return std::clamp(num / den, 0.0, 1.0);
}

// Nearest-rank percentile over a sorted sample.
double percentile(const std::vector<double>& sorted, double p) {
    if (sorted.empty()) return 0.0;
    auto rank = static_cast<std::size_t>(std::ceil(p * static_cast<double>(sorted.size())));
    rank = std::clamp<std::size_t>(rank, 1, sorted.size());
    return sorted[rank - 1];
}

}  // namespace

metrics_report metrics_accumulator::finalize(double stop_time, const totals& t) const {
    metrics_report rep;
    rep.scenario = scenario_;
    rep.seed = seed_;
    rep.warmup = window_start_;
    rep.stop_time = stop_time;
    rep.elapsed = std::max(0.0, stop_time - window_start_);
    rep.generated = t.generated;
    rep.completed = t.completed;
    rep.dropped = t.dropped;
    rep.in_flight = t.in_flight;
    rep.series_enabled = series_enabled_;

    for (const auto& r : resources_) {
        resource_metrics m;
        m.name = r.name;
        m.replicas = r.replicas;
        m.avg_response = r.response.mean();
        m.avg_service = r.service.mean();
        m.avg_waiting = r.waiting.mean();
        m.served = r.response.count();
        m.offered = r.offered;
        m.dropped = r.dropped;
        m.p_drop = r.offered ? static_cast<double>(r.dropped) / static_cast<double>(r.offered) : 0.0;
        if (rep.elapsed > 0.0) {
            m.utilization = fraction(r.busy_time, static_cast<double>(r.replicas) * rep.elapsed);
            m.p_idle = 1.0 - fraction(r.any_busy_time, rep.elapsed);
            double area = r.population_area;
            const double last = std::min(std::max(r.last_change, window_start_), stop_time);
            if (stop_time > last) area += static_cast<double>(r.population) * (stop_time - last);
            m.mean_in_system = area / rep.elapsed;
            m.throughput = static_cast<double>(m.served) / rep.elapsed;
        }
        rep.resources.push_back(std::move(m));
    }

    for (const auto& c : classes_) {
        class_metrics m;
        m.name = c.name;
        m.generated = c.generated;
        m.completed = c.completed;
        m.dropped = c.dropped;
        m.mean_response = c.response.mean();
        auto sorted = c.samples;
        std::sort(sorted.begin(), sorted.end());
        m.p50_response = percentile(sorted, 0.50);
        m.p95_response = percentile(sorted, 0.95);
        m.p99_response = percentile(sorted, 0.99);
        rep.classes.push_back(std::move(m));
    }

    rep.series = series_;
    std::stable_sort(rep.series.begin(), rep.series.end(),
                     [](const series_point& a, const series_point& b) { return a.arrival_time < b.arrival_time; });
    return rep;
}

// --- rendering --------------------------------------------------------------

std::string to_json(const metrics_report& report) {
    nlohmann::ordered_json j;
    j["scenario"] = report.scenario;
    j["seed"] = report.seed;
    j["warmup"] = report.warmup;
    j["stop_time"] = report.stop_time;
    j["elapsed"] = report.elapsed;
    j["generated"] = report.generated;
    j["completed"] = report.completed;
    j["dropped"] = report.dropped;
    j["in_flight"] = report.in_flight;
    j["series"] = report.series_enabled;
    auto& res = j["resources"] = nlohmann::ordered_json::object();
    for (const auto& r : report.resources) {
        auto& rj = res[r.name];
        rj["replicas"] = r.replicas;
        rj["avg_response"] = r.avg_response;
        rj["avg_service"] = r.avg_service;
        rj["avg_waiting"] = r.avg_waiting;
        rj["utilization"] = r.utilization;
        rj["p_idle"] = r.p_idle;
        rj["p_drop"] = r.p_drop;
        rj["mean_in_system"] = r.mean_in_system;
        rj["throughput"] = r.throughput;
        rj["offered"] = r.offered;
        rj["served"] = r.served;
        rj["dropped"] = r.dropped;
    }
    auto& cls = j["classes"] = nlohmann::ordered_json::object();
    for (const auto& c : report.classes) {
        auto& cj = cls[c.name];
        cj["generated"] = c.generated;
        cj["completed"] = c.completed;
        cj["dropped"] = c.dropped;
        cj["mean_response"] = c.mean_response;
        cj["p50_response"] = c.p50_response;
        cj["p95_response"] = c.p95_response;
        cj["p99_response"] = c.p99_response;
    }
    return j.dump(2) + "\n";
}

metrics_report report_from_json(std::string_view text) {
    nlohmann::ordered_json j;
    try {
        j = nlohmann::ordered_json::parse(text.begin(), text.end());
    } catch (const nlohmann::json::parse_error& e) {
        throw error(error_code::syntax, std::string("malformed report: ") + e.what());
    }
    try {
        metrics_report rep;
        rep.scenario = j.at("scenario").get<std::string>();
        rep.seed = j.at("seed").get<std::uint64_t>();
        rep.warmup = j.at("warmup").get<double>();
        rep.stop_time = j.at("stop_time").get<double>();
        rep.elapsed = j.at("elapsed").get<double>();
        rep.generated = j.at("generated").get<std::uint64_t>();
        rep.completed = j.at("completed").get<std::uint64_t>();
        rep.dropped = j.at("dropped").get<std::uint64_t>();
        rep.in_flight = j.at("in_flight").get<std::uint64_t>();
        rep.series_enabled = j.at("series").get<bool>();
        for (const auto& [name, rj] : j.at("resources").items()) {
            resource_metrics r;
            r.name = name;
            r.replicas = rj.at("replicas").get<std::int64_t>();
            r.avg_response = rj.at("avg_response").get<double>();
            r.avg_service = rj.at("avg_service").get<double>();
            r.avg_waiting = rj.at("avg_waiting").get<double>();
            r.utilization = rj.at("utilization").get<double>();
            r.p_idle = rj.at("p_idle").get<double>();
            r.p_drop = rj.at("p_drop").get<double>();
            r.mean_in_system = rj.at("mean_in_system").get<double>();
            r.throughput = rj.at("throughput").get<double>();
            r.offered = rj.at("offered").get<std::uint64_t>();
            r.served = rj.at("served").get<std::uint64_t>();
            r.dropped = rj.at("dropped").get<std::uint64_t>();
            rep.resources.push_back(std::move(r));
        }
        for (const auto& [name, cj] : j.at("classes").items()) {
            class_metrics c;
            c.name = name;
            c.generated = cj.at("generated").get<std::uint64_t>();
            c.completed = cj.at("completed").get<std::uint64_t>();
            c.dropped = cj.at("dropped").get<std::uint64_t>();
            c.mean_response = cj.at("mean_response").get<double>();
            c.p50_response = cj.at("p50_response").get<double>();
            c.p95_response = cj.at("p95_response").get<double>();
            c.p99_response = cj.at("p99_response").get<double>();
            rep.classes.push_back(std::move(c));
        }
        return rep;
    } catch (const nlohmann::json::exception& e) {
        throw error(error_code::validation, std::string("report is missing fields: ") + e.what());
    }
}

std::string to_table(const metrics_report& report) {
    std::string out;
    char line[256];
    std::snprintf(line, sizeof line, "%-16s %12s %12s %12s %12s %12s %12s\n", "Resource", "AvgResponse",
                  "AvgService", "AvgWaiting", "Utilization", "P(idle)", "P(drop)");
    out += line;
    for (const auto& r : report.resources) {
        std::snprintf(line, sizeof line, "%-16s %12.6g %12.6g %12.6g %12.4f %12.4f %12.4f\n", r.name.c_str(),
                      r.avg_response, r.avg_service, r.avg_waiting, r.utilization, r.p_idle, r.p_drop);
        out += line;
    }
    std::snprintf(line, sizeof line, "\nsessions: generated %llu, completed %llu, dropped %llu, in flight %llu; "
                                     "elapsed %.6g s\n",
                  static_cast<unsigned long long>(report.generated),
                  static_cast<unsigned long long>(report.completed),
                  static_cast<unsigned long long>(report.dropped),
                  static_cast<unsigned long long>(report.in_flight), report.elapsed);
    out += line;
    for (const auto& c : report.classes) {
        std::snprintf(line, sizeof line, "class %-10s completed %llu, mean response %.6g s, p95 %.6g s\n",
                      c.name.c_str(), static_cast<unsigned long long>(c.completed), c.mean_response,
                      c.p95_response);
        out += line;
    }
    return out;
}

std::string export_series(const metrics_report& report) {
    if (!report.series_enabled)
        throw error(error_code::series_disabled, "series collection was not enabled for this run");
    std::string out = "resource,arrival_time,response_time\n";
    char buf[64];
    for (const auto& p : report.series) {
        out += p.resource == series_point::end_to_end ? std::string(end_to_end_label)
                                                       : report.resources.at(p.resource).name;
        std::snprintf(buf, sizeof buf, ",%.17g,%.17g\n", p.arrival_time, p.response_time);
        out += buf;
    }
    return out;
}

}  // namespace tiersim
