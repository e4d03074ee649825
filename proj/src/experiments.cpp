#include "tiersim/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "tiersim/engine.hpp"
#include "tiersim/error.hpp"
#include "tiersim/workload.hpp"

namespace tiersim {

std::uint64_t sweep_seed(std::uint64_t master_seed, std::size_t rate_index, std::size_t replication) noexcept {
    const std::uint64_t cell = (static_cast<std::uint64_t>(rate_index) << 32) ^ static_cast<std::uint64_t>(replication);
    return splitmix64(splitmix64(master_seed) ^ cell);
}

scenario_model with_arrival_rate(const scenario_model& model, const std::string& class_name, double rate) {
    if (!(rate > 0.0) || !std::isfinite(rate))
        throw error(error_code::validation, "arrival rate must be positive and finite");
    if (model.classes.empty()) throw error(error_code::validation, "scenario has no workload classes");
    scenario_model out = model;
    auto it = class_name.empty() ? out.classes.begin()
                                 : std::find_if(out.classes.begin(), out.classes.end(),
                                                [&](const workload_class& c) { return c.name == class_name; });
    if (it == out.classes.end()) throw error(error_code::validation, "unknown class '" + class_name + "'");
    it->arrival = exponential{rate};
    return out;
}

sweep_result sweep(const scenario_model& model, const sweep_options& options) {
    if (options.rates.empty()) throw error(error_code::validation, "sweep needs at least one rate");
    if (options.replications < 1) throw error(error_code::validation, "sweep needs at least one replication");

    sweep_result result;
    for (std::size_t i = 0; i < options.rates.size(); ++i) {
        for (std::size_t rep = 0; rep < options.replications; ++rep) {
            sweep_run run;
            run.rate = options.rates[i];
            run.rate_index = i;
            run.replication = rep;
            run.seed = sweep_seed(model.run.seed, i, rep);
            result.runs.push_back(std::move(run));
        }
    }
    // Build every scenario up front so configuration errors surface on the caller's thread.
    std::vector<scenario_model> scenarios;
    scenarios.reserve(result.runs.size());
    for (const auto& run : result.runs) {
        auto m = with_arrival_rate(model, options.class_name, run.rate);
        m.run.seed = run.seed;
        m.run.series_enabled = false;
        scenarios.push_back(std::move(m));
    }

    unsigned threads = options.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : options.threads;
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, result.runs.size()));
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t k = next++; k < result.runs.size(); k = next++) {
            try {
                result.runs[k].report = run(scenarios[k]);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);

    const std::size_t reps = options.replications;
    for (std::size_t i = 0; i < options.rates.size(); ++i) {
        const auto& first = result.runs[i * reps].report;
        for (std::size_t r = 0; r < first.resources.size(); ++r) {
            sweep_row row;
            row.rate = options.rates[i];
            row.resource = first.resources[r].name;
            row.replications = reps;
            row.p_drop_min = std::numeric_limits<double>::infinity();
            row.p_drop_max = -std::numeric_limits<double>::infinity();
            running_mean p_drop;
            for (std::size_t rep = 0; rep < reps; ++rep) {
                const auto& m = result.runs[i * reps + rep].report.resources[r];
                const double n = static_cast<double>(rep + 1);
                row.utilization += (m.utilization - row.utilization) / n;
                row.p_idle += (m.p_idle - row.p_idle) / n;
                row.avg_response += (m.avg_response - row.avg_response) / n;
                row.avg_service += (m.avg_service - row.avg_service) / n;
                row.avg_waiting += (m.avg_waiting - row.avg_waiting) / n;
                p_drop.add(m.p_drop);
                row.p_drop_min = std::min(row.p_drop_min, m.p_drop);
                row.p_drop_max = std::max(row.p_drop_max, m.p_drop);
            }
            row.p_drop = p_drop.mean();
            row.p_drop_ci = reps > 1 ? 1.96 * std::sqrt(p_drop.variance() / static_cast<double>(reps)) : 0.0;
            result.rows.push_back(std::move(row));
        }
    }
    return result;
}

std::string to_csv(const std::vector<sweep_row>& rows) {
    std::string out =
        "rate,resource,replications,utilization,p_idle,p_drop,p_drop_min,p_drop_max,p_drop_ci,"
        "avg_response,avg_service,avg_waiting\n";
    char buf[512];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.17g,%s,%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.rate,
                      r.resource.c_str(), r.replications, r.utilization, r.p_idle, r.p_drop, r.p_drop_min,
                      r.p_drop_max, r.p_drop_ci, r.avg_response, r.avg_service, r.avg_waiting);
        out += buf;
    }
    return out;
}

std::string runs_to_csv(const std::vector<sweep_run>& runs) {
    std::string out = "rate,replication,seed,resource,utilization,p_idle,p_drop,avg_response,avg_service,avg_waiting\n";
    char buf[512];
    for (const auto& run : runs) {
        for (const auto& m : run.report.resources) {
            std::snprintf(buf, sizeof buf, "%.17g,%zu,%llu,%s,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", run.rate,
                          run.replication, static_cast<unsigned long long>(run.seed), m.name.c_str(), m.utilization,
                          m.p_idle, m.p_drop, m.avg_response, m.avg_service, m.avg_waiting);
            out += buf;
        }
    }
    return out;
}

scenario_model single_station_scenario(double lambda, double mu, std::int64_t servers, std::int64_t waiting_slots,
                                       std::int64_t requests, std::uint64_t seed) {
    scenario_model m;
    m.name = "single_station";
    resource_spec station;
    station.name = "station";
    station.replicas = servers;
    station.queue_capacity = waiting_slots;
    m.tiers.push_back({"service", {station}});

    workload_class cls;
    cls.name = "poisson";
    cls.path.push_back({"station", exponential{mu}});
    m.run.seed = seed;
    if (lambda > 0.0) {
        cls.arrival = exponential{lambda};
        m.run.stop = stop_after_requests{requests};
    } else {
        // No traffic: the first arrival lands beyond the horizon.
        const double horizon = static_cast<double>(std::max<std::int64_t>(requests, 1)) / mu;
        cls.arrival = deterministic{2.0 * horizon};
        m.run.stop = stop_after_time{horizon};
    }
    m.classes.push_back(std::move(cls));
    return m;
}

double relative_error(double simulated, double analytic) noexcept {
    if (analytic == 0.0) return simulated == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return std::abs(simulated - analytic) / std::abs(analytic);
}

oracle_check_result oracle_check(double lambda, double mu, std::int64_t servers, std::int64_t waiting_slots,
                                 std::int64_t requests, std::uint64_t seed) {
    oracle_check_result out;
    out.analytic = mmck(lambda, mu, servers, waiting_slots);
    if (requests < 1) throw error(error_code::domain, "request count must be positive");
    out.simulated = run(single_station_scenario(lambda, mu, servers, waiting_slots, requests, seed));

    const auto& sim = out.simulated.resources.front();
    const auto& ana = out.analytic;
    auto add = [&](const char* metric, double s, double a) {
        out.rows.push_back({metric, s, a, relative_error(s, a)});
    };
    add("utilization", sim.utilization, ana.util);
    add("p_drop", sim.p_drop, ana.p_block);
    add("mean_wait", sim.avg_waiting, ana.mean_wait);
    add("mean_response", sim.avg_response, lambda > 0.0 ? ana.mean_response : 0.0);
    add("p_idle", sim.p_idle, ana.p_all_idle);
    return out;
}

std::string to_table(const oracle_check_result& result) {
    std::string out;
    char line[200];
    std::snprintf(line, sizeof line, "%-14s %14s %14s %12s\n", "Metric", "Simulated", "Analytic", "RelError");
    out += line;
    for (const auto& r : result.rows) {
        std::snprintf(line, sizeof line, "%-14s %14.6g %14.6g %12.4g\n", r.metric.c_str(), r.simulated, r.analytic,
                      r.relative_error);
        out += line;
    }
    return out;
}

}  // namespace tiersim
