#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "tiersim/io.hpp"
#include "tiersim/metrics.hpp"
#include "tiersim/model.hpp"

#ifndef TIERSIM_SOURCE_DIR
#error "TIERSIM_SOURCE_DIR must point at the repository root"
#endif

namespace tiersim::testing {

inline std::string source_path(const std::string& relative) {
    return std::string(TIERSIM_SOURCE_DIR) + "/" + relative;
}

inline std::string read_source(const std::string& relative) { return read_text_file(source_path(relative)); }

inline scenario_model minimal_model() {
    scenario_model m;
    m.name = "minimal";
    m.tiers.push_back({"app", {resource_spec{"cpu"}}});
    m.classes.push_back({"web", exponential{1.0}, {{"cpu", exponential{2.0}}}, std::nullopt});
    return m;
}

// One resource, exponential arrivals and service.
inline scenario_model station_model(double lambda, double mu, std::int64_t replicas,
                                    std::optional<std::int64_t> waiting, std::int64_t requests,
                                    std::uint64_t seed = 1) {
    scenario_model m;
    m.name = "station";
    resource_spec r{"station"};
    r.replicas = replicas;
    r.queue_capacity = waiting;
    m.tiers.push_back({"only", {r}});
    m.classes.push_back({"poisson", exponential{lambda}, {{"station", exponential{mu}}}, std::nullopt});
    m.run.seed = seed;
    m.run.stop = stop_after_requests{requests};
    return m;
}

// Random but valid scenario. Sizes are kept small so a hundred of them run in
// well under a second.
inline scenario_model random_model(std::uint64_t seed) {
    std::mt19937_64 g(seed);
    auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(g); };
    auto real = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(g); };
    auto dist = [&](double scale) -> distribution {
        switch (pick(0, 2)) {
            case 0: return exponential{scale};
            case 1: return deterministic{1.0 / scale};
            default: {
                const double lo = real(0.0, 1.0 / scale);
                return uniform{lo, lo + real(0.0, 1.0 / scale)};
            }
        }
    };

    scenario_model m;
    m.name = "random_" + std::to_string(seed);
    std::vector<std::string> names;
    const int tiers = pick(1, 3);
    for (int t = 0; t < tiers; ++t) {
        tier tr{"tier" + std::to_string(t), {}};
        const int count = pick(1, 3);
        for (int i = 0; i < count; ++i) {
            resource_spec r{"r" + std::to_string(names.size())};
            r.replicas = pick(1, 3);
            if (pick(0, 3) != 0) r.queue_capacity = pick(0, 4);
            r.balancer = static_cast<balancer_policy>(pick(0, 2));
            names.push_back(r.name);
            tr.resources.push_back(r);
        }
        m.tiers.push_back(std::move(tr));
    }
    const int classes = pick(1, 3);
    for (int c = 0; c < classes; ++c) {
        workload_class wc;
        wc.name = "c" + std::to_string(c);
        wc.arrival = dist(real(0.5, 4.0));
        const int len = pick(1, 6);
        for (int v = 0; v < len; ++v)
            wc.path.push_back({names[static_cast<std::size_t>(pick(0, static_cast<int>(names.size()) - 1))],
                               dist(real(1.0, 8.0))});
        if (pick(0, 2) == 0) wc.max_requests = pick(1, 400);
        m.classes.push_back(std::move(wc));
    }
    m.run.seed = g();
    if (pick(0, 1) == 0) m.run.stop = stop_after_requests{pick(1, 1500)};
    else m.run.stop = stop_after_time{real(1.0, 300.0)};
    if (pick(0, 3) == 0) m.run.warmup = real(0.0, 20.0);
    m.run.series_enabled = pick(0, 1) == 1;
    return m;
}

inline std::vector<std::string> resource_names(const metrics_report& report) {
    std::vector<std::string> out;
    for (const auto& r : report.resources) out.push_back(r.name);
    return out;
}

inline bool response_identity_holds(const resource_metrics& r) {
    return std::abs(r.avg_response - (r.avg_service + r.avg_waiting)) <= 1e-9 * std::max(1.0, r.avg_response);
}

}  // namespace tiersim::testing
