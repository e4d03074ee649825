#include "tiersim/bottleneck.hpp"

#include <algorithm>
#include <cstdio>

namespace tiersim {

std::vector<std::string> bottleneck_report::flagged() const {
    std::vector<std::string> out;
    for (const auto& e : entries)
        if (e.flagged) out.push_back(e.resource);
    return out;
}

bottleneck_report rank(const std::vector<resource_observation>& observations,
                       const bottleneck_thresholds& thresholds) {
    double max_wait = 0.0;
    for (const auto& o : observations) max_wait = std::max(max_wait, o.avg_waiting);

    bottleneck_report out;
    out.thresholds = thresholds;
    for (const auto& o : observations) {
        bottleneck_entry e;
        e.resource = o.resource;
        e.avg_waiting = o.avg_waiting;
        e.p_drop = o.p_drop;
        e.normalized_waiting = max_wait > 0.0 ? o.avg_waiting / max_wait : 0.0;
        e.score = e.normalized_waiting + e.p_drop;
        e.flagged = e.p_drop >= thresholds.drop || e.normalized_waiting >= thresholds.wait;
        out.entries.push_back(std::move(e));
    }
    std::sort(out.entries.begin(), out.entries.end(), [](const bottleneck_entry& a, const bottleneck_entry& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.resource < b.resource;
    });
    return out;
}

bottleneck_report rank(const metrics_report& report, const bottleneck_thresholds& thresholds) {
    std::vector<resource_observation> obs;
    obs.reserve(report.resources.size());
    for (const auto& r : report.resources) obs.push_back({r.name, r.avg_waiting, r.p_drop});
    return rank(obs, thresholds);
}

std::string to_table(const bottleneck_report& report) {
    std::string out;
    char line[200];
    std::snprintf(line, sizeof line, "%-16s %10s %12s %10s %10s  %s\n", "Resource", "Score", "AvgWaiting",
                  "NormWait", "P(drop)", "Bottleneck");
    out += line;
    for (const auto& e : report.entries) {
        std::snprintf(line, sizeof line, "%-16s %10.4f %12.6g %10.4f %10.4f  %s\n", e.resource.c_str(), e.score,
                      e.avg_waiting, e.normalized_waiting, e.p_drop, e.flagged ? "yes" : "no");
        out += line;
    }
    std::snprintf(line, sizeof line, "\nthresholds: p_drop >= %g or normalized waiting >= %g\n",
                  report.thresholds.drop, report.thresholds.wait);
    out += line;
    return out;
}

}  // namespace tiersim
