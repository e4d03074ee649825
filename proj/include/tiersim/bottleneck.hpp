#pragma once

// Bottleneck ranking from waiting time and drop probability.
//
// score = avg_waiting / max_r(avg_waiting) + p_drop. A resource is flagged
// when p_drop >= drop_threshold or its normalized waiting >= wait_threshold.

#include <string>
#include <vector>

#include "tiersim/metrics.hpp"

namespace tiersim {

struct bottleneck_thresholds {
    double drop = 0.5;
    double wait = 0.5;
};

struct bottleneck_entry {
    std::string resource;
    double score = 0.0;
    double avg_waiting = 0.0;
    double normalized_waiting = 0.0;
    double p_drop = 0.0;
    bool flagged = false;
};

struct bottleneck_report {
    std::vector<bottleneck_entry> entries;  // score descending, ties by name
    bottleneck_thresholds thresholds;

    std::vector<std::string> flagged() const;
};

struct resource_observation {
    std::string resource;
    double avg_waiting = 0.0;
    double p_drop = 0.0;
};

bottleneck_report rank(const std::vector<resource_observation>& observations,
                       const bottleneck_thresholds& thresholds = {});
bottleneck_report rank(const metrics_report& report, const bottleneck_thresholds& thresholds = {});

std::string to_table(const bottleneck_report& report);

}  // namespace tiersim
