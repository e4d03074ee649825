#pragma once

// Replica selection for multi-replica resources. Each replica keeps its own
// FIFO queue; the request is partitioned to one replica on arrival and stays
// there.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "tiersim/model.hpp"
#include "tiersim/workload.hpp"

namespace tiersim {

struct replica_load {
    std::int64_t backlog = 0;   // in service (0 or 1) + waiting in this replica's queue
    std::int64_t capacity = 1;  // maximum backlog this replica accepts
};

struct balancer_state {
    std::size_t rr_cursor = 0;
};

// Splits the resource's waiting slots across replicas: replica r may hold
// 1 + K/c (+1 for the first K%c replicas) requests. Unbounded capacity maps to
// INT64_MAX.
std::vector<std::int64_t> replica_capacities(std::int64_t replicas, std::optional<std::int64_t> queue_capacity);

// Returns nullopt only when every replica is at capacity.
//  - jsq: smallest backlog, lowest index on ties.
//  - round_robin: next index from the cursor that has room.
//  - random: uniform among replicas with room; draws from `rng` only when
//    there is more than one candidate.
std::optional<std::size_t> select_replica(std::span<const replica_load> loads, balancer_policy policy,
                                          balancer_state& state, stream& rng);

}  // namespace tiersim
