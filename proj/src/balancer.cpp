#include "tiersim/balancer.hpp"

#include <limits>

namespace tiersim {

std::vector<std::int64_t> replica_capacities(std::int64_t replicas, std::optional<std::int64_t> queue_capacity) {
    std::vector<std::int64_t> caps(static_cast<std::size_t>(replicas));
    for (std::int64_t r = 0; r < replicas; ++r) {
        if (!queue_capacity) {
            caps[r] = std::numeric_limits<std::int64_t>::max();
        } else {
            const std::int64_t k = *queue_capacity;
            caps[r] = 1 + k / replicas + (r < k % replicas ? 1 : 0);
        }
    }
    return caps;
}

std::optional<std::size_t> select_replica(std::span<const replica_load> loads, balancer_policy policy,
                                          balancer_state& state, stream& rng) {
    const std::size_t n = loads.size();
    auto has_room = [&](std::size_t i) { return loads[i].backlog < loads[i].capacity; };

    switch (policy) {
        case balancer_policy::jsq: {
            std::optional<std::size_t> best;
            for (std::size_t i = 0; i < n; ++i) {
                if (!has_room(i)) continue;
                if (!best || loads[i].backlog < loads[*best].backlog) best = i;
            }
            return best;
        }
        case balancer_policy::round_robin: {
            for (std::size_t step = 0; step < n; ++step) {
                const std::size_t i = (state.rr_cursor + step) % n;
                if (has_room(i)) {
                    state.rr_cursor = (i + 1) % n;
                    return i;
                }
            }
            return std::nullopt;
        }
        case balancer_policy::random: {
            std::size_t candidates = 0;
            for (std::size_t i = 0; i < n; ++i) candidates += has_room(i) ? 1 : 0;
            if (candidates == 0) return std::nullopt;
            std::size_t k = candidates > 1 ? rng.next_index(candidates) : 0;
            for (std::size_t i = 0; i < n; ++i) {
                if (!has_room(i)) continue;
                if (k-- == 0) return i;
            }
            return std::nullopt;
        }
    }
    return std::nullopt;
}

}  // namespace tiersim
