#pragma once

// Seedable random-variate streams.
//
// Every consumer (a workload class's arrival process, a resource's demand
// sampler) owns its own stream. The stream seed is
//     splitmix64(master_seed ^ fnv1a64(consumer_name))
// and the generator is std::mt19937_64, whose output sequence is fixed by the
// C++ standard. Uniforms are built from the top 53 bits of each draw, so the
// whole pipeline is reproducible across compilers and standard libraries.
// Adding a consumer never perturbs another consumer's sequence.

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

#include "tiersim/model.hpp"

namespace tiersim {

std::uint64_t fnv1a64(std::string_view bytes) noexcept;
std::uint64_t splitmix64(std::uint64_t x) noexcept;
std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view consumer) noexcept;

class stream {
public:
    stream(std::uint64_t master_seed, std::string consumer);

    const std::string& consumer() const noexcept { return consumer_; }

    // Uniform on [0, 1); never returns 1.
    double next_uniform() noexcept;

    // Uniform index in [0, n). n must be positive.
    std::size_t next_index(std::size_t n) noexcept;

    // Opaque generator state, for checkpointing.
    std::string save_state() const;
    void load_state(const std::string& state);

private:
    std::string consumer_;
    std::mt19937_64 engine_;
};

// Non-negative sample. exponential: -ln(1-u)/rate; uniform: lo + (hi-lo)*u;
// deterministic: the value, without touching the stream.
double sample(const distribution& dist, stream& s) noexcept;

}  // namespace tiersim
