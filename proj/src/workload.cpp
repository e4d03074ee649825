#include "tiersim/workload.hpp"

#include <cmath>
#include <sstream>

#include "tiersim/error.hpp"

namespace tiersim {

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view consumer) noexcept {
    return splitmix64(master_seed ^ fnv1a64(consumer));
}

stream::stream(std::uint64_t master_seed, std::string consumer)
    : consumer_(std::move(consumer)), engine_(derive_seed(master_seed, consumer_)) {}

double stream::next_uniform() noexcept {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::size_t stream::next_index(std::size_t n) noexcept {
    const auto i = static_cast<std::size_t>(next_uniform() * static_cast<double>(n));
    return i < n ? i : n - 1;
}

std::string stream::save_state() const {
    std::ostringstream os;
    os << engine_;
    return os.str();
}

void stream::load_state(const std::string& state) {
    std::istringstream is(state);
    is >> engine_;
    if (!is) throw error(error_code::validation, "corrupt stream state for '" + consumer_ + "'");
}

double sample(const distribution& dist, stream& s) noexcept {
    return std::visit(
        [&](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, exponential>) {
                return -std::log1p(-s.next_uniform()) / d.rate;
            } else if constexpr (std::is_same_v<T, deterministic>) {
                return d.value;
            } else {
                return d.lo + (d.hi - d.lo) * s.next_uniform();
            }
        },
        dist);
}

}  // namespace tiersim
