#include "tiersim/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "tiersim/error.hpp"

namespace tiersim {

namespace detail {

std::vector<double> mm1k_geometric(double rho, std::int64_t capacity) {
    const auto n_states = static_cast<std::size_t>(capacity + 1);
    std::vector<double> p(n_states);
    // Work with r <= 1 to keep powers bounded: for rho > 1 the distribution is
    // the mirror image of the one for 1/rho.
    const bool mirrored = rho > 1.0;
    const double r = mirrored ? 1.0 / rho : rho;
    const double p0 = (1.0 - r) / (1.0 - std::pow(r, static_cast<double>(capacity + 1)));
    double term = p0;
    for (std::size_t n = 0; n < n_states; ++n) {
        p[mirrored ? n_states - 1 - n : n] = term;
        term *= r;
    }
    return p;
}

std::vector<double> mm1k_uniform(std::int64_t capacity) {
    return std::vector<double>(static_cast<std::size_t>(capacity + 1), 1.0 / static_cast<double>(capacity + 1));
}

std::vector<double> mmck_product_form(double lambda, double mu, std::int64_t servers, std::int64_t capacity) {
    constexpr double rescale_above = 1e200;
    const auto n_states = static_cast<std::size_t>(capacity + 1);
    std::vector<double> p(n_states);
    p[0] = 1.0;
    double total = 1.0;
    for (std::size_t n = 1; n < n_states; ++n) {
        const double busy = static_cast<double>(std::min<std::int64_t>(static_cast<std::int64_t>(n), servers));
        p[n] = p[n - 1] * lambda / (busy * mu);
        total += p[n];
        if (p[n] > rescale_above) {
            const double scale = p[n];
            for (std::size_t k = 0; k <= n; ++k) p[k] /= scale;
            total /= scale;
        }
    }
    for (auto& x : p) x /= total;
    return p;
}

}  // namespace detail

analytic_metrics mmck(double lambda, double mu, std::int64_t servers, std::int64_t waiting_slots) {
    if (!std::isfinite(lambda) || !std::isfinite(mu)) throw error(error_code::domain, "mmck: non-finite rate");
    if (!(mu > 0.0)) throw error(error_code::domain, "mmck: service rate mu must be positive");
    if (lambda < 0.0) throw error(error_code::domain, "mmck: arrival rate lambda must be non-negative");
    if (servers < 1) throw error(error_code::domain, "mmck: at least one server is required");
    if (waiting_slots < 0) throw error(error_code::domain, "mmck: waiting slots must be non-negative");

    analytic_metrics m;
    const std::int64_t capacity = servers + waiting_slots;
    m.rho = lambda / (static_cast<double>(servers) * mu);

    if (servers == 1) {
        // |rho - 1| below this uses the limit form; the geometric form loses
        // about 1e-16/|1-rho| relative precision near the singularity.
        constexpr double singular_band = 1e-9;
        m.p_n = std::abs(m.rho - 1.0) < singular_band ? detail::mm1k_uniform(capacity)
                                                      : detail::mm1k_geometric(m.rho, capacity);
    } else {
        m.p_n = detail::mmck_product_form(lambda, mu, servers, capacity);
    }

    m.p_block = m.p_n.back();
    m.p_all_idle = m.p_n.front();
    double busy = 0.0;
    for (std::size_t n = 0; n < m.p_n.size(); ++n) {
        const auto nn = static_cast<std::int64_t>(n);
        busy += static_cast<double>(std::min(nn, servers)) * m.p_n[n];
        m.mean_in_system += static_cast<double>(nn) * m.p_n[n];
        m.mean_queue += static_cast<double>(std::max<std::int64_t>(0, nn - servers)) * m.p_n[n];
    }
    m.util = busy / static_cast<double>(servers);
    m.lambda_eff = lambda * (1.0 - m.p_block);
    m.mean_wait = m.lambda_eff > 0.0 ? m.mean_queue / m.lambda_eff : 0.0;
    m.mean_response = m.mean_wait + 1.0 / mu;
    return m;
}

std::vector<station> rank_by_blocking(std::vector<station> stations) {
    std::stable_sort(stations.begin(), stations.end(),
                     [](const station& a, const station& b) { return a.metrics.p_block > b.metrics.p_block; });
    return stations;
}

}  // namespace tiersim
