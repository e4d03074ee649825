#pragma once

// Closed-form M/M/c/K station results, used to validate the simulator on
// single-station scenarios. K counts waiting slots, so the state space is
// 0..c+K.

#include <cstdint>
#include <string>
#include <vector>

namespace tiersim {

struct analytic_metrics {
    double rho = 0.0;            // lambda / (c * mu)
    std::vector<double> p_n;     // state probabilities, size c + K + 1
    double p_block = 0.0;        // p_{c+K}
    double util = 0.0;           // mean busy-server fraction
    double p_all_idle = 1.0;     // p_0
    double mean_in_system = 0.0; // L
    double mean_queue = 0.0;     // L_q
    double mean_wait = 0.0;      // W_q, seconds
    double mean_response = 0.0;  // W = W_q + 1/mu
    double lambda_eff = 0.0;     // lambda * (1 - p_block)
};

// Throws error(domain) when mu <= 0, lambda < 0, c < 1, K < 0, or any
// argument is not finite.
analytic_metrics mmck(double lambda, double mu, std::int64_t servers, std::int64_t waiting_slots);

struct station {
    std::string name;
    analytic_metrics metrics;
};

// Descending p_block; stable for equal values.
std::vector<station> rank_by_blocking(std::vector<station> stations);

namespace detail {

// Single-server state distribution over n = 0..capacity.
// Geometric form p_n = (1-rho) rho^n / (1 - rho^(capacity+1)); undefined at rho == 1.
std::vector<double> mm1k_geometric(double rho, std::int64_t capacity);
// The rho == 1 limit: p_n = 1 / (capacity + 1).
std::vector<double> mm1k_uniform(std::int64_t capacity);
// General birth-death product form for c servers, with running rescaling.
std::vector<double> mmck_product_form(double lambda, double mu, std::int64_t servers, std::int64_t capacity);

}  // namespace detail

}  // namespace tiersim
