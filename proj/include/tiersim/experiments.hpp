#pragma once

// Multi-run drivers: arrival-rate sweeps with replications, and side-by-side
// comparison of a simulated single station against the M/M/c/K oracle.

#include <cstdint>
#include <string>
#include <vector>

#include "tiersim/metrics.hpp"
#include "tiersim/model.hpp"
#include "tiersim/oracle.hpp"

namespace tiersim {

// Seed for replication `replication` at grid point `rate_index`.
std::uint64_t sweep_seed(std::uint64_t master_seed, std::size_t rate_index, std::size_t replication) noexcept;

// Copy of `model` whose class `class_name` (first class when empty) gets
// exponential interarrivals at `rate`. Throws error(validation) for an unknown
// class or non-positive rate.
scenario_model with_arrival_rate(const scenario_model& model, const std::string& class_name, double rate);

struct sweep_options {
    std::vector<double> rates;
    std::size_t replications = 1;
    std::string class_name;
    unsigned threads = 1;  // 0 = hardware concurrency
};

struct sweep_run {
    double rate = 0.0;
    std::size_t rate_index = 0;
    std::size_t replication = 0;
    std::uint64_t seed = 0;
    metrics_report report;
};

struct sweep_row {
    double rate = 0.0;
    std::string resource;
    std::size_t replications = 0;
    double utilization = 0.0;
    double p_idle = 0.0;
    double p_drop = 0.0;
    double p_drop_min = 0.0;
    double p_drop_max = 0.0;
    double p_drop_ci = 0.0;  // 95% normal half-width across replications
    double avg_response = 0.0;
    double avg_service = 0.0;
    double avg_waiting = 0.0;
};

struct sweep_result {
    std::vector<sweep_run> runs;  // rate-major, replication-minor
    std::vector<sweep_row> rows;  // rate-major, resources in model order
};

// Replications are independent simulators and run on up to `threads`
// threads; the result does not depend on the thread count.
sweep_result sweep(const scenario_model& model, const sweep_options& options);

std::string to_csv(const std::vector<sweep_row>& rows);
std::string runs_to_csv(const std::vector<sweep_run>& runs);

// One station, c replicas, K waiting slots, Poisson(lambda) arrivals,
// exponential(mu) service, stopped after `requests` terminal requests.
// lambda == 0 yields a zero-traffic scenario stopped at a fixed horizon.
scenario_model single_station_scenario(double lambda, double mu, std::int64_t servers, std::int64_t waiting_slots,
                                       std::int64_t requests, std::uint64_t seed);

struct oracle_comparison {
    std::string metric;
    double simulated = 0.0;
    double analytic = 0.0;
    double relative_error = 0.0;  // |sim - analytic| / |analytic|; 0 when both are 0
};

struct oracle_check_result {
    analytic_metrics analytic;
    metrics_report simulated;
    std::vector<oracle_comparison> rows;  // utilization, p_drop, mean_wait, mean_response, p_idle
};

// Throws error(domain) for invalid oracle parameters before simulating.
oracle_check_result oracle_check(double lambda, double mu, std::int64_t servers, std::int64_t waiting_slots,
                                 std::int64_t requests, std::uint64_t seed);

std::string to_table(const oracle_check_result& result);

double relative_error(double simulated, double analytic) noexcept;

}  // namespace tiersim
