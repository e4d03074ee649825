#include "tiersim/cli.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "tiersim/bottleneck.hpp"
#include "tiersim/engine.hpp"
#include "tiersim/error.hpp"
#include "tiersim/experiments.hpp"
#include "tiersim/io.hpp"
#include "tiersim/model.hpp"
#include "tiersim/spe_frontend.hpp"

namespace tiersim {

namespace {

struct global_options {
    std::optional<std::uint64_t> seed;
    std::string format = "json";
    bool quiet = false;
};

int exit_code_for(error_code code) {
    return code == error_code::io ? exit_io : exit_failure;
}

scenario_model load_scenario(const std::string& path) { return parse_scenario(read_text_file(path)); }

void emit(const std::string& path, const std::string& contents, std::ostream& out, bool quiet) {
    if (!path.empty()) write_file_atomic(path, contents);
    else if (!quiet) out << contents;
}

std::vector<double> rate_grid(const std::vector<double>& rates, std::optional<double> lo, std::optional<double> hi,
                              std::optional<double> step) {
    if (!rates.empty()) return rates;
    if (!lo || !hi || !step) throw error(error_code::validation, "give --rates or all of --rate-min/--rate-max/--rate-step");
    if (!(*step > 0.0) || *hi < *lo) throw error(error_code::validation, "rate grid is empty");
    std::vector<double> out;
    const auto n = static_cast<std::size_t>(std::floor((*hi - *lo) / *step + 1e-9)) + 1;
    for (std::size_t i = 0; i < n; ++i) out.push_back(*lo + static_cast<double>(i) * *step);
    return out;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Discrete-event simulator for multi-tier queueing architectures", "tiersim"};
    app.require_subcommand(1);
    global_options global;
    app.add_option("--seed", global.seed, "Override the scenario's master seed");
    app.add_option("--format", global.format, "Output format for stdout")->check(CLI::IsMember({"json", "table"}));
    app.add_flag("--quiet", global.quiet, "Suppress stdout output");

    // validate
    auto* validate_cmd = app.add_subcommand("validate", "Check a scenario file");
    std::string validate_path;
    validate_cmd->add_option("scenario", validate_path, "Scenario JSON")->required();

    // run
    auto* run_cmd = app.add_subcommand("run", "Simulate a scenario and report metrics");
    std::string run_path, run_out, run_series, run_class;
    std::optional<std::int64_t> run_requests;
    std::optional<double> run_time, run_warmup, run_rate;
    run_cmd->add_option("scenario", run_path, "Scenario JSON")->required();
    auto* req_opt = run_cmd->add_option("--requests", run_requests, "Stop after N terminated requests");
    run_cmd->add_option("--time", run_time, "Stop at simulated time T")->excludes(req_opt);
    run_cmd->add_option("--warmup", run_warmup, "Discard samples that entered before this time");
    run_cmd->add_option("--rate", run_rate, "Replace a class's arrivals with Poisson(rate)");
    run_cmd->add_option("--class", run_class, "Class affected by --rate (default: first)");
    run_cmd->add_option("--out", run_out, "Write the JSON report here");
    run_cmd->add_option("--series", run_series, "Collect per-request series and write CSV here");

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "Run an arrival-rate grid with replications");
    std::string sweep_path, sweep_out, sweep_runs_out, sweep_class;
    std::vector<double> sweep_rates;
    std::optional<double> rate_min, rate_max, rate_step;
    std::size_t sweep_reps = 1;
    unsigned sweep_threads = 1;
    std::optional<std::int64_t> sweep_requests;
    sweep_cmd->add_option("scenario", sweep_path, "Scenario JSON")->required();
    sweep_cmd->add_option("--rates", sweep_rates, "Comma-separated arrival rates")->delimiter(',');
    sweep_cmd->add_option("--rate-min", rate_min);
    sweep_cmd->add_option("--rate-max", rate_max);
    sweep_cmd->add_option("--rate-step", rate_step);
    sweep_cmd->add_option("--replications", sweep_reps, "Replications per rate")->check(CLI::PositiveNumber);
    sweep_cmd->add_option("--class", sweep_class, "Class whose arrival rate is swept (default: first)");
    sweep_cmd->add_option("--requests", sweep_requests, "Stop each run after N terminated requests");
    sweep_cmd->add_option("--threads", sweep_threads, "Worker threads (0 = all cores)");
    sweep_cmd->add_option("--out", sweep_out, "Aggregated CSV output");
    sweep_cmd->add_option("--runs-out", sweep_runs_out, "Per-replication CSV output");

    // report
    auto* report_cmd = app.add_subcommand("report", "Render a saved JSON report");
    std::string report_path;
    bool bottlenecks = false;
    bottleneck_thresholds thresholds;
    report_cmd->add_option("report", report_path, "Report JSON written by `run --out`")->required();
    report_cmd->add_flag("--bottlenecks", bottlenecks, "Rank bottleneck resources");
    report_cmd->add_option("--drop-threshold", thresholds.drop, "Flag when p_drop >= this");
    report_cmd->add_option("--wait-threshold", thresholds.wait, "Flag when normalized waiting >= this");

    // oracle-check
    auto* oracle_cmd = app.add_subcommand("oracle-check", "Compare a simulated M/M/c/K station with the analytic solution");
    double lambda = 1.0, mu = 1.0;
    std::int64_t servers = 1, waiting = 0, oracle_requests = 100000;
    oracle_cmd->add_option("--lambda", lambda, "Arrival rate")->required();
    oracle_cmd->add_option("--mu", mu, "Service rate per server")->required();
    oracle_cmd->add_option("--servers,-c", servers, "Number of servers");
    oracle_cmd->add_option("--waiting,-K", waiting, "Waiting slots");
    oracle_cmd->add_option("--requests", oracle_requests, "Terminated requests to simulate");

    // synthesize
    auto* synth_cmd = app.add_subcommand("synthesize", "Build a scenario from execution and deployment files");
    std::string exec_path, deploy_path, synth_out, arrival_spec = "exp 1";
    workload_template wt;
    std::optional<std::int64_t> synth_requests;
    synth_cmd->add_option("--exec", exec_path, "Execution structure file")->required();
    synth_cmd->add_option("--deploy", deploy_path, "Deployment JSON")->required();
    synth_cmd->add_option("--arrival", arrival_spec, "Interarrival distribution, e.g. \"exp 40\"");
    synth_cmd->add_option("--requests", synth_requests, "Requests to generate and stop after");
    synth_cmd->add_option("--name", wt.scenario_name, "Scenario name");
    synth_cmd->add_option("--class", wt.class_name, "Workload class name");
    synth_cmd->add_flag("--series", wt.run.series_enabled, "Enable series collection in the scenario");
    synth_cmd->add_option("--out", synth_out, "Write the scenario JSON here");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_failure;
    }

    try {
        if (*validate_cmd) {
            const auto text = read_text_file(validate_path);
            try {
                parse_scenario(text);
            } catch (const error& e) {
                err << to_string(e.code()) << ": " << e.what() << "\n";
                return exit_code_for(e.code());
            }
            if (!global.quiet) out << "ok\n";
            return exit_ok;
        }

        if (*run_cmd) {
            auto model = load_scenario(run_path);
            if (run_rate) model = with_arrival_rate(model, run_class, *run_rate);
            if (global.seed) model.run.seed = *global.seed;
            if (run_requests) model.run.stop = stop_after_requests{*run_requests};
            if (run_time) model.run.stop = stop_after_time{*run_time};
            if (run_warmup) model.run.warmup = *run_warmup;
            if (!run_series.empty()) model.run.series_enabled = true;
            const auto report = run(model);
            if (!run_series.empty()) write_file_atomic(run_series, export_series(report));
            if (!run_out.empty()) write_file_atomic(run_out, to_json(report));
            if (!global.quiet) out << (global.format == "table" ? to_table(report) : to_json(report));
            return exit_ok;
        }

        if (*sweep_cmd) {
            auto model = load_scenario(sweep_path);
            if (global.seed) model.run.seed = *global.seed;
            if (sweep_requests) model.run.stop = stop_after_requests{*sweep_requests};
            sweep_options opts;
            opts.rates = rate_grid(sweep_rates, rate_min, rate_max, rate_step);
            opts.replications = sweep_reps;
            opts.class_name = sweep_class;
            opts.threads = sweep_threads;
            const auto result = sweep(model, opts);
            if (!sweep_runs_out.empty()) write_file_atomic(sweep_runs_out, runs_to_csv(result.runs));
            emit(sweep_out, to_csv(result.rows), out, global.quiet);
            return exit_ok;
        }

        if (*report_cmd) {
            const auto report = report_from_json(read_text_file(report_path));
            if (global.quiet) return exit_ok;
            if (bottlenecks) {
                const auto ranked = rank(report, thresholds);
                if (global.format == "table") {
                    out << to_table(ranked);
                } else {
                    nlohmann::ordered_json j;
                    j["thresholds"] = {{"drop", ranked.thresholds.drop}, {"wait", ranked.thresholds.wait}};
                    j["entries"] = nlohmann::ordered_json::array();
                    for (const auto& e : ranked.entries)
                        j["entries"].push_back({{"resource", e.resource},
                                                {"score", e.score},
                                                {"avg_waiting", e.avg_waiting},
                                                {"normalized_waiting", e.normalized_waiting},
                                                {"p_drop", e.p_drop},
                                                {"flagged", e.flagged}});
                    out << j.dump(2) << "\n";
                }
            } else {
                out << (global.format == "table" ? to_table(report) : to_json(report));
            }
            return exit_ok;
        }

        if (*oracle_cmd) {
            const auto result = oracle_check(lambda, mu, servers, waiting, oracle_requests, global.seed.value_or(1));
            if (global.quiet) return exit_ok;
            if (global.format == "table") {
                out << to_table(result);
            } else {
                nlohmann::ordered_json j = nlohmann::ordered_json::array();
                for (const auto& r : result.rows)
                    j.push_back({{"metric", r.metric},
                                 {"simulated", r.simulated},
                                 {"analytic", r.analytic},
                                 {"relative_error", r.relative_error}});
                out << j.dump(2) << "\n";
            }
            return exit_ok;
        }

        if (*synth_cmd) {
            const auto exec = parse_execution(read_text_file(exec_path));
            const auto deploy = parse_deployment(read_text_file(deploy_path));
            wt.arrival = parse_distribution_spec(arrival_spec);
            if (synth_requests) {
                wt.max_requests = *synth_requests;
                wt.run.stop = stop_after_requests{*synth_requests};
            }
            if (global.seed) wt.run.seed = *global.seed;
            const auto model = synthesize_scenario(exec, deploy, wt);
            emit(synth_out, serialize(model), out, global.quiet);
            return exit_ok;
        }
    } catch (const error& e) {
        err << to_string(e.code()) << ": " << e.what() << "\n";
        return exit_code_for(e.code());
    }
    return exit_failure;
}

}  // namespace tiersim
