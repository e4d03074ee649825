#include <optional>
#include <string>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tiersim/bottleneck.hpp"
#include "tiersim/engine.hpp"
#include "tiersim/error.hpp"
#include "tiersim/experiments.hpp"
#include "tiersim/io.hpp"
#include "tiersim/metrics.hpp"
#include "tiersim/model.hpp"
#include "tiersim/oracle.hpp"
#include "tiersim/spe_frontend.hpp"

namespace py = pybind11;
using namespace tiersim;

namespace {

metrics_report run_scenario(const scenario_model& model, std::optional<std::uint64_t> seed,
                            std::optional<std::int64_t> requests, bool series) {
    scenario_model m = model;
    if (seed) m.run.seed = *seed;
    if (requests) m.run.stop = stop_after_requests{*requests};
    if (series) m.run.series_enabled = true;
    py::gil_scoped_release release;
    return run(m);
}

std::vector<std::string> resource_names(const scenario_model& m) {
    std::vector<std::string> out;
    for (const auto* r : m.resources()) out.push_back(r->name);
    return out;
}

}  // namespace

PYBIND11_MODULE(_tiersim, m) {
    m.doc() = "Discrete-event simulator for multi-tier queueing architectures";

    static py::exception<error> exc(m, "TiersimError", PyExc_ValueError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const error& e) {
            py::set_error(exc, (std::string(to_string(e.code())) + ": " + e.what()).c_str());
        }
    });

    py::class_<scenario_model>(m, "Scenario")
        .def_readonly("name", &scenario_model::name)
        .def_property_readonly("resource_names", &resource_names)
        .def_property_readonly("seed", [](const scenario_model& s) { return s.run.seed; })
        .def("to_json", &serialize)
        .def("__eq__", [](const scenario_model& a, const scenario_model& b) { return a == b; })
        .def("__repr__", [](const scenario_model& s) { return "<Scenario '" + s.name + "'>"; });

    py::class_<resource_metrics>(m, "ResourceMetrics")
        .def_readonly("name", &resource_metrics::name)
        .def_readonly("replicas", &resource_metrics::replicas)
        .def_readonly("avg_response", &resource_metrics::avg_response)
        .def_readonly("avg_service", &resource_metrics::avg_service)
        .def_readonly("avg_waiting", &resource_metrics::avg_waiting)
        .def_readonly("utilization", &resource_metrics::utilization)
        .def_readonly("p_idle", &resource_metrics::p_idle)
        .def_readonly("p_drop", &resource_metrics::p_drop)
        .def_readonly("mean_in_system", &resource_metrics::mean_in_system)
        .def_readonly("throughput", &resource_metrics::throughput)
        .def_readonly("offered", &resource_metrics::offered)
        .def_readonly("served", &resource_metrics::served)
        .def_readonly("dropped", &resource_metrics::dropped);

    py::class_<class_metrics>(m, "ClassMetrics")
        .def_readonly("name", &class_metrics::name)
        .def_readonly("generated", &class_metrics::generated)
        .def_readonly("completed", &class_metrics::completed)
        .def_readonly("dropped", &class_metrics::dropped)
        .def_readonly("mean_response", &class_metrics::mean_response)
        .def_readonly("p50_response", &class_metrics::p50_response)
        .def_readonly("p95_response", &class_metrics::p95_response)
        .def_readonly("p99_response", &class_metrics::p99_response);

    py::class_<metrics_report>(m, "MetricsReport")
        .def_readonly("scenario", &metrics_report::scenario)
        .def_readonly("seed", &metrics_report::seed)
        .def_readonly("elapsed", &metrics_report::elapsed)
        .def_readonly("generated", &metrics_report::generated)
        .def_readonly("completed", &metrics_report::completed)
        .def_readonly("dropped", &metrics_report::dropped)
        .def_readonly("in_flight", &metrics_report::in_flight)
        .def_readonly("resources", &metrics_report::resources)
        .def_readonly("classes", &metrics_report::classes)
        .def("resource", [](const metrics_report& r, const std::string& name) {
            const auto* found = r.find(name);
            if (!found) throw py::key_error(name);
            return *found;
        })
        .def("to_json", [](const metrics_report& r) { return to_json(r); })
        .def("to_table", [](const metrics_report& r) { return to_table(r); })
        .def("series_csv", [](const metrics_report& r) { return export_series(r); });

    py::class_<analytic_metrics>(m, "AnalyticMetrics")
        .def_readonly("rho", &analytic_metrics::rho)
        .def_readonly("p_n", &analytic_metrics::p_n)
        .def_readonly("p_block", &analytic_metrics::p_block)
        .def_readonly("util", &analytic_metrics::util)
        .def_readonly("p_all_idle", &analytic_metrics::p_all_idle)
        .def_readonly("mean_in_system", &analytic_metrics::mean_in_system)
        .def_readonly("mean_queue", &analytic_metrics::mean_queue)
        .def_readonly("mean_wait", &analytic_metrics::mean_wait)
        .def_readonly("mean_response", &analytic_metrics::mean_response)
        .def_readonly("lambda_eff", &analytic_metrics::lambda_eff);

    py::class_<bottleneck_entry>(m, "BottleneckEntry")
        .def_readonly("resource", &bottleneck_entry::resource)
        .def_readonly("score", &bottleneck_entry::score)
        .def_readonly("avg_waiting", &bottleneck_entry::avg_waiting)
        .def_readonly("normalized_waiting", &bottleneck_entry::normalized_waiting)
        .def_readonly("p_drop", &bottleneck_entry::p_drop)
        .def_readonly("flagged", &bottleneck_entry::flagged);

    py::class_<bottleneck_report>(m, "BottleneckReport")
        .def_readonly("entries", &bottleneck_report::entries)
        .def_property_readonly("flagged", &bottleneck_report::flagged);

    m.def("parse_scenario", &parse_scenario, py::arg("text"));
    m.def("load_scenario", [](const std::string& path) { return parse_scenario(read_text_file(path)); },
          py::arg("path"));
    m.def(
        "validate",
        [](const scenario_model& s) {
            std::vector<std::pair<std::string, std::string>> out;
            for (const auto& issue : validate(s)) out.emplace_back(issue.path, issue.message);
            return out;
        },
        py::arg("scenario"));
    m.def("run", &run_scenario, py::arg("scenario"), py::arg("seed") = py::none(), py::arg("requests") = py::none(),
          py::arg("series") = false);
    m.def("report_from_json", &report_from_json, py::arg("text"));
    m.def("mmck", &mmck, py::arg("lam"), py::arg("mu"), py::arg("servers") = 1, py::arg("waiting") = 0);
    m.def(
        "rank_bottlenecks",
        [](const metrics_report& r, double drop, double wait) { return rank(r, bottleneck_thresholds{drop, wait}); },
        py::arg("report"), py::arg("drop_threshold") = 0.5, py::arg("wait_threshold") = 0.5);
    m.def(
        "synthesize",
        [](const std::string& exec_text, const std::string& deploy_text, const std::string& arrival,
           std::optional<std::int64_t> requests, const std::string& name, std::uint64_t seed) {
            workload_template wt;
            wt.scenario_name = name;
            wt.arrival = parse_distribution_spec(arrival);
            wt.run.seed = seed;
            if (requests) {
                wt.max_requests = *requests;
                wt.run.stop = stop_after_requests{*requests};
            }
            return synthesize_scenario(parse_execution(exec_text), parse_deployment(deploy_text), wt);
        },
        py::arg("exec_text"), py::arg("deploy_text"), py::arg("arrival") = "exp 1", py::arg("requests") = py::none(),
        py::arg("name") = "synthesized", py::arg("seed") = 1);
    m.def(
        "oracle_check",
        [](double lam, double mu, std::int64_t c, std::int64_t k, std::int64_t requests, std::uint64_t seed) {
            const auto result = oracle_check(lam, mu, c, k, requests, seed);
            py::dict out;
            for (const auto& row : result.rows)
                out[py::str(row.metric)] = py::make_tuple(row.simulated, row.analytic, row.relative_error);
            return out;
        },
        py::arg("lam"), py::arg("mu"), py::arg("servers") = 1, py::arg("waiting") = 0,
        py::arg("requests") = 100000, py::arg("seed") = 1);
}
