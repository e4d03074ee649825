#pragma once

// Builds a scenario from a sequence-diagram-like execution structure and a
// deployment mapping.
//
// Execution file, one step per line ('#' starts a comment line):
//
//     <from> -> <to> : <label> [<dist> <params...>] [@cpu=[<dist> ...]] [@disk[=[<dist> ...]]]
//
// where <dist> is `exp <rate>`, `det <seconds>` or `uniform <lo> <hi>`. The
// bracketed demand is the step's message demand; it is charged on the network
// link when the step crosses nodes, and on the destination CPU unless @cpu=
// overrides it. A bare @disk adds a disk visit with the step's demand.
//
// Deployment file (JSON):
//
//     { "bindings": { participant: node, ... },
//       "nodes":    { node: [resource, ...], ... },
//       "links":    [ { "between": [node, node], "resource": resource }, ... ] }
//
// A resource is a name or {name, replicas, queue_capacity, balancer}. The
// first resource of a node is its CPU; the second, if present, its disk.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tiersim/model.hpp"

namespace tiersim {

struct execution_step {
    std::string from;
    std::string to;
    std::string label;
    distribution demand;
    std::optional<distribution> cpu_demand;
    bool disk = false;
    std::optional<distribution> disk_demand;
    std::size_t line = 0;

    bool operator==(const execution_step&) const = default;
};

struct execution_structure {
    std::vector<execution_step> steps;
};

struct deployment_node {
    std::string name;
    std::vector<resource_spec> resources;
};

struct deployment_link {
    std::string a;
    std::string b;
    resource_spec resource;
};

struct deployment_map {
    std::map<std::string, std::string> bindings;  // participant -> node
    std::vector<deployment_node> nodes;           // declaration order
    std::vector<deployment_link> links;

    const deployment_node* find_node(std::string_view name) const;
    // Links are undirected.
    const deployment_link* find_link(std::string_view a, std::string_view b) const;
};

struct workload_template {
    std::string scenario_name = "synthesized";
    std::string class_name = "requests";
    distribution arrival = exponential{1.0};
    std::optional<std::int64_t> max_requests;
    run_config run;
};

// Throws error(syntax) with the 1-based line number.
execution_structure parse_execution(std::string_view text);

// Throws error(syntax) for malformed JSON, error(validation) for schema
// errors, bindings to undeclared nodes, nodes without resources, and links
// whose endpoints are not declared nodes.
deployment_map parse_deployment(std::string_view text);

// Walks the steps in order. A step whose endpoints sit on different nodes
// first visits the link between them, then the destination node's CPU and,
// with @disk, its disk. Tiers: one per node, plus "network" for links.
// Throws error(validation) for unbound participants, missing links, or a
// @disk step landing on a node without a disk.
scenario_model synthesize_scenario(const execution_structure& exec, const deployment_map& deploy,
                                   const workload_template& workload);

// Parses "exp 12.5", "det 0.5", "uniform 1 2".
distribution parse_distribution_spec(std::string_view text);

}  // namespace tiersim
