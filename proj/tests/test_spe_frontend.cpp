#include <doctest.h>

#include <random>
#include <set>

#include "support/fixtures.hpp"
#include "tiersim/error.hpp"
#include "tiersim/spe_frontend.hpp"

using namespace tiersim;
using tiersim::testing::read_source;

namespace {

template <class Fn>
std::pair<error_code, std::string> failure(Fn fn) {
    try {
        fn();
    } catch (const error& e) {
        return {e.code(), e.what()};
    }
    FAIL("expected an error");
    return {error_code::internal, {}};
}

std::vector<std::string> path_of(const scenario_model& m) {
    std::vector<std::string> out;
    for (const auto& v : m.classes.at(0).path) out.push_back(v.resource);
    return out;
}

constexpr const char* two_nodes = R"({
  "bindings": {"a": "n1", "b": "n2"},
  "nodes": {"n1": ["cpu1", "disk1"], "n2": ["cpu2", "disk2"]},
  "links": [{"between": ["n2", "n1"], "resource": "lan"}]
})";

}  // namespace

TEST_CASE("one step transcribes directly") {
    const auto e = parse_execution("requester -> broker : find [exp 12.5]\n");
    REQUIRE(e.steps.size() == 1);
    CHECK(e.steps[0].from == "requester");
    CHECK(e.steps[0].to == "broker");
    CHECK(e.steps[0].label == "find");
    CHECK(e.steps[0].demand == distribution{exponential{12.5}});
    CHECK_FALSE(e.steps[0].disk);
}

TEST_CASE("step annotations") {
    const auto e = parse_execution(
        "# comment\n"
        "\n"
        "a -> b : read [det 0.5] @disk\n"
        "b -> a : reply [uniform 1 2] @cpu=[exp 3] @disk=[det 0.25]\n");
    REQUIRE(e.steps.size() == 2);
    CHECK(e.steps[0].line == 3);
    CHECK(e.steps[0].demand == distribution{deterministic{0.5}});
    CHECK(e.steps[0].disk);
    CHECK_FALSE(e.steps[0].disk_demand);
    CHECK(e.steps[1].demand == distribution{uniform{1.0, 2.0}});
    CHECK(e.steps[1].cpu_demand == distribution{exponential{3.0}});
    CHECK(e.steps[1].disk_demand == distribution{deterministic{0.25}});
}

TEST_CASE("malformed steps are syntax errors with line numbers") {
    const auto [code, msg] = failure([] { parse_execution("a -> b : ok [exp 1]\na => b : bad [exp 1]\n"); });
    CHECK(code == error_code::syntax);
    CHECK(msg.find("line 2") != std::string::npos);
    CHECK(failure([] { parse_execution("a -> b : x [exp 0]"); }).first == error_code::syntax);
    CHECK(failure([] { parse_execution("a -> b : x [gamma 1]"); }).first == error_code::syntax);
    CHECK(failure([] { parse_execution("a -> b : x"); }).first == error_code::syntax);
    CHECK(failure([] { parse_execution("a -> b : x [exp 1] @gpu"); }).first == error_code::syntax);
}

TEST_CASE("bundled exchange has four steps and seven resources") {
    const auto e = parse_execution(read_source("scenarios/webservices.seq"));
    CHECK(e.steps.size() == 4);
    const auto d = parse_deployment(read_source("scenarios/webservices.deploy.json"));
    CHECK(d.nodes.size() == 3);
    std::set<std::string> resources;
    for (const auto& n : d.nodes)
        for (const auto& r : n.resources) resources.insert(r.name);
    for (const auto& l : d.links) resources.insert(l.resource.name);
    CHECK(resources == std::set<std::string>{"SRS_CPU", "Internet1", "SB_CPU", "SB_Disk", "Internet2", "SP_CPU",
                                             "SP_Disk"});
}

TEST_CASE("synthesized web-services path reaches all seven resources and matches the bundled scenario") {
    const auto e = parse_execution(read_source("scenarios/webservices.seq"));
    const auto d = parse_deployment(read_source("scenarios/webservices.deploy.json"));
    const auto m = synthesize_scenario(e, d, {});
    CHECK(validate(m).empty());
    const auto path = path_of(m);
    CHECK(path == std::vector<std::string>{"Internet1", "SB_CPU", "SB_Disk", "Internet1", "SRS_CPU", "Internet2",
                                           "SP_CPU", "SP_Disk", "Internet2", "SRS_CPU"});
    const auto bundled = parse_scenario(read_source("scenarios/webservices.json"));
    CHECK(path_of(bundled) == path);
    for (std::size_t i = 0; i < path.size(); ++i)
        CHECK(bundled.classes[0].path[i].demand == m.classes[0].path[i].demand);
}

TEST_CASE("a step inside one node visits only that node's CPU") {
    const auto d = parse_deployment(R"({"bindings": {"a": "box", "b": "box"}, "nodes": {"box": ["cpu"]}, "links": {}})");
    const auto m = synthesize_scenario(parse_execution("a -> b : local [exp 2]"), d, {});
    CHECK(path_of(m) == std::vector<std::string>{"cpu"});
    CHECK(m.tiers.size() == 1);
}

TEST_CASE("deployment without links is valid") {
    const auto d = parse_deployment(R"({"bindings": {"a": "box"}, "nodes": {"box": ["cpu"]}})");
    CHECK(d.links.empty());
}

TEST_CASE("links are undirected and precede the destination's resources") {
    const auto d = parse_deployment(two_nodes);
    CHECK(d.find_link("n1", "n2") == d.find_link("n2", "n1"));
    const auto m = synthesize_scenario(parse_execution("a -> b : go [exp 4] @disk\nb -> a : back [exp 5]"), d, {});
    CHECK(path_of(m) == std::vector<std::string>{"lan", "cpu2", "disk2", "lan", "cpu1"});
    CHECK(m.tiers.back().name == "network");
}

TEST_CASE("synthesis errors") {
    SUBCASE("participant without a binding") {
        const auto d = parse_deployment(two_nodes);
        const auto [code, msg] = failure([&] { synthesize_scenario(parse_execution("a -> ghost : x [exp 1]"), d, {}); });
        CHECK(code == error_code::validation);
        CHECK(msg.find("ghost") != std::string::npos);
    }
    SUBCASE("missing link names both nodes") {
        const auto d = parse_deployment(R"({"bindings": {"a": "n1", "b": "n2"}, "nodes": {"n1": ["c1"], "n2": ["c2"]}})");
        const auto [code, msg] = failure([&] { synthesize_scenario(parse_execution("a -> b : x [exp 1]"), d, {}); });
        CHECK(code == error_code::validation);
        CHECK(msg.find("n1") != std::string::npos);
        CHECK(msg.find("n2") != std::string::npos);
    }
    SUBCASE("disk step on a node without a disk") {
        const auto d = parse_deployment(R"({"bindings": {"a": "n"}, "nodes": {"n": ["c"]}})");
        CHECK(failure([&] { synthesize_scenario(parse_execution("a -> a : x [exp 1] @disk"), d, {}); }).first ==
              error_code::validation);
    }
}

TEST_CASE("deployment schema errors") {
    CHECK(failure([] { parse_deployment("{"); }).first == error_code::syntax);
    CHECK(failure([] { parse_deployment(R"({"bindings": {"a": "nowhere"}, "nodes": {"n": ["c"]}})"); }).first ==
          error_code::validation);
    CHECK(failure([] { parse_deployment(R"({"bindings": {}, "nodes": {"n": []}})"); }).first ==
          error_code::validation);
    CHECK(failure([] {
              parse_deployment(
                  R"({"bindings": {}, "nodes": {"n": ["c"]}, "links": [{"between": ["n", "m"], "resource": "l"}]})");
          }).first == error_code::validation);
    CHECK(failure([] { parse_deployment(R"({"bindings": {}, "nodes": {"n": ["c"]}, "extra": 1})"); }).first ==
          error_code::validation);
}

TEST_CASE("path length equals crossings plus declared processing visits") {
    std::mt19937_64 g(7);
    const auto d = parse_deployment(R"({
      "bindings": {"p0": "n0", "p1": "n1", "p2": "n2", "p3": "n0"},
      "nodes": {"n0": ["c0", "d0"], "n1": ["c1", "d1"], "n2": ["c2", "d2"]},
      "links": [{"between": ["n0", "n1"], "resource": "l01"},
                {"between": ["n1", "n2"], "resource": "l12"},
                {"between": ["n0", "n2"], "resource": "l02"}]
    })");
    const char* node_of[] = {"n0", "n1", "n2", "n0"};
    for (int trial = 0; trial < 200; ++trial) {
        const int steps = 1 + static_cast<int>(g() % 8);
        std::string text;
        std::size_t expected = 0;
        for (int s = 0; s < steps; ++s) {
            const auto from = g() % 4, to = g() % 4;
            const bool disk = g() % 2 == 0;
            text += "p" + std::to_string(from) + " -> p" + std::to_string(to) + " : m [exp 3]" +
                    (disk ? " @disk" : "") + "\n";
            expected += (std::string(node_of[from]) != node_of[to]) + 1 + (disk ? 1 : 0);
        }
        const auto m = synthesize_scenario(parse_execution(text), d, {});
        CHECK(m.classes[0].path.size() == expected);
        CHECK(validate(m).empty());
    }
}

TEST_CASE("distribution specs") {
    CHECK(parse_distribution_spec("exp 40") == distribution{exponential{40.0}});
    CHECK(parse_distribution_spec("exponential 2") == distribution{exponential{2.0}});
    CHECK(parse_distribution_spec("det 0.5") == distribution{deterministic{0.5}});
    CHECK(parse_distribution_spec("uniform 1 3") == distribution{uniform{1.0, 3.0}});
    CHECK_THROWS_AS(parse_distribution_spec("exp"), error);
}
