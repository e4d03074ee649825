#include <doctest.h>

#include <filesystem>
#include <random>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "support/fixtures.hpp"
#include "tiersim/cli.hpp"
#include "tiersim/engine.hpp"
#include "tiersim/experiments.hpp"
#include "tiersim/io.hpp"

using namespace tiersim;
using tiersim::testing::source_path;
namespace fs = std::filesystem;

namespace {

struct result {
    int code;
    std::string out;
    std::string err;
};

result cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

struct scratch_dir {
    fs::path path;
    scratch_dir() {
        path = fs::temp_directory_path() / ("tiersim_cli_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~scratch_dir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

std::vector<std::string> csv_lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream in(line);
    for (std::string cell; std::getline(in, cell, ',');) out.push_back(cell);
    return out;
}

}  // namespace

TEST_CASE("validate exit codes") {
    const auto ok = cli({"validate", source_path("scenarios/webservices.json")});
    CHECK(ok.code == 0);
    CHECK(ok.out == "ok\n");

    const auto missing = cli({"validate", source_path("scenarios/does_not_exist.json")});
    CHECK(missing.code == 2);
    CHECK(missing.err.find("IO_ERROR") != std::string::npos);

    scratch_dir dir;
    auto bad = tiersim::testing::minimal_model();
    write_file_atomic(dir.file("bad.json"), serialize(bad));
    std::string text = read_text_file(dir.file("bad.json"));
    text.replace(text.find("\"replicas\": 1"), 13, "\"replicas\": 0");
    write_file_atomic(dir.file("bad.json"), text);
    const auto invalid = cli({"validate", dir.file("bad.json")});
    CHECK(invalid.code == 1);
    CHECK(invalid.err.find("VALIDATION_ERROR") != std::string::npos);
    CHECK(invalid.err.find("tiers[0].resources[0]") != std::string::npos);

    CHECK(cli({"frobnicate"}).code == 1);
}

TEST_CASE("run emits the seven-resource report deterministically") {
    const auto a = cli({"run", source_path("scenarios/webservices.json"), "--requests", "1000"});
    REQUIRE(a.code == 0);
    const auto j = nlohmann::json::parse(a.out);
    CHECK(j["resources"].size() == 7);
    for (const char* name : {"SRS_CPU", "Internet1", "SB_CPU", "SB_Disk", "Internet2", "SP_CPU", "SP_Disk"}) {
        CAPTURE(name);
        REQUIRE(j["resources"].contains(name));
        for (const char* metric : {"avg_response", "avg_service", "avg_waiting", "p_idle", "p_drop"})
            CHECK(j["resources"][name][metric].is_number());
    }
    const auto b = cli({"run", source_path("scenarios/webservices.json"), "--requests", "1000"});
    CHECK(a.out == b.out);
    const auto c = cli({"--seed", "2", "run", source_path("scenarios/webservices.json"), "--requests", "1000"});
    CHECK(c.out != a.out);
}

TEST_CASE("run writes report and series files") {
    scratch_dir dir;
    const auto r = cli({"--quiet", "run", source_path("scenarios/mm1k.json"), "--requests", "200", "--out",
                        dir.file("report.json"), "--series", dir.file("series.csv")});
    REQUIRE(r.code == 0);
    CHECK(r.out.empty());
    const auto series = read_text_file(dir.file("series.csv"));
    CHECK(series.rfind("resource,arrival_time,response_time\n", 0) == 0);
    const auto report = read_text_file(dir.file("report.json"));
    const auto rendered = cli({"report", dir.file("report.json")});
    CHECK(rendered.code == 0);
    CHECK(rendered.out == report);
    const auto table = cli({"--format", "table", "report", dir.file("report.json")});
    CHECK(table.out.find("station") != std::string::npos);
}

TEST_CASE("unwritable output is an I/O failure") {
    const auto r = cli({"run", source_path("scenarios/mm1k.json"), "--requests", "10", "--out",
                        "/nonexistent_dir_for_tiersim/report.json"});
    CHECK(r.code == 2);
}

TEST_CASE("report --bottlenecks flags the saturated resources") {
    scratch_dir dir;
    REQUIRE(cli({"--quiet", "run", source_path("scenarios/webservices.json"), "--out", dir.file("r.json")}).code ==
            0);
    const auto r = cli({"report", dir.file("r.json"), "--bottlenecks"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    std::set<std::string> flagged;
    for (const auto& e : j["entries"])
        if (e["flagged"].get<bool>()) flagged.insert(e["resource"].get<std::string>());
    CHECK(flagged == std::set<std::string>{"Internet1", "Internet2", "SP_Disk"});
    const auto none = cli({"report", dir.file("r.json"), "--bottlenecks", "--drop-threshold", "1.1",
                           "--wait-threshold", "1.1"});
    CHECK(nlohmann::json::parse(none.out)["entries"][0]["flagged"] == false);
}

TEST_CASE("a one-point sweep equals the matching run") {
    scratch_dir dir;
    const auto s = cli({"sweep", source_path("scenarios/mm1k.json"), "--rates", "1.5", "--requests", "5000",
                        "--runs-out", dir.file("runs.csv")});
    REQUIRE(s.code == 0);
    const auto runs = csv_lines(read_text_file(dir.file("runs.csv")));
    REQUIRE(runs.size() == 2);
    const auto cells = split(runs[1]);
    const std::string seed = cells[2];
    CHECK(seed == std::to_string(sweep_seed(7, 0, 0)));

    const auto r = cli({"--seed", seed, "run", source_path("scenarios/mm1k.json"), "--rate", "1.5", "--requests",
                        "5000"});
    const auto j = nlohmann::json::parse(r.out)["resources"]["station"];
    const auto row = split(csv_lines(s.out)[1]);
    CHECK(std::stod(row[3]) == j["utilization"].get<double>());
    CHECK(std::stod(row[4]) == j["p_idle"].get<double>());
    CHECK(std::stod(row[5]) == j["p_drop"].get<double>());
    CHECK(std::stod(row[9]) == j["avg_response"].get<double>());
    CHECK(std::stod(row[10]) == j["avg_service"].get<double>());
    CHECK(std::stod(row[11]) == j["avg_waiting"].get<double>());
}

TEST_CASE("sweep aggregates lie between replication extremes and ignore thread count") {
    const auto one = cli({"sweep", source_path("scenarios/mm1k.json"), "--rates", "0.5,1.25,2.0", "--replications",
                          "3", "--requests", "3000"});
    REQUIRE(one.code == 0);
    const auto many = cli({"sweep", source_path("scenarios/mm1k.json"), "--rates", "0.5,1.25,2.0", "--replications",
                           "3", "--requests", "3000", "--threads", "4"});
    CHECK(one.out == many.out);
    const auto lines = csv_lines(one.out);
    REQUIRE(lines.size() == 4);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto c = split(lines[i]);
        const double mean = std::stod(c[5]), lo = std::stod(c[6]), hi = std::stod(c[7]);
        CHECK(lo <= mean);
        CHECK(mean <= hi);
    }
    const auto grid = cli({"sweep", source_path("scenarios/mm1k.json"), "--rate-min", "0.5", "--rate-max", "2.0",
                           "--rate-step", "0.75", "--replications", "3", "--requests", "3000"});
    CHECK(grid.out == one.out);
}

TEST_CASE("oracle-check") {
    const auto ok = cli({"oracle-check", "--lambda", "1", "--mu", "2", "-c", "1", "-K", "3", "--requests", "1000"});
    REQUIRE(ok.code == 0);
    CHECK(nlohmann::json::parse(ok.out).size() == 5);

    const auto idle = cli({"oracle-check", "--lambda", "0", "--mu", "2", "-K", "3", "--requests", "1000"});
    REQUIRE(idle.code == 0);
    for (const auto& row : nlohmann::json::parse(idle.out)) {
        CAPTURE(row.dump());
        const auto metric = row["metric"].get<std::string>();
        const double expected = metric == "p_idle" ? 1.0 : 0.0;
        CHECK(row["simulated"].get<double>() == expected);
        CHECK(row["analytic"].get<double>() == expected);
        CHECK(row["relative_error"].get<double>() == 0.0);
    }

    const auto bad = cli({"oracle-check", "--lambda", "1", "--mu", "0"});
    CHECK(bad.code == 1);
    CHECK(bad.err.find("DOMAIN_ERROR") != std::string::npos);
}

TEST_CASE("synthesize reproduces the bundled scenario") {
    const auto r = cli({"synthesize", "--exec", source_path("scenarios/webservices.seq"), "--deploy",
                        source_path("scenarios/webservices.deploy.json"), "--arrival", "exp 40", "--requests", "1000",
                        "--name", "webservices", "--class", "web", "--series"});
    REQUIRE(r.code == 0);
    const auto synthesized = parse_scenario(r.out);
    const auto bundled = parse_scenario(tiersim::testing::read_source("scenarios/webservices.json"));
    CHECK(synthesized.classes == bundled.classes);
    CHECK(synthesized.run == bundled.run);
    // Same resources with the same settings; only the tier grouping differs.
    REQUIRE(synthesized.resources().size() == bundled.resources().size());
    for (const auto* res : synthesized.resources()) {
        CAPTURE(res->name);
        const auto* twin = bundled.find_resource(res->name);
        REQUIRE(twin != nullptr);
        CHECK(*twin == *res);
    }
}
