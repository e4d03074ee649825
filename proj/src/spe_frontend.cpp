#include "tiersim/spe_frontend.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <set>

#include "json_schema.hpp"
#include "tiersim/error.hpp"

namespace tiersim {

const deployment_node* deployment_map::find_node(std::string_view name) const {
    for (const auto& n : nodes)
        if (n.name == name) return &n;
    return nullptr;
}

const deployment_link* deployment_map::find_link(std::string_view a, std::string_view b) const {
    for (const auto& l : links)
        if ((l.a == a && l.b == b) || (l.a == b && l.b == a)) return &l;
    return nullptr;
}

namespace {

[[noreturn]] void validation_fail(const std::string& msg) { throw error(error_code::validation, msg); }

[[noreturn]] void syntax_fail(std::size_t line, const std::string& msg) {
    throw error(error_code::syntax, "line " + std::to_string(line) + ": " + msg);
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        const std::size_t start = i;
        while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        if (i > start) out.push_back(s.substr(start, i - start));
    }
    return out;
}

std::optional<double> to_double(std::string_view s) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

// Cursor over one execution line.
class line_scanner {
public:
    line_scanner(std::string_view text, std::size_t line) : rest_(text), line_(line) {}

    void skip_ws() {
        while (!rest_.empty() && std::isspace(static_cast<unsigned char>(rest_.front()))) rest_.remove_prefix(1);
    }
    bool done() {
        skip_ws();
        return rest_.empty();
    }
    bool consume(std::string_view token) {
        skip_ws();
        if (rest_.substr(0, token.size()) != token) return false;
        rest_.remove_prefix(token.size());
        return true;
    }
    void expect(std::string_view token, const char* what) {
        if (!consume(token)) syntax_fail(line_, std::string("expected ") + what);
    }
    std::string identifier(const char* what) {
        skip_ws();
        std::size_t n = 0;
        while (n < rest_.size() && (std::isalnum(static_cast<unsigned char>(rest_[n])) || rest_[n] == '_' ||
                                    rest_[n] == '.'))
            ++n;
        if (n == 0) syntax_fail(line_, std::string("expected ") + what);
        std::string out(rest_.substr(0, n));
        rest_.remove_prefix(n);
        return out;
    }
    std::string_view until(char stop) {
        const auto pos = rest_.find(stop);
        const auto out = rest_.substr(0, pos);
        rest_.remove_prefix(pos == std::string_view::npos ? rest_.size() : pos);
        return out;
    }
    distribution bracketed_distribution() {
        expect("[", "'[' opening a demand");
        const auto body = until(']');
        expect("]", "']' closing a demand");
        try {
            return parse_distribution_spec(body);
        } catch (const error& e) {
            syntax_fail(line_, e.what());
        }
    }

private:
    std::string_view rest_;
    std::size_t line_;
};

execution_step parse_step(std::string_view text, std::size_t line) {
    line_scanner sc(text, line);
    execution_step step;
    step.line = line;
    step.from = sc.identifier("a sender participant");
    sc.expect("->", "'->' after the sender");
    step.to = sc.identifier("a receiver participant");
    sc.expect(":", "':' before the message label");
    step.label = std::string(trim(sc.until('[')));
    if (step.label.empty()) syntax_fail(line, "empty message label");
    step.demand = sc.bracketed_distribution();

    while (!sc.done()) {
        if (sc.consume("@cpu")) {
            if (step.cpu_demand) syntax_fail(line, "duplicate @cpu tag");
            sc.expect("=", "'=' after @cpu");
            step.cpu_demand = sc.bracketed_distribution();
        } else if (sc.consume("@disk")) {
            if (step.disk) syntax_fail(line, "duplicate @disk tag");
            step.disk = true;
            if (sc.consume("=")) step.disk_demand = sc.bracketed_distribution();
        } else {
            syntax_fail(line, "unexpected trailing text");
        }
    }
    return step;
}

}  // namespace

distribution parse_distribution_spec(std::string_view text) {
    const auto tokens = split_ws(text);
    auto fail = [&](const std::string& msg) -> distribution {
        throw error(error_code::syntax, "demand '" + std::string(trim(text)) + "': " + msg);
    };
    if (tokens.empty()) return fail("missing distribution");
    std::vector<double> params;
    for (std::size_t i = 1; i < tokens.size(); ++i) {
        const auto v = to_double(tokens[i]);
        if (!v) return fail("'" + std::string(tokens[i]) + "' is not a number");
        params.push_back(*v);
    }
    const auto kind = tokens[0];
    if (kind == "exp" || kind == "exponential") {
        if (params.size() != 1) return fail("exp takes one rate");
        if (!(params[0] > 0.0) || !std::isfinite(params[0])) return fail("rate must be positive and finite");
        return exponential{params[0]};
    }
    if (kind == "det" || kind == "deterministic") {
        if (params.size() != 1) return fail("det takes one value");
        if (!(params[0] >= 0.0) || !std::isfinite(params[0])) return fail("value must be non-negative and finite");
        return deterministic{params[0]};
    }
    if (kind == "uniform") {
        if (params.size() != 2) return fail("uniform takes lo and hi");
        if (!(params[0] >= 0.0 && params[0] <= params[1]) || !std::isfinite(params[1]))
            return fail("bounds must satisfy 0 <= lo <= hi");
        return uniform{params[0], params[1]};
    }
    return fail("unknown distribution '" + std::string(kind) + "'");
}

execution_structure parse_execution(std::string_view text) {
    execution_structure out;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        auto line = text.substr(0, nl);
        text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
        ++line_no;
        line = trim(line);
        if (line.empty() || line.front() == '#') continue;
        out.steps.push_back(parse_step(line, line_no));
    }
    if (out.steps.empty()) throw error(error_code::syntax, "execution structure has no steps");
    return out;
}

deployment_map parse_deployment(std::string_view text) {
    using detail::ordered_json;
    using detail::schema_fail;
    ordered_json root;
    try {
        root = ordered_json::parse(text.begin(), text.end());
    } catch (const nlohmann::json::parse_error& e) {
        throw error(error_code::syntax, std::string("malformed deployment JSON: ") + e.what());
    }

    deployment_map out;
    detail::object_reader top(root, "");

    const auto& nodes = top.require("nodes");
    if (!nodes.is_object()) schema_fail("nodes", "expected an object");
    for (auto it = nodes.begin(); it != nodes.end(); ++it) {
        const std::string path = "nodes." + it.key();
        if (!is_identifier(it.key())) schema_fail(path, "invalid node name");
        if (!it.value().is_array() || it.value().empty()) schema_fail(path, "expected a non-empty resource list");
        deployment_node node;
        node.name = it.key();
        for (std::size_t i = 0; i < it.value().size(); ++i)
            node.resources.push_back(detail::read_resource(it.value()[i], path + "[" + std::to_string(i) + "]"));
        out.nodes.push_back(std::move(node));
    }

    const auto& bindings = top.require("bindings");
    if (!bindings.is_object()) schema_fail("bindings", "expected an object");
    for (auto it = bindings.begin(); it != bindings.end(); ++it) {
        const std::string path = "bindings." + it.key();
        const auto node = detail::read_string(it.value(), path);
        if (!out.find_node(node)) schema_fail(path, "binds to undeclared node '" + node + "'");
        out.bindings[it.key()] = node;
    }

    if (const auto* links = top.optional("links")) {
        if (!(links->is_array() || (links->is_object() && links->empty())))
            schema_fail("links", "expected an array");
        for (std::size_t i = 0; i < links->size() && links->is_array(); ++i) {
            const std::string path = "links[" + std::to_string(i) + "]";
            detail::object_reader lobj((*links)[i], path);
            const auto& between = lobj.require("between");
            if (!between.is_array() || between.size() != 2) schema_fail(lobj.child("between"), "expected two nodes");
            deployment_link link;
            link.a = detail::read_string(between[0], lobj.child("between[0]"));
            link.b = detail::read_string(between[1], lobj.child("between[1]"));
            for (const auto* endpoint : {&link.a, &link.b})
                if (!out.find_node(*endpoint))
                    schema_fail(lobj.child("between"), "undeclared node '" + *endpoint + "'");
            if (out.find_link(link.a, link.b))
                schema_fail(path, "duplicate link between '" + link.a + "' and '" + link.b + "'");
            link.resource = detail::read_resource(lobj.require("resource"), lobj.child("resource"));
            lobj.finish();
            out.links.push_back(std::move(link));
        }
    }
    top.finish();
    return out;
}

scenario_model synthesize_scenario(const execution_structure& exec, const deployment_map& deploy,
                                   const workload_template& workload) {
    const auto fail = validation_fail;
    auto node_of = [&](const std::string& participant, std::size_t line) -> const deployment_node& {
        const auto it = deploy.bindings.find(participant);
        if (it == deploy.bindings.end())
            fail("line " + std::to_string(line) + ": participant '" + participant + "' has no binding");
        return *deploy.find_node(it->second);
    };

    workload_class cls;
    cls.name = workload.class_name;
    cls.arrival = workload.arrival;
    cls.max_requests = workload.max_requests;

    for (const auto& step : exec.steps) {
        const auto& from = node_of(step.from, step.line);
        const auto& to = node_of(step.to, step.line);
        if (from.name != to.name) {
            const auto* link = deploy.find_link(from.name, to.name);
            if (!link)
                fail("line " + std::to_string(step.line) + ": no link between nodes '" + from.name + "' and '" +
                     to.name + "'");
            cls.path.push_back({link->resource.name, step.demand});
        }
        cls.path.push_back({to.resources.front().name, step.cpu_demand.value_or(step.demand)});
        if (step.disk) {
            if (to.resources.size() < 2)
                fail("line " + std::to_string(step.line) + ": node '" + to.name + "' has no disk resource");
            cls.path.push_back({to.resources[1].name, step.disk_demand.value_or(step.demand)});
        }
    }

    scenario_model m;
    m.name = workload.scenario_name;
    for (const auto& node : deploy.nodes) m.tiers.push_back({node.name, node.resources});
    tier network{"network", {}};
    for (const auto& link : deploy.links) {
        auto existing = std::find_if(network.resources.begin(), network.resources.end(),
                                     [&](const resource_spec& r) { return r.name == link.resource.name; });
        if (existing == network.resources.end()) network.resources.push_back(link.resource);
        else if (!(*existing == link.resource))
            fail("link resource '" + link.resource.name + "' is declared with conflicting settings");
    }
    if (!network.resources.empty()) m.tiers.push_back(std::move(network));
    m.classes.push_back(std::move(cls));
    m.run = workload.run;

    const auto report = validate(m);
    if (!report.empty()) fail(report.front().path + ": " + report.front().message);
    return m;
}

}  // namespace tiersim
