#include "pnsim/scenario_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace pnsim {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw ScenarioFormatError(msg); }

const json& require(const json& obj, const char* key, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key)) fail(where + ": missing key '" + key + "'");
    return obj.at(key);
}

double number(const json& j, const std::string& where) {
    if (!j.is_number()) fail(where + ": expected a number");
    return j.get<double>();
}

std::string id_string(const json& j, const std::string& where) {
    if (j.is_string()) return j.get<std::string>();
    if (j.is_number_integer()) return std::to_string(j.get<long long>());
    fail(where + ": ids must be strings or integers");
}

std::vector<double> number_list(const json& j, const std::string& where) {
    if (!j.is_array()) fail(where + ": expected an array of numbers");
    std::vector<double> out;
    out.reserve(j.size());
    for (const auto& x : j) out.push_back(number(x, where));
    return out;
}

PiecewiseConstantSignal signal(const json& j, double horizon, const std::string& where) {
    if (j.is_number()) return PiecewiseConstantSignal::constant(j.get<double>(), horizon);
    if (!j.is_object()) fail(where + ": a signal is a number or {breakpoints, values}");
    return {number_list(require(j, "breakpoints", where), where + ".breakpoints"),
            number_list(require(j, "values", where), where + ".values"), horizon};
}

/// Scalar applied to every edge, or one entry per edge.
std::vector<double> per_edge(const json& j, std::size_t edges, const std::string& where) {
    if (j.is_number()) return std::vector<double>(edges, j.get<double>());
    auto values = number_list(j, where);
    if (values.size() != edges) fail(where + ": expected " + std::to_string(edges) + " entries");
    return values;
}

std::vector<double> rate_parameter(const json& rates, const char* direct, const char* mean, std::size_t edges) {
    if (rates.contains(direct)) return per_edge(rates.at(direct), edges, std::string("rates.") + direct);
    if (rates.contains(mean)) {
        auto values = per_edge(rates.at(mean), edges, std::string("rates.") + mean);
        for (double& v : values) v = 1.0 / v;
        return values;
    }
    fail(std::string("rates: need '") + direct + "' or '" + mean + "'");
}

Topology parse_topology(const json& doc) {
    const auto& edges_json = require(require(doc, "topology", "scenario"), "edges", "topology");
    if (!edges_json.is_array()) fail("topology.edges: expected an array");
    std::vector<std::string> vertices;
    std::vector<Edge> edges;
    auto vertex = [&](const std::string& name) {
        auto it = std::find(vertices.begin(), vertices.end(), name);
        if (it != vertices.end()) return static_cast<VertexId>(std::distance(vertices.begin(), it));
        vertices.push_back(name);
        return vertices.size() - 1;
    };
    for (std::size_t k = 0; k < edges_json.size(); ++k) {
        const auto& ej = edges_json[k];
        const std::string where = "topology.edges[" + std::to_string(k) + "]";
        Edge edge;
        edge.name = ej.contains("id") ? id_string(ej.at("id"), where + ".id") : std::to_string(k + 1);
        edge.from = vertex(id_string(require(ej, "from", where), where + ".from"));
        edge.to = vertex(id_string(require(ej, "to", where), where + ".to"));
        for (const auto& other : edges)
            if (other.name == edge.name) fail(where + ": duplicate edge id '" + edge.name + "'");
        edges.push_back(std::move(edge));
    }
    return Topology(std::move(vertices), std::move(edges));
}

Numerics parse_numerics(const json& doc) {
    const auto& nj = require(doc, "numerics", "scenario");
    Numerics num;
    num.dx = number(require(nj, "dx", "numerics"), "numerics.dx");
    num.horizon = number(require(nj, "horizon", "numerics"), "numerics.horizon");
    if (nj.contains("dt_policy")) {
        const auto& policy = nj.at("dt_policy");
        if (policy.is_number()) {
            num.dt = policy.get<double>();
        } else if (!(policy.is_string() && policy.get<std::string>() == "cfl-equal")) {
            fail("numerics.dt_policy: expected \"cfl-equal\" or a time step");
        }
    }
    if (nj.contains("dt")) num.dt = number(nj.at("dt"), "numerics.dt");
    num.output_step = nj.contains("output_step") ? number(nj.at("output_step"), "numerics.output_step") : 0.0;
    return num;
}

void parse_processors(const json& doc, Scenario& s) {
    const auto& pj = require(doc, "processors", "scenario");
    if (!pj.is_array()) fail("processors: expected an array");
    for (std::size_t k = 0; k < pj.size(); ++k) {
        const auto& p = pj[k];
        const std::string where = "processors[" + std::to_string(k) + "]";
        Processor proc;
        if (p.contains("a")) proc.a = number(p.at("a"), where + ".a");
        if (p.contains("length")) proc.length = number(p.at("length"), where + ".length");
        proc.velocity = number(require(p, "velocity", where), where + ".velocity");
        proc.capacities = number_list(require(p, "capacities", where), where + ".capacities");
        int regime = static_cast<int>(proc.capacities.size());
        if (p.contains("initial_regime")) {
            const auto& r = p.at("initial_regime");
            if (!r.is_number_integer()) fail(where + ".initial_regime: expected an integer");
            regime = r.get<int>();
        }
        s.initial.regimes.push_back(regime - 1);
        s.processors.push_back(std::move(proc));
    }
}

void parse_flows(const json& doc, Scenario& s) {
    const auto& topo = s.topology;
    const double horizon = s.numerics.horizon;
    auto vertex_of = [&](const std::string& name, const std::string& where) {
        auto v = topo.find_vertex(name);
        if (!v) fail(where + ": unknown vertex '" + name + "'");
        return *v;
    };

    if (doc.contains("inflows")) {
        const auto& ij = doc.at("inflows");
        if (!ij.is_object()) fail("inflows: expected an object keyed by vertex");
        for (const auto& [name, sig] : ij.items())
            s.inflows[vertex_of(name, "inflows")] = signal(sig, horizon, "inflows." + name);
    }

    if (doc.contains("distribution")) {
        const auto& dj = doc.at("distribution");
        if (!dj.is_object()) fail("distribution: expected an object keyed by vertex");
        for (const auto& [vname, per_edge_json] : dj.items()) {
            const VertexId v = vertex_of(vname, "distribution");
            if (!per_edge_json.is_object()) fail("distribution." + vname + ": expected an object keyed by edge");
            auto& slot = s.distribution.by_vertex[v];
            for (const auto& [ename, sig] : per_edge_json.items()) {
                auto e = topo.find_edge(ename);
                if (!e) fail("distribution." + vname + ": unknown edge '" + ename + "'");
                slot[*e] = signal(sig, horizon, "distribution." + vname + "." + ename);
            }
        }
    }
    for (VertexId v = 0; v < topo.num_vertices(); ++v) {
        const auto& outs = topo.out_edges(v);
        if (outs.size() == 1 && !topo.is_inflow(v) && !s.distribution.by_vertex.count(v))
            s.distribution.by_vertex[v][outs.front()] = PiecewiseConstantSignal::constant(1.0, horizon);
    }
}

void parse_rates(const json& doc, Scenario& s) {
    const auto& rj = require(doc, "rates", "scenario");
    const std::size_t n = s.num_edges();
    const auto& vj = require(rj, "variant", "rates");
    if (!vj.is_string()) fail("rates.variant: expected a string");
    const std::string variant = vj.get<std::string>();
    if (variant == "linear_load") {
        s.rates.variant = RateModelSpec::Variant::LinearLoadDependent;
        const auto down = rate_parameter(rj, "down_ref", "mean_up_time", n);
        const auto rep = rate_parameter(rj, "rep_ref", "mean_repair_time", n);
        const auto beta = rj.contains("beta") ? per_edge(rj.at("beta"), n, "rates.beta") : std::vector<double>(n, 0.0);
        for (std::size_t e = 0; e < n; ++e) s.rates.linear.push_back({down[e], rep[e], beta[e]});
    } else if (variant == "constant_matrix") {
        s.rates.variant = RateModelSpec::Variant::ConstantMatrix;
        const auto& mj = require(rj, "matrices", "rates");
        if (!mj.is_array() || mj.size() != n) fail("rates.matrices: expected one matrix per edge");
        for (std::size_t e = 0; e < n; ++e) {
            RateMatrix m;
            if (!mj[e].is_array()) fail("rates.matrices: each matrix is an array of rows");
            for (const auto& row : mj[e]) m.push_back(number_list(row, "rates.matrices"));
            s.rates.matrices.push_back(std::move(m));
        }
    } else {
        fail("rates.variant: expected \"linear_load\" or \"constant_matrix\"");
    }
    if (rj.contains("bound")) s.rates.network_bound = number(rj.at("bound"), "rates.bound");
}

void parse_initial(const json& doc, Scenario& s) {
    const std::size_t n = s.num_edges();
    auto cells = [&](EdgeId e) -> std::size_t {
        if (e >= s.processors.size() || !(s.numerics.dx > 0.0)) return 0;
        const double ratio = s.processors[e].length / s.numerics.dx;
        return ratio >= 0.5 ? static_cast<std::size_t>(std::llround(ratio)) : 0;
    };
    s.initial.queues.assign(n, 0.0);
    s.initial.densities.resize(n);
    for (EdgeId e = 0; e < n; ++e) s.initial.densities[e].assign(cells(e), 0.0);
    if (!doc.contains("initial")) return;
    const auto& ij = doc.at("initial");
    if (ij.contains("queues")) s.initial.queues = per_edge(ij.at("queues"), n, "initial.queues");
    if (!ij.contains("densities")) return;
    const auto& dj = ij.at("densities");
    if (dj.is_number()) {
        for (auto& rho : s.initial.densities) rho.assign(rho.size(), dj.get<double>());
        return;
    }
    if (!dj.is_array() || dj.size() != n) fail("initial.densities: expected a number or one entry per edge");
    for (EdgeId e = 0; e < n; ++e) {
        if (dj[e].is_number())
            s.initial.densities[e].assign(cells(e), dj[e].get<double>());
        else
            s.initial.densities[e] = number_list(dj[e], "initial.densities");
    }
}

}  // namespace

Scenario parse_scenario(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& ex) {
        throw ScenarioFormatError(std::string("malformed JSON: ") + ex.what());
    }
    if (!doc.is_object()) fail("scenario: expected a JSON object");
    try {
        Scenario s;
        if (doc.contains("name")) s.name = id_string(doc.at("name"), "name");
        s.topology = parse_topology(doc);
        s.numerics = parse_numerics(doc);
        parse_processors(doc, s);
        if (s.numerics.output_step == 0.0) {
            double vmax = 0.0;
            for (const auto& p : s.processors) vmax = std::max(vmax, p.velocity);
            s.numerics.output_step = s.numerics.dt ? *s.numerics.dt : (vmax > 0.0 ? s.numerics.dx / vmax : 0.0);
        }
        parse_flows(doc, s);
        parse_rates(doc, s);
        parse_initial(doc, s);
        return s;
    } catch (const json::exception& ex) {
        throw ScenarioFormatError(std::string("scenario: ") + ex.what());
    } catch (const ModelError& ex) {
        throw ScenarioFormatError(ex.what());
    }
}

Scenario load_scenario(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw ScenarioFormatError("cannot read scenario file " + file.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

Scenario with_beta(Scenario s, double beta) {
    if (s.rates.variant != RateModelSpec::Variant::LinearLoadDependent)
        throw ModelError("beta applies only to load-dependent rate models");
    for (auto& p : s.rates.linear) p.beta = beta;
    return s;
}

}  // namespace pnsim
