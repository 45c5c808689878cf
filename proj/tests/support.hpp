#pragma once

#include "pnsim/scenario_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

namespace support {

using nlohmann::json;

inline std::string scenario_path(const std::string& name) { return std::string(PNSIM_SCENARIO_DIR) + "/" + name; }

inline pnsim::Scenario diamond(double beta = 0.0, bool piecewise = false) {
    auto s = pnsim::load_scenario(scenario_path(piecewise ? "diamond_piecewise_inflow.json"
                                                          : "diamond_constant_inflow.json"));
    return pnsim::with_beta(std::move(s), beta);
}

/// Diamond with the given rates replaced by constant two-state matrices.
inline pnsim::Scenario diamond_constant_rates(double fail, double repair) {
    auto s = diamond();
    s.rates.variant = pnsim::RateModelSpec::Variant::ConstantMatrix;
    s.rates.linear.clear();
    s.rates.matrices.assign(s.num_edges(), pnsim::RateMatrix{{0.0, repair}, {fail, 0.0}});
    return s;
}

/// One processor in -> out, two regimes, capacities {mu_down, mu_up}.
inline json single_edge_doc(double horizon = 10.0, double inflow = 1.0) {
    return json{
        {"name", "single"},
        {"topology", {{"edges", json::array({json{{"id", "1"}, {"from", "in"}, {"to", "out"}}})}}},
        {"processors", json::array({json{{"velocity", 1.0}, {"capacities", {0.0, 2.0}}}})},
        {"inflows", {{"in", inflow}}},
        {"rates", {{"variant", "linear_load"}, {"down_ref", 1.0 / 0.85}, {"rep_ref", 1.0 / 0.15}, {"beta", 0.0}}},
        {"numerics", {{"dx", 0.1}, {"horizon", horizon}}},
    };
}

inline pnsim::Scenario parse(const json& doc) { return pnsim::parse_scenario(doc.dump()); }

/// Single edge with a constant 2x2 matrix: up -> down at rate `fail`, down -> up at `repair`.
inline pnsim::Scenario single_edge_constant(double fail, double repair, double bound = 0.0,
                                            double horizon = 10.0) {
    auto doc = single_edge_doc(horizon);
    doc["rates"] = {{"variant", "constant_matrix"},
                    {"matrices", json::array({json::array({json::array({0.0, repair}), json::array({fail, 0.0})})})}};
    if (bound > 0.0) doc["rates"]["bound"] = bound;
    return parse(doc);
}

/// Piecewise-constant signal with breakpoints on the dt grid.
inline json random_signal(std::mt19937_64& rng, double horizon, double dt, double lo, double hi) {
    std::uniform_real_distribution<double> value(lo, hi);
    std::uniform_int_distribution<int> pieces(1, 5);
    const auto steps = static_cast<long>(std::llround(horizon / dt));
    std::uniform_int_distribution<long> at(1, steps - 1);
    std::vector<long> cuts;
    const int n = pieces(rng);
    for (int k = 1; k < n; ++k) cuts.push_back(at(rng));
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    json bps = json::array({0.0});
    json vals = json::array({value(rng)});
    for (long c : cuts) {
        bps.push_back(static_cast<double>(c) * dt);
        vals.push_back(value(rng));
    }
    return json{{"breakpoints", bps}, {"values", vals}};
}

/// Random acyclic network with at most five processors, random piecewise
/// inflows and routing, random initial data, load-dependent rates.
inline json random_network_doc(std::mt19937_64& rng, double horizon = 10.0) {
    const double dx = 0.1;
    std::uniform_int_distribution<int> edge_count(1, 5);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const int n = edge_count(rng);

    // Vertex 0 is the first inflow vertex; new vertices get increasing ids so
    // every edge goes from a lower to a higher id.
    struct E {
        int from, to;
    };
    std::vector<E> edges{{0, 1}};
    int vertices = 2;
    std::vector<int> inflow_vertices{0};
    while (static_cast<int>(edges.size()) < n) {
        std::vector<int> interior;
        for (int v = 1; v < vertices; ++v)
            if (std::find(inflow_vertices.begin(), inflow_vertices.end(), v) == inflow_vertices.end())
                interior.push_back(v);
        auto pick_interior = [&] {
            return interior[static_cast<std::size_t>(unit(rng) * static_cast<double>(interior.size()))];
        };
        if (unit(rng) < 0.15) {
            // second source feeding an existing interior vertex
            edges.push_back({vertices, pick_interior()});
            inflow_vertices.push_back(vertices);
            ++vertices;
            continue;
        }
        const int from = pick_interior();
        int to = vertices;
        if (unit(rng) < 0.3 && from + 1 < vertices) {
            to = from + 1 + static_cast<int>(unit(rng) * (vertices - from - 1));
            if (std::find(inflow_vertices.begin(), inflow_vertices.end(), to) != inflow_vertices.end()) to = vertices;
        }
        if (to == vertices) ++vertices;
        edges.push_back({from, to});
    }

    auto vname = [](int v) { return "v" + std::to_string(v); };
    json doc;
    doc["name"] = "random";
    json ej = json::array();
    for (std::size_t k = 0; k < edges.size(); ++k)
        ej.push_back({{"id", std::to_string(k + 1)}, {"from", vname(edges[k].from)}, {"to", vname(edges[k].to)}});
    doc["topology"]["edges"] = ej;

    const double velocities[] = {0.5, 1.0, 2.0};
    const double lengths[] = {0.5, 1.0, 1.5};
    double vmax = 0.0;
    json procs = json::array();
    json densities = json::array();
    json queues = json::array();
    for (std::size_t k = 0; k < edges.size(); ++k) {
        const double v = velocities[static_cast<int>(unit(rng) * 3)];
        const double len = lengths[static_cast<int>(unit(rng) * 3)];
        const double mu = 0.5 + 2.0 * unit(rng);
        vmax = std::max(vmax, v);
        procs.push_back({{"velocity", v}, {"length", len}, {"capacities", {0.2 * unit(rng), mu}}});
        const auto cells = static_cast<int>(std::llround(len / dx));
        json rho = json::array();
        for (int j = 0; j < cells; ++j) rho.push_back(unit(rng) * mu / v);
        densities.push_back(rho);
        queues.push_back(unit(rng) < 0.5 ? 0.0 : 3.0 * unit(rng));
    }
    doc["processors"] = procs;
    const double dt = dx / vmax;

    json inflows = json::object();
    for (int v : inflow_vertices) inflows[vname(v)] = random_signal(rng, horizon, dt, 0.0, 3.0);
    doc["inflows"] = inflows;

    // Routing at branching vertices: shared breakpoints, per-piece weights
    // normalized to one.
    json distribution = json::object();
    for (int v = 1; v < vertices; ++v) {
        std::vector<std::size_t> outs;
        for (std::size_t k = 0; k < edges.size(); ++k)
            if (edges[k].from == v) outs.push_back(k);
        if (outs.size() < 2) continue;
        const json shape = random_signal(rng, horizon, dt, 0.0, 1.0);
        const std::size_t pieces = shape["breakpoints"].size();
        std::vector<std::vector<double>> w(outs.size(), std::vector<double>(pieces));
        for (std::size_t p = 0; p < pieces; ++p) {
            double total = 0.0;
            for (auto& row : w) total += (row[p] = 0.05 + unit(rng));
            for (auto& row : w) row[p] /= total;
        }
        for (std::size_t i = 0; i < outs.size(); ++i)
            distribution[vname(v)][std::to_string(outs[i] + 1)] = {{"breakpoints", shape["breakpoints"]},
                                                                   {"values", w[i]}};
    }
    doc["distribution"] = distribution;

    doc["rates"] = {{"variant", "linear_load"},
                    {"mean_up_time", 0.3 + unit(rng)},
                    {"mean_repair_time", 0.1 + 0.3 * unit(rng)},
                    {"beta", unit(rng)}};
    doc["numerics"] = {{"dx", dx}, {"horizon", horizon}, {"dt_policy", "cfl-equal"}, {"output_step", dt}};
    doc["initial"] = {{"queues", queues}, {"densities", densities}};
    return doc;
}

/// Exact integral of a document signal over [0, t].
inline double signal_integral(const json& sig, double horizon) {
    if (sig.is_number()) return sig.get<double>() * horizon;
    const auto& bps = sig["breakpoints"];
    const auto& vals = sig["values"];
    double total = 0.0;
    for (std::size_t k = 0; k < bps.size(); ++k) {
        const double end = k + 1 < bps.size() ? bps[k + 1].get<double>() : horizon;
        total += vals[k].get<double>() * (end - bps[k].get<double>());
    }
    return total;
}

/// Initial mass computed straight from the document.
inline double document_mass(const json& doc) {
    double total = 0.0;
    const double dx = doc["numerics"]["dx"].get<double>();
    for (const auto& q : doc["initial"]["queues"]) total += q.get<double>();
    for (const auto& rho : doc["initial"]["densities"])
        for (const auto& c : rho) total += dx * c.get<double>();
    return total;
}

/// Kolmogorov-Smirnov distance between a sample and an exact CDF.
template <typename Cdf>
double ks_distance(std::vector<double> xs, Cdf cdf) {
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = cdf(xs[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    return d;
}

}  // namespace support
