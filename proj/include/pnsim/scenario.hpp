#pragma once

#include "pnsim/rate_spec.hpp"
#include "pnsim/signal.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pnsim {

using EdgeId = std::size_t;
using VertexId = std::size_t;

/// Raised for malformed models and violated preconditions that callers cannot
/// recover from locally.
class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Edge {
    std::string name;
    VertexId from = 0;
    VertexId to = 0;
};

/// Directed multigraph whose arcs are processors. Vertex adjacency is derived
/// once on construction.
class Topology {
public:
    Topology() = default;
    Topology(std::vector<std::string> vertex_names, std::vector<Edge> edges);

    [[nodiscard]] std::size_t num_edges() const noexcept { return edges_.size(); }
    [[nodiscard]] std::size_t num_vertices() const noexcept { return vertex_names_.size(); }
    [[nodiscard]] const Edge& edge(EdgeId e) const { return edges_.at(e); }
    [[nodiscard]] const std::vector<Edge>& edges() const noexcept { return edges_; }
    [[nodiscard]] const std::string& vertex_name(VertexId v) const { return vertex_names_.at(v); }
    [[nodiscard]] std::optional<VertexId> find_vertex(const std::string& name) const;
    [[nodiscard]] std::optional<EdgeId> find_edge(const std::string& name) const;

    [[nodiscard]] const std::vector<EdgeId>& in_edges(VertexId v) const { return in_.at(v); }
    [[nodiscard]] const std::vector<EdgeId>& out_edges(VertexId v) const { return out_.at(v); }
    [[nodiscard]] bool is_inflow(VertexId v) const { return in_.at(v).empty(); }
    [[nodiscard]] bool is_outflow(VertexId v) const { return out_.at(v).empty(); }
    [[nodiscard]] std::vector<VertexId> inflow_vertices() const;
    [[nodiscard]] std::vector<VertexId> outflow_vertices() const;

    [[nodiscard]] bool has_cycle() const;
    /// Vertices that no inflow vertex reaches.
    [[nodiscard]] std::vector<VertexId> unreachable_vertices() const;

private:
    std::vector<std::string> vertex_names_;
    std::vector<Edge> edges_;
    std::vector<std::vector<EdgeId>> in_;
    std::vector<std::vector<EdgeId>> out_;
};

struct Processor {
    double a = 0.0;
    double length = 1.0;
    double velocity = 1.0;
    std::vector<double> capacities;  // mu(r) for regime r = 0 .. C-1

    [[nodiscard]] double b() const noexcept { return a + length; }
    [[nodiscard]] std::size_t num_regimes() const noexcept { return capacities.size(); }
    [[nodiscard]] double max_capacity() const;
};

/// Per-vertex routing A^{v,e}(t): one signal for every outgoing edge of v.
struct DistributionRates {
    std::map<VertexId, std::map<EdgeId, PiecewiseConstantSignal>> by_vertex;

    [[nodiscard]] double operator()(VertexId v, EdgeId e, double t) const;
};

/// Initial hybrid data. Regimes are zero-based here; scenario files and CSV
/// outputs use one-based regime numbers.
struct InitialData {
    std::vector<double> queues;
    std::vector<std::vector<double>> densities;
    std::vector<int> regimes;
};

struct Numerics {
    double dx = 0.1;
    std::optional<double> dt;  // unset: dt = dx / max velocity
    double horizon = 1.0;
    double output_step = 0.1;
};

struct Scenario {
    std::string name;
    Topology topology;
    std::vector<Processor> processors;
    DistributionRates distribution;
    std::map<VertexId, PiecewiseConstantSignal> inflows;
    RateModelSpec rates;
    InitialData initial;
    Numerics numerics;

    [[nodiscard]] std::size_t num_edges() const noexcept { return topology.num_edges(); }
    [[nodiscard]] std::size_t cells(EdgeId e) const;
    [[nodiscard]] double time_step() const;
    [[nodiscard]] double inflow(VertexId v, double t) const;

    /// Almost-sure queue bound q_e^max over [0, horizon].
    [[nodiscard]] double queue_bound(EdgeId e) const;
    /// Almost-sure bound on v^e rho^e: max(v^e * max initial density, mu_e^max).
    [[nodiscard]] double flux_density_bound(EdgeId e) const;
    /// Initial sum of queues plus cell masses.
    [[nodiscard]] double initial_mass() const;
    /// Exact integral of all edge inflows fed by inflow vertices over [0, t].
    [[nodiscard]] double cumulative_inflow(double t) const;
};

struct ValidationReport {
    std::vector<std::string> violations;
    std::vector<std::string> warnings;
    double max_stable_dt = 0.0;  // dx / max velocity

    [[nodiscard]] bool ok() const noexcept { return violations.empty(); }
};

[[nodiscard]] ValidationReport validate_scenario(const Scenario& s);

/// Throws ModelError listing the violations when the scenario is not runnable.
void require_valid(const Scenario& s);

}  // namespace pnsim
