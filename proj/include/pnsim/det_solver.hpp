#pragma once

#include "pnsim/scenario.hpp"

#include <span>
#include <utility>
#include <vector>

namespace pnsim {

/// Deterministic network state: queue and cell-averaged densities per edge.
struct NetworkState {
    double time = 0.0;
    std::vector<double> queues;
    std::vector<std::vector<double>> densities;

    bool operator==(const NetworkState&) const = default;
};

[[nodiscard]] NetworkState initial_network_state(const Scenario& s);

struct Grid {
    std::vector<std::size_t> cells;
    double dx = 0.0;
    double dt = 0.0;
};

/// Fluxes of the most recent step plus running totals over the evolution.
struct FluxLedger {
    std::vector<double> boundary_flux;  // g_out^e injected at a^e
    std::vector<double> exit_flux;      // f^e at b^e
    std::vector<double> queue_inflow;   // g_in^e
    double outflow = 0.0;               // accumulated over edges ending in V_out
    double inflow = 0.0;                // accumulated over edges leaving V_in

    explicit FluxLedger(std::size_t edges = 0)
        : boundary_flux(edges, 0.0), exit_flux(edges, 0.0), queue_inflow(edges, 0.0) {}
};

[[nodiscard]] inline double flux(double rho, double mu, double v) noexcept {
    const double f = v * rho;
    return f < mu ? f : mu;
}

/// Release rate from a queue over a step of length dt. Reduces to mu for a
/// well-filled queue and to min(g_in, mu) for an empty one; in between it
/// empties the queue exactly within the step.
[[nodiscard]] inline double compute_g_out(double q, double g_in, double mu, double dt) noexcept {
    const double drain = g_in + q / dt;
    return drain < mu ? drain : mu;
}

/// One left-sided upwind step in place. Returns the exit flux at b computed
/// from the pre-update densities. Throws ModelError when v * dt > dx.
double upwind_edge_step(std::span<double> rho, double boundary_flux, double mu, double v,
                        double dt, double dx);

[[nodiscard]] std::pair<std::vector<double>, double> upwind_edge_step(
    std::vector<double> rho, double boundary_flux, double mu, double v, double dt, double dx);

/// Queue inflow for every edge: the vertex inflow for edges leaving V_in,
/// otherwise the routed share of the upstream exit fluxes.
[[nodiscard]] std::vector<double> compute_g_in(const Scenario& s, std::span<const double> exit_fluxes,
                                               double t);
void compute_g_in(const Scenario& s, std::span<const double> exit_fluxes, double t, std::span<double> out);

/// Sum over edges of dx * |rho_a - rho_b|_1 + |q_a - q_b|.
[[nodiscard]] double l1_distance(const NetworkState& a, const NetworkState& b, double dx);

/// Frozen-capacity solution operator on a fixed grid.
///
/// Steps are aligned with the global time grid k * dt: starting on the grid,
/// the solver takes full steps and a final partial step to reach `t1`;
/// starting off the grid, it first completes the current grid interval. Each
/// step evaluates exit fluxes, queue inflows, release rates, the queue update
/// and the density update in that order, with signals read at the step
/// midpoint.
class DetSolver {
public:
    explicit DetSolver(const Scenario& s);

    [[nodiscard]] const Grid& grid() const noexcept { return grid_; }
    [[nodiscard]] const Scenario& scenario() const noexcept { return *scenario_; }

    /// Advances `state` to t1 with capacities held fixed.
    void evolve(NetworkState& state, std::span<const double> capacities, double t1, FluxLedger& ledger) const;

    [[nodiscard]] NetworkState evolve(NetworkState state, std::span<const double> capacities, double t1) const;

    /// Capacities for a regime vector.
    [[nodiscard]] std::vector<double> capacities(std::span<const int> regimes) const;

private:
    void step(NetworkState& state, std::span<const double> capacities, double h, double t_mid,
              FluxLedger& ledger) const;

    const Scenario* scenario_;
    Grid grid_;
    std::vector<const PiecewiseConstantSignal*> source_;  // inflow signal or routing rate per edge
    std::vector<bool> feeds_from_inflow_;
    std::vector<bool> ends_at_outflow_;
};

}  // namespace pnsim
