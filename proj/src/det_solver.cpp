#include "pnsim/det_solver.hpp"

#include <cassert>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace pnsim {

NetworkState initial_network_state(const Scenario& s) {
    NetworkState state;
    state.time = 0.0;
    state.queues = s.initial.queues;
    state.densities = s.initial.densities;
    return state;
}

double upwind_edge_step(std::span<double> rho, double boundary_flux, double mu, double v, double dt,
                        double dx) {
    if (v * dt > dx * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "CFL violated: v * dt = " << v * dt << " exceeds dx = " << dx;
        throw ModelError(os.str());
    }
    assert(boundary_flux >= 0.0 && mu >= 0.0);
    const double ratio = dt / dx;
    double upstream = boundary_flux;
    for (double& cell : rho) {
        const double f = flux(cell, mu, v);
        cell -= ratio * (f - upstream);
        upstream = f;
    }
    return upstream;
}

std::pair<std::vector<double>, double> upwind_edge_step(std::vector<double> rho, double boundary_flux,
                                                        double mu, double v, double dt, double dx) {
    const double exit = upwind_edge_step(std::span<double>(rho), boundary_flux, mu, v, dt, dx);
    return {std::move(rho), exit};
}

void compute_g_in(const Scenario& s, std::span<const double> exit_fluxes, double t, std::span<double> out) {
    const auto& topo = s.topology;
    for (EdgeId e = 0; e < s.num_edges(); ++e) {
        const VertexId from = topo.edge(e).from;
        if (topo.is_inflow(from)) {
            out[e] = s.inflow(from, t);
            continue;
        }
        double arriving = 0.0;
        for (EdgeId in : topo.in_edges(from)) arriving += exit_fluxes[in];
        out[e] = s.distribution(from, e, t) * arriving;
    }
}

std::vector<double> compute_g_in(const Scenario& s, std::span<const double> exit_fluxes, double t) {
    std::vector<double> out(s.num_edges(), 0.0);
    compute_g_in(s, exit_fluxes, t, out);
    return out;
}

double l1_distance(const NetworkState& a, const NetworkState& b, double dx) {
    if (a.queues.size() != b.queues.size() || a.densities.size() != b.densities.size())
        throw std::domain_error("l1_distance: states live on different networks");
    double total = 0.0;
    for (std::size_t e = 0; e < a.queues.size(); ++e) {
        const auto& ra = a.densities[e];
        const auto& rb = b.densities[e];
        if (ra.size() != rb.size()) throw std::domain_error("l1_distance: states live on different grids");
        double cells = 0.0;
        for (std::size_t j = 0; j < ra.size(); ++j) cells += std::abs(ra[j] - rb[j]);
        total += dx * cells + std::abs(a.queues[e] - b.queues[e]);
    }
    return total;
}

DetSolver::DetSolver(const Scenario& s) : scenario_(&s) {
    const std::size_t n = s.num_edges();
    grid_.dx = s.numerics.dx;
    grid_.dt = s.time_step();
    grid_.cells.resize(n);
    source_.resize(n);
    feeds_from_inflow_.resize(n);
    ends_at_outflow_.resize(n);
    double vmax = 0.0;
    for (EdgeId e = 0; e < n; ++e) {
        grid_.cells[e] = s.cells(e);
        vmax = std::max(vmax, s.processors.at(e).velocity);
        const auto& edge = s.topology.edge(e);
        feeds_from_inflow_[e] = s.topology.is_inflow(edge.from);
        ends_at_outflow_[e] = s.topology.is_outflow(edge.to);
        if (feeds_from_inflow_[e]) {
            source_[e] = &s.inflows.at(edge.from);
        } else {
            source_[e] = &s.distribution.by_vertex.at(edge.from).at(e);
        }
    }
    if (vmax * grid_.dt > grid_.dx * (1.0 + 1e-12)) throw ModelError("time step violates the CFL condition");
}

std::vector<double> DetSolver::capacities(std::span<const int> regimes) const {
    std::vector<double> mu(regimes.size());
    for (std::size_t e = 0; e < regimes.size(); ++e)
        mu[e] = scenario_->processors[e].capacities.at(static_cast<std::size_t>(regimes[e]));
    return mu;
}

void DetSolver::step(NetworkState& state, std::span<const double> mu, double h, double t_mid,
                     FluxLedger& ledger) const {
    const auto& s = *scenario_;
    const auto& topo = s.topology;
    const std::size_t n = s.num_edges();
    auto& exit = ledger.exit_flux;
    auto& g_in = ledger.queue_inflow;

    for (EdgeId e = 0; e < n; ++e) exit[e] = flux(state.densities[e].back(), mu[e], s.processors[e].velocity);

    for (EdgeId e = 0; e < n; ++e) {
        const double share = (*source_[e])(t_mid);
        if (feeds_from_inflow_[e]) {
            g_in[e] = share;
        } else {
            double arriving = 0.0;
            for (EdgeId in : topo.in_edges(topo.edge(e).from)) arriving += exit[in];
            g_in[e] = share * arriving;
        }
    }

    double outflow = 0.0;
    double inflow = 0.0;
    for (EdgeId e = 0; e < n; ++e) {
        double& q = state.queues[e];
        const double g_out = compute_g_out(q, g_in[e], mu[e], h);
        if (g_out < mu[e]) {
            q = 0.0;
        } else {
            q += h * (g_in[e] - g_out);
            if (q < 0.0) q = 0.0;
        }
        ledger.boundary_flux[e] = g_out;
        upwind_edge_step(std::span<double>(state.densities[e]), g_out, mu[e], s.processors[e].velocity, h,
                         grid_.dx);
        if (ends_at_outflow_[e]) outflow += exit[e];
        if (feeds_from_inflow_[e]) inflow += g_in[e];
    }
    ledger.outflow += h * outflow;
    ledger.inflow += h * inflow;
}

void DetSolver::evolve(NetworkState& state, std::span<const double> mu, double t1, FluxLedger& ledger) const {
    if (t1 < state.time) {
        std::ostringstream os;
        os << "evolve: target time " << t1 << " precedes state time " << state.time;
        throw std::domain_error(os.str());
    }
    if (ledger.exit_flux.size() != scenario_->num_edges()) ledger = FluxLedger(scenario_->num_edges());
    const double dt = grid_.dt;
    const double tol = 1e-9 * dt;
    double t = state.time;
    while (t1 - t > tol) {
        const double k = std::round(t / dt);
        const bool on_grid = std::abs(t - k * dt) <= tol;
        double boundary = on_grid ? (k + 1.0) * dt : std::ceil(t / dt) * dt;
        if (boundary <= t + tol) boundary += dt;
        if (boundary <= t1 + tol) {
            const double h = on_grid ? dt : boundary - t;
            const double mid = on_grid ? (k + 0.5) * dt : t + 0.5 * h;
            step(state, mu, h, mid, ledger);
            t = boundary;
        } else {
            const double h = t1 - t;
            step(state, mu, h, t + 0.5 * h, ledger);
            t = t1;
        }
    }
    state.time = t1;
}

NetworkState DetSolver::evolve(NetworkState state, std::span<const double> mu, double t1) const {
    FluxLedger ledger(scenario_->num_edges());
    evolve(state, mu, t1, ledger);
    return state;
}

}  // namespace pnsim
