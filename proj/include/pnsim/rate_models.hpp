#pragma once

#include "pnsim/det_solver.hpp"
#include "pnsim/scenario.hpp"

#include <span>
#include <vector>

namespace pnsim {

/// Utilization ratio of edge e when running at capacity `mu`: mean production
/// flux over the processor relative to its maximal capacity. Zero when the
/// processor has no positive capacity.
[[nodiscard]] double ur(const Scenario& s, const NetworkState& state, EdgeId e, double mu);
[[nodiscard]] double ur(const Scenario& s, const NetworkState& state, std::span<const int> regimes, EdgeId e);

/// Ratio of work in progress: stored goods relative to a full machine. Not
/// clamped; rate evaluation clamps it to [0, 1].
[[nodiscard]] double rwip(const Scenario& s, const NetworkState& state, EdgeId e);

/// Transition rate from regime i to regime j (zero-based, i != j) on edge e.
[[nodiscard]] double rate(const Scenario& s, EdgeId e, int i, int j, double t, const NetworkState& state,
                          std::span<const int> regimes);

/// Load-dependent failure rate (up -> down) as a function of UR.
[[nodiscard]] double failure_rate(const LinearLoadParams& p, double utilization) noexcept;
/// Load-dependent repair rate (down -> up) as a function of RWIP.
[[nodiscard]] double repair_rate(const LinearLoadParams& p, double work_in_progress) noexcept;

/// Total rate of leaving the current regime vector.
[[nodiscard]] double psi(const Scenario& s, double t, std::span<const int> regimes, const NetworkState& state);

struct RateBounds {
    std::vector<double> per_edge;
    double network = 0.0;  // used by thinning; at least the sum of per_edge
};

/// Per-edge supremum of the exit rates over the almost-surely reachable load
/// box, and their sum (or the scenario's override when given).
[[nodiscard]] RateBounds uniform_bound(const Scenario& s);

}  // namespace pnsim
