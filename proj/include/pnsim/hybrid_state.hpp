#pragma once

#include "pnsim/det_solver.hpp"

#include <optional>
#include <vector>

namespace pnsim {

/// Regime vector (zero-based per edge) together with the deterministic state.
struct HybridState {
    std::vector<int> regimes;
    NetworkState net;

    [[nodiscard]] double time() const noexcept { return net.time; }
    bool operator==(const HybridState&) const = default;
};

[[nodiscard]] HybridState initial_hybrid_state(const Scenario& s);

/// One accepted jump: exactly one edge changes regime.
struct JumpEvent {
    double time = 0.0;
    EdgeId edge = 0;
    int from = 0;
    int to = 0;
    std::optional<HybridState> post_jump;

    bool operator==(const JumpEvent&) const = default;
};

}  // namespace pnsim
