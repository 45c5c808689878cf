#pragma once

#include "pnsim/det_solver.hpp"
#include "pnsim/hybrid_state.hpp"
#include "pnsim/measures.hpp"
#include "pnsim/rate_models.hpp"

#include <cstdint>
#include <functional>
#include <random>
#include <variant>

namespace pnsim {

/// Uniform stream for one sample path, keyed by (seed, path index) so that a
/// path is reproducible independently of how paths are scheduled.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t path_index);

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Exp(rate) by inverse transform: -ln(1 - U) / rate.
    double exponential(double rate) noexcept;

private:
    std::mt19937_64 engine_;
};

/// The total jump rate exceeded the dominating rate used for thinning.
class BoundViolation : public ModelError {
public:
    BoundViolation(double time, double rate, double bound, std::uint64_t path_index = 0);

    double time;
    double rate;
    double bound;
    std::uint64_t path_index;
};

struct AcceptedJump {
    double time;
};
struct HorizonReached {};
using JumpOutcome = std::variant<AcceptedJump, HorizonReached>;

/// Moves a hybrid state forward in time with its regimes frozen.
using AdvanceFn = std::function<void(HybridState&, double)>;

/// Thinning step. Draws candidate times from a Poisson stream with rate
/// `bound`, advancing `y` incrementally from candidate to candidate, and
/// accepts a candidate s with probability psi(s, y(s)) / bound. On a
/// candidate past `horizon`, `y` is advanced exactly to the horizon.
/// Each candidate consumes one exponential and then one uniform draw.
[[nodiscard]] JumpOutcome next_jump(HybridState& y, double bound, double horizon, const Scenario& s,
                                    RngStream& rng, const AdvanceFn& advance, std::size_t* candidates = nullptr);

/// Draws the post-jump regime vector: edge e moves to regime l with
/// probability rate(e, r_e, l) / psi. Only that coordinate of `y` changes.
JumpEvent sample_post_jump(double t, HybridState& y, const Scenario& s, RngStream& rng);

struct PathOptions {
    bool record_jump_states = true;
};

/// Runs one sample path from the scenario's initial data to its horizon,
/// recording every output-grid time and every accepted jump.
[[nodiscard]] PathRecord simulate_path(const Scenario& s, const DetSolver& solver, const RateBounds& bounds,
                                       std::uint64_t seed, std::uint64_t path_index, PathOptions options = {});

[[nodiscard]] PathRecord simulate_path(const Scenario& s, std::uint64_t seed, std::uint64_t path_index,
                                       PathOptions options = {});

/// Output grid 0, step, 2 step, ..., horizon.
[[nodiscard]] std::vector<double> output_times(const Scenario& s);

}  // namespace pnsim
