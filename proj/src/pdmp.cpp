#include "pnsim/pdmp.hpp"

#include <cmath>
#include <sstream>

namespace pnsim {

HybridState initial_hybrid_state(const Scenario& s) {
    return HybridState{s.initial.regimes, initial_network_state(s)};
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t path_index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(path_index), static_cast<std::uint32_t>(path_index >> 32),
                      0x706e73u};
    engine_.seed(seq);
}

double RngStream::exponential(double rate) noexcept { return -std::log1p(-uniform()) / rate; }

namespace {

std::string describe_violation(double time, double rate, double bound, std::uint64_t path_index) {
    std::ostringstream os;
    os.precision(17);
    os << "path " << path_index << ": jump rate " << rate << " exceeds the thinning bound " << bound
       << " at t = " << time;
    return os.str();
}

}  // namespace

BoundViolation::BoundViolation(double time_, double rate_, double bound_, std::uint64_t path_index_)
    : ModelError(describe_violation(time_, rate_, bound_, path_index_)),
      time(time_),
      rate(rate_),
      bound(bound_),
      path_index(path_index_) {}

JumpOutcome next_jump(HybridState& y, double bound, double horizon, const Scenario& s, RngStream& rng,
                      const AdvanceFn& advance, std::size_t* candidates) {
    double t = y.time();
    if (!(bound > 0.0)) {
        advance(y, horizon);
        return HorizonReached{};
    }
    for (;;) {
        t += rng.exponential(bound);
        if (t > horizon) {
            advance(y, horizon);
            return HorizonReached{};
        }
        advance(y, t);
        if (candidates) ++*candidates;
        const double u = rng.uniform();
        const double total = psi(s, t, y.regimes, y.net);
        if (total > bound * (1.0 + 1e-12)) throw BoundViolation(t, total, bound);
        if (u * bound < total) return AcceptedJump{t};
    }
}

JumpEvent sample_post_jump(double t, HybridState& y, const Scenario& s, RngStream& rng) {
    const double total = psi(s, t, y.regimes, y.net);
    if (!(total > 0.0)) throw ModelError("sample_post_jump called with zero total rate");
    const double target = rng.uniform() * total;

    JumpEvent event;
    event.time = t;
    bool chosen = false;
    double cumulative = 0.0;
    for (EdgeId e = 0; e < s.num_edges() && !chosen; ++e) {
        const int from = y.regimes[e];
        const int states = static_cast<int>(s.processors[e].num_regimes());
        for (int to = 0; to < states; ++to) {
            if (to == from) continue;
            const double w = rate(s, e, from, to, t, y.net, y.regimes);
            if (w <= 0.0) continue;
            cumulative += w;
            // Roundoff may leave target just above the final cumulative sum;
            // the last positive-weight pair then absorbs it.
            event.edge = e;
            event.from = from;
            event.to = to;
            if (target < cumulative) {
                chosen = true;
                break;
            }
        }
    }
    y.regimes[event.edge] = event.to;
    return event;
}

std::vector<double> output_times(const Scenario& s) {
    const double step = s.numerics.output_step;
    const double horizon = s.numerics.horizon;
    const auto count = static_cast<std::size_t>(std::llround(horizon / step));
    std::vector<double> times(count + 1);
    for (std::size_t k = 0; k < count; ++k) times[k] = static_cast<double>(k) * step;
    times[count] = horizon;
    return times;
}

PathRecord simulate_path(const Scenario& s, const DetSolver& solver, const RateBounds& bounds,
                         std::uint64_t seed, std::uint64_t path_index, PathOptions options) {
    PathRecord record;
    record.path_index = path_index;
    PathRecorder recorder(s, record);
    RngStream rng(seed, path_index);
    FluxLedger ledger(s.num_edges());

    HybridState y = initial_hybrid_state(s);
    std::vector<double> mu = solver.capacities(y.regimes);
    const std::vector<double> grid = output_times(s);
    const double horizon = s.numerics.horizon;
    const double dt = solver.grid().dt;
    const double tol = 1e-9 * dt;

    // The anchor only moves by whole grid intervals or to an accepted jump.
    // Candidate and off-grid output states are partial-step views of it, so
    // rejected candidates leave the trajectory untouched.
    HybridState anchor = y;
    FluxLedger anchor_ledger = ledger;
    HybridState view;
    FluxLedger view_ledger;
    auto next_grid = [&](double t) {
        double g = std::ceil(t / dt - 1e-9) * dt;
        if (g <= t + tol) g += dt;
        return g;
    };

    recorder.sample(y, ledger);
    std::size_t next_output = 1;

    const AdvanceFn advance = [&](HybridState& state, double target) {
        for (;;) {
            const double g = next_grid(anchor.net.time);
            const bool output_due = next_output < grid.size() && grid[next_output] <= target + tol;
            if (output_due && grid[next_output] < g - tol) {
                view = anchor;
                view_ledger = anchor_ledger;
                solver.evolve(view.net, mu, grid[next_output], view_ledger);
                recorder.sample(view, view_ledger);
                ++next_output;
                continue;
            }
            if (g > target + tol) break;
            const bool sample_here = output_due && grid[next_output] <= g + tol;
            solver.evolve(anchor.net, mu, sample_here ? grid[next_output] : g, anchor_ledger);
            if (sample_here) {
                recorder.sample(anchor, anchor_ledger);
                ++next_output;
            }
        }
        state = anchor;
        ledger = anchor_ledger;
        if (target > state.net.time) solver.evolve(state.net, mu, target, ledger);
    };

    try {
        for (;;) {
            const auto outcome = next_jump(y, bounds.network, horizon, s, rng, advance, &record.candidates);
            if (std::holds_alternative<HorizonReached>(outcome)) break;
            auto event = sample_post_jump(std::get<AcceptedJump>(outcome).time, y, s, rng);
            mu[event.edge] = s.processors[event.edge].capacities[static_cast<std::size_t>(event.to)];
            anchor = y;
            anchor_ledger = ledger;
            if (options.record_jump_states) event.post_jump = y;
            record.events.push_back(std::move(event));
        }
    } catch (const BoundViolation& v) {
        throw BoundViolation(v.time, v.rate, v.bound, path_index);
    }
    return record;
}

PathRecord simulate_path(const Scenario& s, std::uint64_t seed, std::uint64_t path_index, PathOptions options) {
    require_valid(s);
    const DetSolver solver(s);
    return simulate_path(s, solver, uniform_bound(s), seed, path_index, options);
}

}  // namespace pnsim
