#include "pnsim/rate_models.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

namespace pnsim {

double ur(const Scenario& s, const NetworkState& state, EdgeId e, double mu) {
    const auto& p = s.processors[e];
    const double mu_max = p.max_capacity();
    if (!(mu_max > 0.0)) return 0.0;
    double produced = 0.0;
    for (double rho : state.densities[e]) produced += flux(rho, mu, p.velocity);
    return s.numerics.dx * produced / (mu_max * p.length);
}

double ur(const Scenario& s, const NetworkState& state, std::span<const int> regimes, EdgeId e) {
    return ur(s, state, e, s.processors[e].capacities.at(static_cast<std::size_t>(regimes[e])));
}

double rwip(const Scenario& s, const NetworkState& state, EdgeId e) {
    const auto& p = s.processors[e];
    const double mu_max = p.max_capacity();
    if (!(mu_max > 0.0)) return 0.0;
    double stored = 0.0;
    for (double rho : state.densities[e]) stored += rho;
    return p.velocity * s.numerics.dx * stored / (mu_max * p.length);
}

double failure_rate(const LinearLoadParams& p, double utilization) noexcept {
    return p.down_min() + (p.down_max() - p.down_min()) * utilization;
}

double repair_rate(const LinearLoadParams& p, double work_in_progress) noexcept {
    const double w = std::clamp(work_in_progress, 0.0, 1.0);
    return p.rep_max() - (p.rep_max() - p.rep_min()) * w;
}

double rate(const Scenario& s, EdgeId e, int i, int j, double /*t*/, const NetworkState& state,
            std::span<const int> /*regimes*/) {
    if (i == j) throw std::invalid_argument("rate: the diagonal is not a transition rate");
    const auto& spec = s.rates;
    if (spec.variant == RateModelSpec::Variant::ConstantMatrix)
        return spec.matrices[e].at(static_cast<std::size_t>(i)).at(static_cast<std::size_t>(j));

    // Regime 0 is the failed state, regime 1 full capacity.
    const auto& params = spec.linear[e];
    if (i == 1 && j == 0) return failure_rate(params, ur(s, state, e, s.processors[e].capacities[1]));
    if (i == 0 && j == 1) return repair_rate(params, rwip(s, state, e));
    throw std::invalid_argument("rate: load-dependent law has only two regimes");
}

double psi(const Scenario& s, double t, std::span<const int> regimes, const NetworkState& state) {
    double total = 0.0;
    for (EdgeId e = 0; e < s.num_edges(); ++e) {
        const int from = regimes[e];
        const int states = static_cast<int>(s.processors[e].num_regimes());
        for (int to = 0; to < states; ++to)
            if (to != from) total += rate(s, e, from, to, t, state, regimes);
    }
    return total;
}

RateBounds uniform_bound(const Scenario& s) {
    RateBounds bounds;
    const auto& spec = s.rates;
    bounds.per_edge.resize(s.num_edges(), 0.0);
    for (EdgeId e = 0; e < s.num_edges(); ++e) {
        double bound = 0.0;
        if (spec.variant == RateModelSpec::Variant::ConstantMatrix) {
            const auto& m = spec.matrices.at(e);
            for (std::size_t i = 0; i < m.size(); ++i) {
                double row = 0.0;
                for (std::size_t j = 0; j < m[i].size(); ++j)
                    if (i != j) row += m[i][j];
                bound = std::max(bound, row);
            }
        } else {
            const auto& p = spec.linear.at(e);
            bound = std::max(p.down_max(), p.rep_max());
        }
        bounds.per_edge[e] = bound;
        bounds.network += bound;
    }
    if (spec.network_bound) bounds.network = std::max(bounds.network, *spec.network_bound);
    return bounds;
}

}  // namespace pnsim
