#pragma once

#include "pnsim/scenario.hpp"

#include <filesystem>
#include <string>

namespace pnsim {

/// The document is not a scenario: bad JSON, missing keys, wrong types.
/// Semantic problems (negative queues, rates not summing to one, ...) are
/// reported by validate_scenario instead.
class ScenarioFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Scenario document schema (JSON):
///
///   topology.edges      [{id, from, to}]; vertex ids are strings or numbers
///   processors          one per edge, in edge order:
///                       {a = 0, length = 1, velocity, capacities: [..],
///                        initial_regime = number of capacities (one-based)}
///   distribution        {vertex: {edge: signal}}; optional for vertices
///                       with a single outgoing edge (rate 1)
///   inflows             {vertex: signal}
///   rates               {variant: "linear_load", beta, down_ref | mean_up_time,
///                        rep_ref | mean_repair_time}  (scalars or per-edge arrays)
///                       {variant: "constant_matrix", matrices: [C x C per edge]}
///                       optional "bound": dominating network rate for thinning
///   numerics            {dx, dt_policy: "cfl-equal" | dt, horizon, output_step}
///   initial             {queues: number | [..], densities: number | [number | [cells]]}
///
/// A signal is a number (constant) or {breakpoints: [0, ..], values: [..]}.
[[nodiscard]] Scenario parse_scenario(const std::string& json_text);
[[nodiscard]] Scenario load_scenario(const std::filesystem::path& file);

/// Sets beta on every edge of a load-dependent scenario.
[[nodiscard]] Scenario with_beta(Scenario s, double beta);

}  // namespace pnsim
