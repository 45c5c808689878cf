#pragma once

#include "pnsim/measures.hpp"
#include "pnsim/pdmp.hpp"
#include "pnsim/scenario.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace pnsim {

struct EnsembleConfig {
    std::size_t samples = 1;
    std::uint64_t seed = 0;
    std::size_t workers = 0;               // 0: PNSIM_WORKERS or hardware concurrency
    std::size_t retain = 0;                // keep the first `retain` paths in full
    std::optional<double> output_step;     // overrides the scenario's output step
    /// Called from worker threads once per finished path; must be thread-safe.
    std::function<void(const PathRecord&)> on_path;
};

struct EnsembleResult {
    EnsembleStats stats;
    std::vector<PathRecord> retained;
    std::size_t candidates = 0;
    std::size_t jumps = 0;
    std::size_t workers_used = 0;
    double wall_seconds = 0.0;
};

/// Worker count from PNSIM_WORKERS, else the hardware concurrency (at least 1).
[[nodiscard]] std::size_t default_worker_count();

/// Simulates paths 0 .. samples-1 with streams keyed by (seed, index).
///
/// Paths are grouped into fixed blocks whose layout depends only on the
/// sample count; each block is accumulated in index order and blocks are
/// merged in order, so results do not depend on the worker count. A bound
/// violation aborts the run with the lowest offending path index.
[[nodiscard]] EnsembleResult run_ensemble(const Scenario& s, const EnsembleConfig& cfg);

}  // namespace pnsim
