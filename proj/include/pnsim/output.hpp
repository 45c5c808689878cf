#pragma once

#include "pnsim/measures.hpp"
#include "pnsim/scenario.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace pnsim {

/// Shortest decimal text that parses back to the same double.
[[nodiscard]] std::string format_double(double x);

[[nodiscard]] std::string sha256_file(const std::filesystem::path& file);

/// path.csv: t, then per edge E regime_E (one-based), capacity_E, queue_E,
/// ur_E, rwip_E, exit_flux_E, boundary_flux_E, then q_net, g_net_out,
/// g_net_in, network_mass.
void write_path_csv(const std::filesystem::path& file, const Scenario& s, const PathRecord& path);

/// events.csv: time, edge, from, to (one-based regimes).
void write_events_csv(const std::filesystem::path& file, const Scenario& s, const PathRecord& path);

/// One ensemble run of a beta sweep.
struct SweepEntry {
    std::optional<double> beta;
    EnsembleStats stats;
};

/// mean_capacity.csv and mean_queue.csv: beta, t, then mean_E and std_E per edge.
void write_edge_series_csv(const std::filesystem::path& file, const Scenario& s,
                           const std::vector<SweepEntry>& sweep, EdgeMeasure measure);
/// network_means.csv: beta, samples, mean and variance of q_net(T) and g_net_out(T).
void write_network_means_csv(const std::filesystem::path& file, const std::vector<SweepEntry>& sweep);
/// hist_qnet.csv / hist_gout.csv: beta, bin_lo, bin_hi, count (40 bins per beta).
void write_histogram_csv(const std::filesystem::path& file, const std::vector<SweepEntry>& sweep,
                         NetworkMeasure measure);

struct CheckReport {
    std::vector<std::string> failures;
    std::vector<std::string> notes;

    [[nodiscard]] bool ok() const noexcept { return failures.empty(); }
};

/// Re-verifies the invariants of the files in an output directory: monotone
/// time and accumulated columns, nonnegative queues, mass balance at the
/// final row (relative tolerance 1e-8), event ordering, histogram totals,
/// and the manifest's file list and scenario hash.
[[nodiscard]] CheckReport check_outputs(const std::filesystem::path& dir);

}  // namespace pnsim
