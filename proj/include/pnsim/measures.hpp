#pragma once

#include "pnsim/det_solver.hpp"
#include "pnsim/hybrid_state.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace pnsim {

/// Samples of one sample path on the output grid plus its exact jump list.
/// Per-edge series are stored row-major: index = sample * num_edges + edge.
struct PathRecord {
    std::uint64_t path_index = 0;
    std::size_t num_edges = 0;
    std::vector<double> times;

    std::vector<int> regime;
    std::vector<double> capacity;
    std::vector<double> queue;
    std::vector<double> utilization;
    std::vector<double> work_in_progress;
    std::vector<double> exit_flux;
    std::vector<double> boundary_flux;
    std::vector<double> peak_flux;      // max over cells of v * rho

    std::vector<double> q_net;          // accumulated network queue load
    std::vector<double> g_out_net;      // accumulated network outflow
    std::vector<double> g_in_net;       // accumulated network inflow
    std::vector<double> network_mass;   // queues plus goods in processors

    std::vector<JumpEvent> events;
    std::size_t candidates = 0;         // thinning candidates drawn

    [[nodiscard]] std::size_t samples() const noexcept { return times.size(); }
    [[nodiscard]] std::size_t at(std::size_t sample, EdgeId e) const noexcept { return sample * num_edges + e; }

    bool operator==(const PathRecord&) const = default;
};

/// Appends output-grid samples to a PathRecord.
class PathRecorder {
public:
    PathRecorder(const Scenario& s, PathRecord& record);

    void sample(const HybridState& y, const FluxLedger& ledger);

private:
    const Scenario* scenario_;
    PathRecord* record_;
};

/// Accumulated network queue load at output time t (trapezoidal rule on the
/// output grid). Throws std::domain_error when t is not an output time.
[[nodiscard]] double q_net(const PathRecord& path, double t);
/// Accumulated network outflow at output time t, from the solver's flux ledger.
[[nodiscard]] double g_net_out(const PathRecord& path, double t);

[[nodiscard]] double discrete_tv(std::span<const double> rho);

/// One-pass mean / unbiased variance with pairwise merge.
class RunningStat {
public:
    void push(double x) noexcept {
        ++n_;
        const double delta = x - mean_;
        mean_ += delta / static_cast<double>(n_);
        m2_ += delta * (x - mean_);
    }

    void merge(const RunningStat& other) noexcept {
        if (other.n_ == 0) return;
        if (n_ == 0) {
            *this = other;
            return;
        }
        const double na = static_cast<double>(n_);
        const double nb = static_cast<double>(other.n_);
        const double total = na + nb;
        const double delta = other.mean_ - mean_;
        mean_ += delta * nb / total;
        m2_ += other.m2_ + delta * delta * na * nb / total;
        n_ += other.n_;
    }

    [[nodiscard]] std::size_t count() const noexcept { return n_; }
    [[nodiscard]] double mean() const noexcept { return mean_; }
    [[nodiscard]] double m2() const noexcept { return m2_; }
    [[nodiscard]] double variance() const noexcept { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }

private:
    std::size_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

struct Histogram {
    std::vector<double> edges;         // bins + 1 edges
    std::vector<std::size_t> counts;   // bins
};

/// Uniform bins spanning [min, max] of the samples; the last bin is closed.
[[nodiscard]] Histogram make_histogram(std::span<const double> samples, std::size_t bins = 40);

enum class EdgeMeasure { Capacity, Queue, Utilization, WorkInProgress, ExitFlux };
enum class NetworkMeasure { QNet, GOutNet };

inline constexpr std::size_t kEdgeMeasures = 5;
inline constexpr std::size_t kNetworkMeasures = 2;

/// Ensemble statistics per output time for every tracked measure, plus the
/// terminal network measures of each path (in accumulation order) for
/// histograms.
class EnsembleStats {
public:
    EnsembleStats() = default;
    EnsembleStats(std::vector<double> times, std::size_t num_edges);

    /// Throws std::domain_error if the path lives on a different output grid.
    void accumulate(const PathRecord& path);
    void merge(const EnsembleStats& other);

    [[nodiscard]] std::size_t count() const noexcept { return count_; }
    [[nodiscard]] const std::vector<double>& times() const noexcept { return times_; }
    [[nodiscard]] std::size_t num_edges() const noexcept { return num_edges_; }

    [[nodiscard]] const RunningStat& edge(EdgeMeasure m, std::size_t sample, EdgeId e) const;
    [[nodiscard]] const RunningStat& network(NetworkMeasure m, std::size_t sample) const;
    [[nodiscard]] const std::vector<double>& terminal(NetworkMeasure m) const;
    [[nodiscard]] Histogram histogram(NetworkMeasure m, std::size_t bins = 40) const;

private:
    std::vector<double> times_;
    std::size_t num_edges_ = 0;
    std::size_t count_ = 0;
    std::vector<std::vector<RunningStat>> edge_;     // [measure][sample * edges + e]
    std::vector<std::vector<RunningStat>> network_;  // [measure][sample]
    std::vector<std::vector<double>> terminal_;      // [measure][path]
};

[[nodiscard]] EnsembleStats accumulate(EnsembleStats stats, const PathRecord& path);

}  // namespace pnsim
