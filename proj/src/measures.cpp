#include "pnsim/measures.hpp"

#include "pnsim/rate_models.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace pnsim {

PathRecorder::PathRecorder(const Scenario& s, PathRecord& record) : scenario_(&s), record_(&record) {
    record_->num_edges = s.num_edges();
}

void PathRecorder::sample(const HybridState& y, const FluxLedger& ledger) {
    const auto& s = *scenario_;
    auto& r = *record_;
    const std::size_t n = s.num_edges();
    const double t = y.net.time;

    double queue_total = 0.0;
    double mass = 0.0;
    for (EdgeId e = 0; e < n; ++e) {
        const auto& p = s.processors[e];
        const double mu = p.capacities[static_cast<std::size_t>(y.regimes[e])];
        const auto& rho = y.net.densities[e];
        double stored = 0.0;
        double peak = 0.0;
        for (double c : rho) {
            stored += c;
            peak = std::max(peak, c);
        }
        r.regime.push_back(y.regimes[e]);
        r.capacity.push_back(mu);
        r.queue.push_back(y.net.queues[e]);
        r.utilization.push_back(ur(s, y.net, e, mu));
        r.work_in_progress.push_back(rwip(s, y.net, e));
        r.exit_flux.push_back(flux(rho.back(), mu, p.velocity));
        r.boundary_flux.push_back(ledger.boundary_flux.empty() ? 0.0 : ledger.boundary_flux[e]);
        r.peak_flux.push_back(p.velocity * peak);
        queue_total += y.net.queues[e];
        mass += y.net.queues[e] + s.numerics.dx * stored;
    }

    if (r.times.empty()) {
        r.q_net.push_back(0.0);
    } else {
        const std::size_t prev = r.times.size() - 1;
        double prev_total = 0.0;
        for (EdgeId e = 0; e < n; ++e) prev_total += r.queue[r.at(prev, e)];
        r.q_net.push_back(r.q_net.back() + 0.5 * (t - r.times.back()) * (prev_total + queue_total));
    }
    r.times.push_back(t);
    r.g_out_net.push_back(ledger.outflow);
    r.g_in_net.push_back(ledger.inflow);
    r.network_mass.push_back(mass);
}

namespace {

std::size_t output_index(const PathRecord& path, double t) {
    const double tol = 1e-9 * std::max(1.0, std::abs(t));
    auto it = std::lower_bound(path.times.begin(), path.times.end(), t - tol);
    if (it == path.times.end() || std::abs(*it - t) > tol) {
        std::ostringstream os;
        os << "t = " << t << " is not an output time of the path";
        throw std::domain_error(os.str());
    }
    return static_cast<std::size_t>(std::distance(path.times.begin(), it));
}

}  // namespace

double q_net(const PathRecord& path, double t) { return path.q_net[output_index(path, t)]; }

double g_net_out(const PathRecord& path, double t) { return path.g_out_net[output_index(path, t)]; }

double discrete_tv(std::span<const double> rho) {
    double tv = 0.0;
    for (std::size_t j = 1; j < rho.size(); ++j) tv += std::abs(rho[j] - rho[j - 1]);
    return tv;
}

Histogram make_histogram(std::span<const double> samples, std::size_t bins) {
    Histogram h;
    if (bins == 0) throw std::invalid_argument("histogram needs at least one bin");
    h.counts.assign(bins, 0);
    double lo = 0.0;
    double hi = 1.0;
    if (!samples.empty()) {
        const auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
        lo = *mn;
        hi = *mx > *mn ? *mx : *mn + 1.0;
    }
    const double width = (hi - lo) / static_cast<double>(bins);
    h.edges.resize(bins + 1);
    for (std::size_t k = 0; k <= bins; ++k) h.edges[k] = lo + width * static_cast<double>(k);
    h.edges.back() = hi;
    for (double x : samples) {
        auto k = static_cast<std::size_t>((x - lo) / width);
        h.counts[std::min(k, bins - 1)] += 1;
    }
    return h;
}

EnsembleStats::EnsembleStats(std::vector<double> times, std::size_t num_edges)
    : times_(std::move(times)),
      num_edges_(num_edges),
      edge_(kEdgeMeasures, std::vector<RunningStat>(times_.size() * num_edges)),
      network_(kNetworkMeasures, std::vector<RunningStat>(times_.size())),
      terminal_(kNetworkMeasures) {}

void EnsembleStats::accumulate(const PathRecord& path) {
    if (path.num_edges != num_edges_ || path.times.size() != times_.size())
        throw std::domain_error("path does not match the ensemble output grid");
    for (std::size_t k = 0; k < times_.size(); ++k)
        if (std::abs(path.times[k] - times_[k]) > 1e-9 * std::max(1.0, std::abs(times_[k])))
            throw std::domain_error("path does not match the ensemble output grid");

    const std::size_t total = times_.size() * num_edges_;
    auto& cap = edge_[static_cast<std::size_t>(EdgeMeasure::Capacity)];
    auto& que = edge_[static_cast<std::size_t>(EdgeMeasure::Queue)];
    auto& uti = edge_[static_cast<std::size_t>(EdgeMeasure::Utilization)];
    auto& wip = edge_[static_cast<std::size_t>(EdgeMeasure::WorkInProgress)];
    auto& ext = edge_[static_cast<std::size_t>(EdgeMeasure::ExitFlux)];
    for (std::size_t i = 0; i < total; ++i) {
        cap[i].push(path.capacity[i]);
        que[i].push(path.queue[i]);
        uti[i].push(path.utilization[i]);
        wip[i].push(path.work_in_progress[i]);
        ext[i].push(path.exit_flux[i]);
    }
    auto& qn = network_[static_cast<std::size_t>(NetworkMeasure::QNet)];
    auto& go = network_[static_cast<std::size_t>(NetworkMeasure::GOutNet)];
    for (std::size_t k = 0; k < times_.size(); ++k) {
        qn[k].push(path.q_net[k]);
        go[k].push(path.g_out_net[k]);
    }
    terminal_[static_cast<std::size_t>(NetworkMeasure::QNet)].push_back(path.q_net.back());
    terminal_[static_cast<std::size_t>(NetworkMeasure::GOutNet)].push_back(path.g_out_net.back());
    ++count_;
}

void EnsembleStats::merge(const EnsembleStats& other) {
    if (other.count_ == 0) return;
    if (count_ == 0 && times_.empty()) {
        *this = other;
        return;
    }
    if (other.num_edges_ != num_edges_ || other.times_.size() != times_.size())
        throw std::domain_error("cannot merge statistics on different output grids");
    for (std::size_t m = 0; m < kEdgeMeasures; ++m)
        for (std::size_t i = 0; i < edge_[m].size(); ++i) edge_[m][i].merge(other.edge_[m][i]);
    for (std::size_t m = 0; m < kNetworkMeasures; ++m) {
        for (std::size_t k = 0; k < network_[m].size(); ++k) network_[m][k].merge(other.network_[m][k]);
        terminal_[m].insert(terminal_[m].end(), other.terminal_[m].begin(), other.terminal_[m].end());
    }
    count_ += other.count_;
}

const RunningStat& EnsembleStats::edge(EdgeMeasure m, std::size_t sample, EdgeId e) const {
    return edge_.at(static_cast<std::size_t>(m)).at(sample * num_edges_ + e);
}

const RunningStat& EnsembleStats::network(NetworkMeasure m, std::size_t sample) const {
    return network_.at(static_cast<std::size_t>(m)).at(sample);
}

const std::vector<double>& EnsembleStats::terminal(NetworkMeasure m) const {
    return terminal_.at(static_cast<std::size_t>(m));
}

Histogram EnsembleStats::histogram(NetworkMeasure m, std::size_t bins) const {
    return make_histogram(terminal(m), bins);
}

EnsembleStats accumulate(EnsembleStats stats, const PathRecord& path) {
    stats.accumulate(path);
    return stats;
}

}  // namespace pnsim
