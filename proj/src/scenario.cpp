#include "pnsim/scenario.hpp"

#include "pnsim/rate_models.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace pnsim {

Topology::Topology(std::vector<std::string> vertex_names, std::vector<Edge> edges)
    : vertex_names_(std::move(vertex_names)),
      edges_(std::move(edges)),
      in_(vertex_names_.size()),
      out_(vertex_names_.size()) {
    for (EdgeId e = 0; e < edges_.size(); ++e) {
        const auto& edge = edges_[e];
        if (edge.from >= vertex_names_.size() || edge.to >= vertex_names_.size())
            throw ModelError("edge '" + edge.name + "' references a vertex that does not exist");
        out_[edge.from].push_back(e);
        in_[edge.to].push_back(e);
    }
}

std::optional<VertexId> Topology::find_vertex(const std::string& name) const {
    auto it = std::find(vertex_names_.begin(), vertex_names_.end(), name);
    if (it == vertex_names_.end()) return std::nullopt;
    return static_cast<VertexId>(std::distance(vertex_names_.begin(), it));
}

std::optional<EdgeId> Topology::find_edge(const std::string& name) const {
    for (EdgeId e = 0; e < edges_.size(); ++e)
        if (edges_[e].name == name) return e;
    return std::nullopt;
}

std::vector<VertexId> Topology::inflow_vertices() const {
    std::vector<VertexId> out;
    for (VertexId v = 0; v < num_vertices(); ++v)
        if (is_inflow(v)) out.push_back(v);
    return out;
}

std::vector<VertexId> Topology::outflow_vertices() const {
    std::vector<VertexId> out;
    for (VertexId v = 0; v < num_vertices(); ++v)
        if (is_outflow(v)) out.push_back(v);
    return out;
}

bool Topology::has_cycle() const {
    // Kahn's algorithm: a cycle remains iff not every vertex gets popped.
    std::vector<std::size_t> indeg(num_vertices());
    for (const auto& e : edges_) ++indeg[e.to];
    std::vector<VertexId> ready;
    for (VertexId v = 0; v < num_vertices(); ++v)
        if (indeg[v] == 0) ready.push_back(v);
    std::size_t popped = 0;
    while (!ready.empty()) {
        const VertexId v = ready.back();
        ready.pop_back();
        ++popped;
        for (EdgeId e : out_[v])
            if (--indeg[edges_[e].to] == 0) ready.push_back(edges_[e].to);
    }
    return popped != num_vertices();
}

std::vector<VertexId> Topology::unreachable_vertices() const {
    std::vector<bool> seen(num_vertices(), false);
    std::vector<VertexId> stack = inflow_vertices();
    for (VertexId v : stack) seen[v] = true;
    while (!stack.empty()) {
        const VertexId v = stack.back();
        stack.pop_back();
        for (EdgeId e : out_[v]) {
            const VertexId w = edges_[e].to;
            if (!seen[w]) {
                seen[w] = true;
                stack.push_back(w);
            }
        }
    }
    std::vector<VertexId> out;
    for (VertexId v = 0; v < num_vertices(); ++v)
        if (!seen[v]) out.push_back(v);
    return out;
}

double Processor::max_capacity() const {
    return capacities.empty() ? 0.0 : *std::max_element(capacities.begin(), capacities.end());
}

double DistributionRates::operator()(VertexId v, EdgeId e, double t) const {
    auto vit = by_vertex.find(v);
    if (vit == by_vertex.end()) throw ModelError("no distribution rates for vertex");
    auto eit = vit->second.find(e);
    if (eit == vit->second.end()) throw ModelError("no distribution rate for edge at vertex");
    return eit->second(t);
}

std::size_t Scenario::cells(EdgeId e) const {
    return static_cast<std::size_t>(std::llround(processors.at(e).length / numerics.dx));
}

double Scenario::time_step() const {
    if (numerics.dt) return *numerics.dt;
    double vmax = 0.0;
    for (const auto& p : processors) vmax = std::max(vmax, p.velocity);
    if (!(vmax > 0.0)) throw ModelError("cannot derive a time step without a positive velocity");
    return numerics.dx / vmax;
}

double Scenario::inflow(VertexId v, double t) const {
    auto it = inflows.find(v);
    if (it == inflows.end()) throw ModelError("no inflow signal for vertex " + topology.vertex_name(v));
    return it->second(t);
}

double Scenario::queue_bound(EdgeId e) const {
    const VertexId s = topology.edge(e).from;
    const double q0 = initial.queues.at(e);
    const double horizon = numerics.horizon;
    if (topology.is_inflow(s)) return q0 + inflows.at(s).integral(0.0, horizon);
    double upstream = 0.0;
    for (EdgeId in : topology.in_edges(s)) upstream += processors.at(in).max_capacity();
    const auto& routing = distribution.by_vertex.at(s).at(e);
    return q0 + upstream * routing.integral(0.0, horizon);
}

double Scenario::flux_density_bound(EdgeId e) const {
    const auto& p = processors.at(e);
    const auto& rho = initial.densities.at(e);
    const double rho_max = rho.empty() ? 0.0 : *std::max_element(rho.begin(), rho.end());
    return std::max(p.velocity * rho_max, p.max_capacity());
}

double Scenario::initial_mass() const {
    double total = 0.0;
    for (EdgeId e = 0; e < num_edges(); ++e) {
        double cell_sum = 0.0;
        for (double r : initial.densities.at(e)) cell_sum += r;
        total += initial.queues.at(e) + numerics.dx * cell_sum;
    }
    return total;
}

double Scenario::cumulative_inflow(double t) const {
    double total = 0.0;
    for (EdgeId e = 0; e < num_edges(); ++e) {
        const VertexId s = topology.edge(e).from;
        if (topology.is_inflow(s)) total += inflows.at(s).integral(0.0, t);
    }
    return total;
}

namespace {

class Reporter {
public:
    explicit Reporter(ValidationReport& r) : report_(r) {}

    template <typename... Parts>
    void violation(const Parts&... parts) {
        report_.violations.push_back(join(parts...));
    }
    template <typename... Parts>
    void warning(const Parts&... parts) {
        report_.warnings.push_back(join(parts...));
    }

private:
    template <typename... Parts>
    static std::string join(const Parts&... parts) {
        std::ostringstream os;
        os.precision(15);
        (os << ... << parts);
        return os.str();
    }
    ValidationReport& report_;
};

bool is_multiple(double value, double step) {
    const double ratio = value / step;
    return std::abs(ratio - std::round(ratio)) <= 1e-9 * std::max(1.0, std::abs(ratio));
}

void check_signal(Reporter& rep, const PiecewiseConstantSignal& sig, const std::string& what,
                  double horizon, double dt) {
    for (const auto& p : sig.problems()) rep.violation(what, ": ", p);
    if (std::abs(sig.end() - horizon) > 1e-12 * std::max(1.0, horizon))
        rep.violation(what, ": signal end ", sig.end(), " differs from horizon ", horizon);
    if (dt > 0.0) {
        for (double b : sig.breakpoints()) {
            if (!is_multiple(b, dt)) {
                rep.warning(what, ": breakpoint ", b, " is not on the time grid");
                break;
            }
        }
    }
}

void check_distribution(Reporter& rep, const Scenario& s, double dt) {
    const auto& topo = s.topology;
    for (VertexId v = 0; v < topo.num_vertices(); ++v) {
        const auto& outs = topo.out_edges(v);
        if (outs.empty() || topo.is_inflow(v)) continue;
        const std::string vname = topo.vertex_name(v);
        auto vit = s.distribution.by_vertex.find(v);
        if (vit == s.distribution.by_vertex.end()) {
            rep.violation("missing distribution rates at vertex ", vname);
            continue;
        }
        bool complete = true;
        std::set<double> times;
        for (EdgeId e : outs) {
            auto eit = vit->second.find(e);
            if (eit == vit->second.end()) {
                rep.violation("missing distribution rate for edge ", topo.edge(e).name, " at vertex ", vname);
                complete = false;
                continue;
            }
            const std::string what = "distribution " + vname + "->" + topo.edge(e).name;
            check_signal(rep, eit->second, what, s.numerics.horizon, dt);
            if (!eit->second.problems().empty()) complete = false;
            for (double b : eit->second.breakpoints()) times.insert(b);
            if (eit->second.max_value() > 1.0) rep.violation(what, ": rate exceeds 1");
        }
        for (const auto& [e, sig] : vit->second) {
            if (std::find(outs.begin(), outs.end(), e) == outs.end())
                rep.violation("distribution rate at vertex ", vname, " for edge that does not leave it");
        }
        if (!complete) continue;
        for (double t : times) {
            if (t > s.numerics.horizon) continue;
            double sum = 0.0;
            for (EdgeId e : outs) sum += vit->second.at(e)(t);
            if (std::abs(sum - 1.0) > 1e-12) {
                rep.violation("distribution rates sum ", sum, " != 1 at vertex ", vname, " (t = ", t, ")");
                break;
            }
        }
    }
}

void check_rates(Reporter& rep, const Scenario& s) {
    const auto& spec = s.rates;
    const std::size_t n = s.num_edges();
    bool shape_ok = true;
    if (spec.variant == RateModelSpec::Variant::ConstantMatrix) {
        if (spec.matrices.size() != n) {
            rep.violation("rate matrices: expected ", n, ", got ", spec.matrices.size());
            return;
        }
        for (EdgeId e = 0; e < n; ++e) {
            const auto& m = spec.matrices[e];
            const std::size_t c = s.processors[e].num_regimes();
            bool square = m.size() == c;
            for (const auto& row : m) square = square && row.size() == c;
            if (!square) {
                rep.violation("rate matrix of edge ", s.topology.edge(e).name, " must be ", c, "x", c);
                shape_ok = false;
                continue;
            }
            for (std::size_t i = 0; i < c; ++i)
                for (std::size_t j = 0; j < c; ++j)
                    if (i != j && !(m[i][j] >= 0.0 && std::isfinite(m[i][j]))) {
                        rep.violation("rate matrix of edge ", s.topology.edge(e).name,
                                      " has a negative or non-finite entry");
                        shape_ok = false;
                    }
        }
    } else {
        if (spec.linear.size() != n) {
            rep.violation("load-dependent rate parameters: expected ", n, ", got ", spec.linear.size());
            return;
        }
        for (EdgeId e = 0; e < n; ++e) {
            const auto& p = spec.linear[e];
            const auto& proc = s.processors[e];
            const std::string& name = s.topology.edge(e).name;
            if (proc.num_regimes() != 2) {
                rep.violation("load-dependent rates need exactly 2 capacity states on edge ", name);
                shape_ok = false;
            } else if (proc.capacities[0] > proc.capacities[1]) {
                rep.violation("load-dependent rates need capacity(1) <= capacity(2) on edge ", name);
                shape_ok = false;
            }
            if (!(p.down_ref > 0.0)) rep.violation("down_ref must be positive on edge ", name);
            if (!(p.rep_ref > 0.0)) rep.violation("rep_ref must be positive on edge ", name);
            if (!(p.beta >= 0.0 && p.beta <= 1.0)) rep.violation("beta must lie in [0, 1] on edge ", name);
        }
    }
    if (spec.network_bound && shape_ok) {
        RateModelSpec plain = spec;
        plain.network_bound.reset();
        Scenario copy = s;
        copy.rates = plain;
        const double computed = uniform_bound(copy).network;
        if (!(*spec.network_bound >= computed))
            rep.violation("rate bound override ", *spec.network_bound, " is below the computed bound ", computed);
    }
}

}  // namespace

ValidationReport validate_scenario(const Scenario& s) {
    ValidationReport report;
    Reporter rep(report);
    const auto& topo = s.topology;
    const std::size_t n = s.num_edges();

    if (n == 0) rep.violation("network has no edges");
    if (s.processors.size() != n) {
        rep.violation("expected ", n, " processors, got ", s.processors.size());
        return report;
    }

    const auto& num = s.numerics;
    if (!(num.dx > 0.0)) rep.violation("dx must be positive");
    if (!(num.horizon > 0.0)) rep.violation("horizon must be positive");
    if (!(num.output_step > 0.0)) rep.violation("output_step must be positive");

    double vmax = 0.0;
    for (EdgeId e = 0; e < n; ++e) {
        const auto& p = s.processors[e];
        const std::string& name = topo.edge(e).name;
        if (!(p.velocity > 0.0)) rep.violation("velocity must be positive on edge ", name);
        else vmax = std::max(vmax, p.velocity);
        if (!(p.length > 0.0)) rep.violation("length must be positive on edge ", name);
        if (p.capacities.empty()) rep.violation("edge ", name, " needs at least one capacity state");
        for (double mu : p.capacities)
            if (!(mu >= 0.0) || !std::isfinite(mu)) rep.violation("capacities must be nonnegative on edge ", name);
        if (num.dx > 0.0 && p.length > 0.0) {
            const double ratio = p.length / num.dx;
            if (std::abs(ratio - std::round(ratio)) > 1e-12 * std::max(1.0, ratio) || std::round(ratio) < 1.0)
                rep.violation("dx does not divide the length of edge ", name);
        }
    }
    if (vmax > 0.0 && num.dx > 0.0) report.max_stable_dt = num.dx / vmax;

    double dt = 0.0;
    if (num.dt) {
        dt = *num.dt;
        if (!(dt > 0.0)) rep.violation("dt must be positive");
        else if (report.max_stable_dt > 0.0 && dt > report.max_stable_dt * (1.0 + 1e-12))
            rep.violation("dt ", dt, " violates the CFL bound ", report.max_stable_dt);
    } else {
        dt = report.max_stable_dt;
    }
    if (num.horizon > 0.0 && num.output_step > 0.0) {
        if (!is_multiple(num.horizon, num.output_step))
            rep.violation("output_step does not divide the horizon");
        if (dt > 0.0 && !is_multiple(num.output_step, dt))
            rep.warning("output_step is not a multiple of dt; output sampling splits solver steps");
    }

    for (VertexId v : topo.inflow_vertices()) {
        auto it = s.inflows.find(v);
        if (it == s.inflows.end()) {
            if (!topo.out_edges(v).empty()) rep.violation("missing inflow signal at vertex ", topo.vertex_name(v));
            continue;
        }
        check_signal(rep, it->second, "inflow " + topo.vertex_name(v), num.horizon, dt);
        if (topo.out_edges(v).size() > 1)
            rep.warning("inflow vertex ", topo.vertex_name(v), " feeds ", topo.out_edges(v).size(),
                        " edges; each receives the full inflow");
    }
    for (const auto& [v, sig] : s.inflows)
        if (v >= topo.num_vertices() || !topo.is_inflow(v))
            rep.violation("inflow given at vertex ", v < topo.num_vertices() ? topo.vertex_name(v) : "?",
                          " which has incoming edges");

    check_distribution(rep, s, dt);

    const auto& init = s.initial;
    if (init.queues.size() != n) rep.violation("initial.queues: expected ", n, " entries");
    else
        for (EdgeId e = 0; e < n; ++e)
            if (!(init.queues[e] >= 0.0)) rep.violation("initial.queues[", topo.edge(e).name, "] must be >= 0");
    if (init.densities.size() != n) {
        rep.violation("initial.densities: expected ", n, " entries");
    } else if (num.dx > 0.0) {
        for (EdgeId e = 0; e < n; ++e) {
            if (init.densities[e].size() != s.cells(e))
                rep.violation("initial.densities[", topo.edge(e).name, "]: expected ", s.cells(e), " cells");
            for (double r : init.densities[e])
                if (!(r >= 0.0)) {
                    rep.violation("initial.densities[", topo.edge(e).name, "] must be >= 0");
                    break;
                }
        }
    }
    if (init.regimes.size() != n) {
        rep.violation("initial regimes: expected ", n, " entries");
    } else {
        for (EdgeId e = 0; e < n; ++e) {
            const int r = init.regimes[e];
            if (r < 0 || static_cast<std::size_t>(r) >= s.processors[e].num_regimes())
                rep.violation("initial_regime of edge ", topo.edge(e).name, " out of range");
        }
    }

    check_rates(rep, s);

    if (topo.has_cycle()) rep.warning("network contains a directed cycle");
    for (VertexId v : topo.unreachable_vertices())
        rep.warning("vertex ", topo.vertex_name(v), " is not reachable from any inflow vertex");
    return report;
}

void require_valid(const Scenario& s) {
    const auto report = validate_scenario(s);
    if (report.ok()) return;
    std::string msg = "scenario is not runnable:";
    for (const auto& v : report.violations) msg += "\n  " + v;
    throw ModelError(msg);
}

}  // namespace pnsim
