#include "pnsim/montecarlo.hpp"
#include "pnsim/rate_models.hpp"
#include "pnsim/scenario_io.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace pnsim;

namespace {

template <typename T>
py::array_t<T> per_edge_array(const std::vector<T>& flat, std::size_t samples, std::size_t edges) {
    py::array_t<T> out({samples, edges});
    std::copy(flat.begin(), flat.end(), out.mutable_data());
    return out;
}

py::dict report_dict(const ValidationReport& r) {
    py::dict d;
    d["ok"] = r.ok();
    d["violations"] = r.violations;
    d["warnings"] = r.warnings;
    d["max_stable_dt"] = r.max_stable_dt;
    return d;
}

py::dict edge_means(const EnsembleStats& st, EdgeMeasure m) {
    const std::size_t k = st.times().size();
    const std::size_t n = st.num_edges();
    py::array_t<double> mean({k, n});
    py::array_t<double> var({k, n});
    auto mv = mean.mutable_unchecked<2>();
    auto vv = var.mutable_unchecked<2>();
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t e = 0; e < n; ++e) {
            mv(i, e) = st.edge(m, i, e).mean();
            vv(i, e) = st.edge(m, i, e).variance();
        }
    py::dict d;
    d["mean"] = mean;
    d["variance"] = var;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Production network simulator with load-dependent machine failures";

    py::register_exception<ModelError>(m, "ModelError");
    py::register_exception<ScenarioFormatError>(m, "ScenarioFormatError");

    py::class_<Scenario>(m, "Scenario")
        .def_readonly("name", &Scenario::name)
        .def_property_readonly("num_edges", &Scenario::num_edges)
        .def_property_readonly("horizon", [](const Scenario& s) { return s.numerics.horizon; })
        .def_property_readonly("time_step", &Scenario::time_step)
        .def_property_readonly("edge_names",
                               [](const Scenario& s) {
                                   std::vector<std::string> names;
                                   for (const auto& e : s.topology.edges()) names.push_back(e.name);
                                   return names;
                               })
        .def("queue_bound", &Scenario::queue_bound, py::arg("edge"))
        .def("with_beta", [](const Scenario& s, double beta) { return with_beta(s, beta); }, py::arg("beta"));

    m.def("load_scenario", [](const std::string& path) { return load_scenario(path); }, py::arg("path"));
    m.def("parse_scenario", &parse_scenario, py::arg("json_text"));
    m.def("validate", [](const Scenario& s) { return report_dict(validate_scenario(s)); }, py::arg("scenario"));

    m.def(
        "uniform_bound",
        [](const Scenario& s) {
            const auto b = uniform_bound(s);
            return py::make_tuple(b.per_edge, b.network);
        },
        py::arg("scenario"), "Per-edge rate bounds and the network bound used for thinning.");

    m.def(
        "evolve",
        [](const Scenario& s, double t1) {
            require_valid(s);
            const DetSolver solver(s);
            const auto state = solver.evolve(initial_network_state(s), solver.capacities(s.initial.regimes), t1);
            py::dict d;
            d["time"] = state.time;
            d["queues"] = state.queues;
            d["densities"] = state.densities;
            return d;
        },
        py::arg("scenario"), py::arg("t1"), "Deterministic evolution from the initial data with frozen capacities.");

    py::class_<PathRecord>(m, "PathRecord")
        .def_readonly("path_index", &PathRecord::path_index)
        .def_readonly("candidates", &PathRecord::candidates)
        .def_property_readonly("times", [](const PathRecord& p) { return py::array_t<double>(py::cast(p.times)); })
        .def_property_readonly("regime",
                               [](const PathRecord& p) {
                                   std::vector<int> one_based(p.regime);
                                   for (int& r : one_based) ++r;
                                   return per_edge_array(one_based, p.samples(), p.num_edges);
                               })
        .def_property_readonly("capacity",
                               [](const PathRecord& p) { return per_edge_array(p.capacity, p.samples(), p.num_edges); })
        .def_property_readonly("queue",
                               [](const PathRecord& p) { return per_edge_array(p.queue, p.samples(), p.num_edges); })
        .def_property_readonly("q_net", [](const PathRecord& p) { return py::array_t<double>(py::cast(p.q_net)); })
        .def_property_readonly("g_net_out",
                               [](const PathRecord& p) { return py::array_t<double>(py::cast(p.g_out_net)); })
        .def_property_readonly("g_net_in", [](const PathRecord& p) { return py::array_t<double>(py::cast(p.g_in_net)); })
        .def_property_readonly("network_mass",
                               [](const PathRecord& p) { return py::array_t<double>(py::cast(p.network_mass)); })
        .def_property_readonly("events", [](const PathRecord& p) {
            py::list out;
            for (const auto& ev : p.events) out.append(py::make_tuple(ev.time, ev.edge, ev.from + 1, ev.to + 1));
            return out;
        });

    m.def(
        "simulate_path",
        [](const Scenario& s, std::uint64_t seed, std::uint64_t index) {
            py::gil_scoped_release release;
            return simulate_path(s, seed, index, PathOptions{false});
        },
        py::arg("scenario"), py::arg("seed"), py::arg("index") = 0);

    m.def(
        "run_ensemble",
        [](const Scenario& s, std::size_t samples, std::uint64_t seed, std::size_t workers) {
            EnsembleConfig cfg;
            cfg.samples = samples;
            cfg.seed = seed;
            cfg.workers = workers;
            EnsembleResult result;
            {
                py::gil_scoped_release release;
                result = run_ensemble(s, cfg);
            }
            const auto& st = result.stats;
            const std::size_t last = st.times().size() - 1;
            py::dict d;
            d["samples"] = st.count();
            d["times"] = st.times();
            d["capacity"] = edge_means(st, EdgeMeasure::Capacity);
            d["queue"] = edge_means(st, EdgeMeasure::Queue);
            d["mean_q_net"] = st.network(NetworkMeasure::QNet, last).mean();
            d["var_q_net"] = st.network(NetworkMeasure::QNet, last).variance();
            d["mean_g_net_out"] = st.network(NetworkMeasure::GOutNet, last).mean();
            d["var_g_net_out"] = st.network(NetworkMeasure::GOutNet, last).variance();
            d["jumps"] = result.jumps;
            return d;
        },
        py::arg("scenario"), py::arg("samples"), py::arg("seed") = 1, py::arg("workers") = 0);
}
