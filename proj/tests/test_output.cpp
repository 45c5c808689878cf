#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pnsim/montecarlo.hpp"
#include "pnsim/output.hpp"
#include "support.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace pnsim;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("pnsim_test_output_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& file) {
    std::ifstream in(file);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace

TEST_CASE("doubles round-trip through text") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> unit(-1e6, 1e6);
    for (int k = 0; k < 1000; ++k) {
        const double x = unit(rng) / (k + 1);
        const std::string text = format_double(x);
        double back = 0.0;
        std::from_chars(text.data(), text.data() + text.size(), back);
        CHECK(back == x);
    }
    CHECK(format_double(0.0) == "0");
    CHECK(format_double(1.5) == "1.5");
    CHECK(format_double(0.1) == "0.1");
}

TEST_CASE("file hash") {
    const auto dir = fresh_dir("hash");
    std::ofstream(dir / "abc.txt") << "abc";
    CHECK(sha256_file(dir / "abc.txt") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK_THROWS((void)sha256_file(dir / "missing.txt"));
}

TEST_CASE("path files pass the checker and tampering is caught") {
    const auto s = support::diamond(0.5, true);
    const auto path = simulate_path(s, 5, 2, PathOptions{false});
    const auto dir = fresh_dir("path");
    write_path_csv(dir / "path.csv", s, path);
    write_events_csv(dir / "events.csv", s, path);

    auto report = check_outputs(dir);
    for (const auto& f : report.failures) MESSAGE(f);
    CHECK(report.ok());

    const std::string events = slurp(dir / "events.csv");
    CHECK(events.rfind("time,edge,from,to\n", 0) == 0);
    CHECK(static_cast<std::size_t>(std::count(events.begin(), events.end(), '\n')) == path.events.size() + 1);

    // drop some mass from the last row's network_mass column
    std::string csv = slurp(dir / "path.csv");
    const auto last_row = csv.rfind('\n', csv.size() - 2) + 1;
    const auto last_comma = csv.rfind(',');
    const double mass = std::stod(csv.substr(last_comma + 1));
    csv = csv.substr(0, last_comma + 1) + format_double(mass - 0.5) + "\n";
    REQUIRE(last_comma > last_row);
    std::ofstream(dir / "path.csv") << csv;
    report = check_outputs(dir);
    CHECK_FALSE(report.ok());
}

TEST_CASE("path.csv header") {
    const auto s = support::single_edge_constant(0.0, 0.0, 0.0, 1.0);
    const auto path = simulate_path(s, 1, 0);
    const auto dir = fresh_dir("header");
    write_path_csv(dir / "path.csv", s, path);
    std::ifstream in(dir / "path.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header ==
          "t,regime_1,capacity_1,queue_1,ur_1,rwip_1,exit_flux_1,boundary_flux_1,q_net,g_net_out,g_net_in,network_mass");
    std::size_t rows = 0;
    for (std::string line; std::getline(in, line);) ++rows;
    CHECK(rows == path.samples());
}

TEST_CASE("ensemble files") {
    const auto s = support::diamond();
    std::vector<SweepEntry> sweep;
    for (double beta : {0.0, 1.0}) {
        EnsembleConfig cfg;
        cfg.samples = 30;
        cfg.seed = 4;
        cfg.output_step = 1.0;
        sweep.push_back({beta, run_ensemble(with_beta(s, beta), cfg).stats});
    }
    const auto dir = fresh_dir("ensemble");
    write_edge_series_csv(dir / "mean_capacity.csv", s, sweep, EdgeMeasure::Capacity);
    write_network_means_csv(dir / "network_means.csv", sweep);
    write_histogram_csv(dir / "hist_qnet.csv", sweep, NetworkMeasure::QNet);
    write_histogram_csv(dir / "hist_gout.csv", sweep, NetworkMeasure::GOutNet);
    CHECK(check_outputs(dir).ok());

    const std::string caps = slurp(dir / "mean_capacity.csv");
    CHECK(caps.rfind("beta,t,mean_1,std_1,mean_2,std_2", 0) == 0);
    CHECK(static_cast<std::size_t>(std::count(caps.begin(), caps.end(), '\n')) == 1 + 2 * 31);
    const std::string hist = slurp(dir / "hist_gout.csv");
    CHECK(static_cast<std::size_t>(std::count(hist.begin(), hist.end(), '\n')) == 1 + 2 * 40);

    std::ofstream(dir / "hist_qnet.csv", std::ios::app) << "0,1,2,5\n";
    CHECK_FALSE(check_outputs(dir).ok());
}

TEST_CASE("checker on a missing directory") { CHECK_FALSE(check_outputs("/nonexistent/pnsim/dir").ok()); }
