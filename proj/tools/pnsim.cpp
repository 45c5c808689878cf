// Command-line front end: validate scenarios, simulate single paths, run
// ensembles over beta sweeps, and re-check emitted files.
//
// Exit codes: 0 ok, 1 model error (invalid scenario, failed simulation or
// check), 2 usage error or unreadable scenario document.

#include "pnsim/montecarlo.hpp"
#include "pnsim/output.hpp"
#include "pnsim/scenario_io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>

#ifndef PNSIM_VERSION
#define PNSIM_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using namespace pnsim;

namespace {

constexpr int kOk = 0;
constexpr int kModelError = 1;
constexpr int kUsageError = 2;

std::string utc_now() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void print_report(const ValidationReport& report) {
    for (const auto& v : report.violations) std::cout << "violation: " << v << '\n';
    for (const auto& w : report.warnings) std::cout << "warning: " << w << '\n';
    std::cout << "max stable dt: " << format_double(report.max_stable_dt) << '\n';
    std::cout << (report.ok() ? "OK" : "INVALID") << '\n';
}

/// Tracks emitted files so that an aborted run leaves nothing half-written.
class OutputSet {
public:
    explicit OutputSet(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }
    ~OutputSet() {
        if (committed_) return;
        std::error_code ec;
        for (const auto& f : files_) fs::remove(dir_ / f, ec);
    }

    fs::path add(const std::string& name) {
        files_.push_back(name);
        return dir_ / name;
    }
    [[nodiscard]] const std::vector<std::string>& files() const noexcept { return files_; }
    void commit() noexcept { committed_ = true; }

private:
    fs::path dir_;
    std::vector<std::string> files_;
    bool committed_ = false;
};

void write_manifest(OutputSet& out, nlohmann::json manifest) {
    const fs::path file = out.add("manifest.json");
    auto listed = out.files();
    listed.pop_back();
    manifest["outputs"] = listed;
    manifest["tool_version"] = PNSIM_VERSION;
    manifest["finished_at"] = utc_now();
    std::ofstream(file) << manifest.dump(2) << '\n';
}

nlohmann::json base_manifest(const std::string& command, const fs::path& scenario_file) {
    nlohmann::json m;
    m["command"] = command;
    m["scenario_file"] = fs::absolute(scenario_file).string();
    m["scenario_sha256"] = sha256_file(scenario_file);
    m["started_at"] = utc_now();
    return m;
}

Scenario load_runnable(const std::string& file, std::optional<double> beta) {
    Scenario s = load_scenario(file);
    if (beta) s = with_beta(std::move(s), *beta);
    require_valid(s);
    return s;
}

int cmd_validate(const std::string& file) {
    const Scenario s = load_scenario(file);
    const auto report = validate_scenario(s);
    print_report(report);
    return report.ok() ? kOk : kModelError;
}

int cmd_path(const std::string& file, std::uint64_t seed, std::uint64_t index, const std::string& dir,
             std::optional<double> beta) {
    const Scenario s = load_runnable(file, beta);
    auto manifest = base_manifest("path", file);
    const PathRecord path = simulate_path(s, seed, index, PathOptions{false});

    OutputSet out(dir);
    write_path_csv(out.add("path.csv"), s, path);
    write_events_csv(out.add("events.csv"), s, path);
    manifest["seed"] = seed;
    manifest["path_index"] = index;
    manifest["samples"] = 1;
    if (beta) manifest["beta"] = *beta;
    write_manifest(out, manifest);
    out.commit();
    std::cout << "path " << index << ": " << path.events.size() << " jumps, q_net(T) = "
              << format_double(path.q_net.back()) << ", g_net_out(T) = " << format_double(path.g_out_net.back())
              << '\n';
    return kOk;
}

int cmd_ensemble(const std::string& file, std::size_t samples, std::uint64_t seed, std::vector<double> betas,
                 std::size_t workers, const std::string& dir) {
    const Scenario base = load_scenario(file);
    auto manifest = base_manifest("ensemble", file);
    std::vector<SweepEntry> sweep;
    std::vector<std::optional<double>> runs;
    if (betas.empty()) {
        const bool linear = base.rates.variant == RateModelSpec::Variant::LinearLoadDependent;
        runs.push_back(linear && !base.rates.linear.empty() ? std::optional(base.rates.linear.front().beta)
                                                            : std::nullopt);
    } else {
        runs.assign(betas.begin(), betas.end());
    }

    EnsembleConfig cfg;
    cfg.samples = samples;
    cfg.seed = seed;
    cfg.workers = workers;
    for (const auto& beta : runs) {
        const Scenario s = beta && !betas.empty() ? with_beta(base, *beta) : base;
        const auto result = run_ensemble(s, cfg);
        std::cout << "beta " << (beta ? format_double(*beta) : std::string("-")) << ": " << samples << " paths, "
                  << result.jumps << " jumps, " << result.wall_seconds << " s on " << result.workers_used
                  << " workers\n";
        sweep.push_back({beta, result.stats});
    }

    OutputSet out(dir);
    write_edge_series_csv(out.add("mean_capacity.csv"), base, sweep, EdgeMeasure::Capacity);
    write_edge_series_csv(out.add("mean_queue.csv"), base, sweep, EdgeMeasure::Queue);
    write_network_means_csv(out.add("network_means.csv"), sweep);
    write_histogram_csv(out.add("hist_qnet.csv"), sweep, NetworkMeasure::QNet);
    write_histogram_csv(out.add("hist_gout.csv"), sweep, NetworkMeasure::GOutNet);
    manifest["seed"] = seed;
    manifest["samples"] = samples;
    manifest["betas"] = betas;
    write_manifest(out, manifest);
    out.commit();
    return kOk;
}

int cmd_check(const std::string& dir) {
    const auto report = check_outputs(dir);
    for (const auto& n : report.notes) std::cout << "ok: " << n << '\n';
    for (const auto& f : report.failures) std::cout << "FAIL: " << f << '\n';
    std::cout << (report.ok() ? "PASS" : "FAIL") << '\n';
    return report.ok() ? kOk : kModelError;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Production network simulator with load-dependent machine failures"};
    app.set_version_flag("--version", PNSIM_VERSION);
    app.require_subcommand(1);

    std::string scenario_file;
    std::string out_dir;
    std::uint64_t seed = 1;
    std::uint64_t index = 0;
    std::size_t samples = 10000;
    std::size_t workers = 0;
    std::optional<double> beta;
    std::vector<double> betas;

    auto* validate = app.add_subcommand("validate", "Check a scenario file and print its report");
    validate->add_option("scenario", scenario_file, "Scenario JSON file")->required();

    auto* path = app.add_subcommand("path", "Simulate one sample path");
    path->add_option("scenario", scenario_file, "Scenario JSON file")->required();
    path->add_option("--seed", seed, "Master seed");
    path->add_option("--index", index, "Path index");
    path->add_option("--beta", beta, "Override the load-dependency beta on every edge");
    path->add_option("--out", out_dir, "Output directory")->required();

    auto* ensemble = app.add_subcommand("ensemble", "Run a Monte Carlo ensemble (optionally over a beta sweep)");
    ensemble->add_option("scenario", scenario_file, "Scenario JSON file")->required();
    ensemble->add_option("--samples,-M", samples, "Number of paths")->check(CLI::PositiveNumber);
    ensemble->add_option("--seed", seed, "Master seed");
    ensemble->add_option("--beta-sweep", betas, "Comma-separated beta values")->delimiter(',');
    ensemble->add_option("--workers", workers, "Worker threads (default: PNSIM_WORKERS or hardware)");
    ensemble->add_option("--out", out_dir, "Output directory")->required();

    auto* check = app.add_subcommand("check", "Re-verify invariants of emitted files");
    check->add_option("dir", out_dir, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsageError;
    }

    try {
        if (*validate) return cmd_validate(scenario_file);
        if (*path) return cmd_path(scenario_file, seed, index, out_dir, beta);
        if (*ensemble) return cmd_ensemble(scenario_file, samples, seed, betas, workers, out_dir);
        if (*check) return cmd_check(out_dir);
    } catch (const ScenarioFormatError& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return kUsageError;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return kModelError;
    }
    return kUsageError;
}
