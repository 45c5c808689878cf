#include "pnsim/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>

namespace pnsim {

std::size_t default_worker_count() {
    if (const char* env = std::getenv("PNSIM_WORKERS")) {
        try {
            const long value = std::stol(env);
            if (value > 0) return static_cast<std::size_t>(value);
        } catch (const std::exception&) {
        }
    }
    return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

namespace {

struct BlockResult {
    EnsembleStats stats;
    std::size_t candidates = 0;
    std::size_t jumps = 0;
    std::exception_ptr error;
    std::uint64_t failed_path = 0;
};

}  // namespace

EnsembleResult run_ensemble(const Scenario& scenario, const EnsembleConfig& cfg) {
    if (cfg.samples == 0) throw ModelError("ensemble needs at least one sample");
    Scenario s = scenario;
    if (cfg.output_step) s.numerics.output_step = *cfg.output_step;
    require_valid(s);

    const DetSolver solver(s);
    const RateBounds bounds = uniform_bound(s);
    const std::vector<double> times = output_times(s);

    const std::size_t block_size = std::max<std::size_t>(64, (cfg.samples + 63) / 64);
    const std::size_t blocks = (cfg.samples + block_size - 1) / block_size;
    const std::size_t workers = std::min(blocks, cfg.workers > 0 ? cfg.workers : default_worker_count());

    std::vector<BlockResult> results(blocks);
    std::vector<PathRecord> retained(std::min(cfg.retain, cfg.samples));
    std::atomic<std::size_t> next_block{0};
    std::atomic<std::size_t> first_failed{blocks};

    auto work = [&] {
        for (;;) {
            const std::size_t b = next_block.fetch_add(1);
            if (b >= blocks || b > first_failed.load()) return;
            auto& out = results[b];
            out.stats = EnsembleStats(times, s.num_edges());
            const std::size_t first = b * block_size;
            const std::size_t last = std::min(cfg.samples, first + block_size);
            for (std::size_t i = first; i < last; ++i) {
                try {
                    PathOptions options;
                    options.record_jump_states = i < retained.size();
                    PathRecord path = simulate_path(s, solver, bounds, cfg.seed, i, options);
                    out.stats.accumulate(path);
                    if (cfg.on_path) cfg.on_path(path);
                    out.candidates += path.candidates;
                    out.jumps += path.events.size();
                    if (i < retained.size()) retained[i] = std::move(path);
                } catch (...) {
                    out.error = std::current_exception();
                    out.failed_path = i;
                    std::size_t seen = first_failed.load();
                    while (b < seen && !first_failed.compare_exchange_weak(seen, b)) {
                    }
                    return;
                }
            }
        }
    };

    const auto start = std::chrono::steady_clock::now();
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    const auto stop = std::chrono::steady_clock::now();

    for (const auto& r : results) {
        if (!r.error) continue;
        try {
            std::rethrow_exception(r.error);
        } catch (const BoundViolation&) {
            throw;
        } catch (const std::exception& ex) {
            throw ModelError("ensemble aborted at path " + std::to_string(r.failed_path) + ": " + ex.what());
        }
    }

    EnsembleResult result;
    result.stats = EnsembleStats(times, s.num_edges());
    for (auto& r : results) {
        result.stats.merge(r.stats);
        result.candidates += r.candidates;
        result.jumps += r.jumps;
    }
    result.retained = std::move(retained);
    result.workers_used = std::max<std::size_t>(1, workers);
    result.wall_seconds = std::chrono::duration<double>(stop - start).count();
    return result;
}

}  // namespace pnsim
