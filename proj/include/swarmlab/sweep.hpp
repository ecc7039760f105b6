#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "swarmlab/config_io.hpp"
#include "swarmlab/engine.hpp"
#include "swarmlab/keyvalue.hpp"

namespace swarmlab {

/// Grid of experiment cells. Density is given either as rho values
/// (converted with L = sqrt(N / rho)) or as arena sides, never both.
struct SweepSpec {
    std::vector<std::size_t> n_values;
    std::vector<double> rho_values;
    std::vector<double> side_values;
    std::vector<std::size_t> k_values;
    std::vector<Strategy> strategies{Strategy::Adaptive};
    std::size_t seeds_per_cell{5};
    std::uint64_t base_seed{1};
    SimConfig base;
};

/// One simulation of the sweep: cell index, replicate index, and the fully
/// materialized config including its derived seed.
struct SweepRun {
    std::size_t cell{0};
    std::size_t replicate{0};
    SimConfig config;
};

/// base_seed XOR splitmix64((cell << 32) | replicate).
inline std::uint64_t derive_seed(std::uint64_t base_seed, std::size_t cell, std::size_t replicate) {
    const std::uint64_t key = (static_cast<std::uint64_t>(cell) << 32) | static_cast<std::uint64_t>(replicate);
    return base_seed ^ mix64(key);
}

/// Cartesian product in the fixed order strategy, N, density, k (outermost
/// first), each cell repeated seeds_per_cell times with replicate innermost.
inline std::vector<SweepRun> materialize(const SweepSpec& spec) {
    std::vector<std::string> errs;
    if (spec.n_values.empty()) errs.emplace_back("N list is empty");
    if (spec.k_values.empty()) errs.emplace_back("k list is empty");
    if (spec.strategies.empty()) errs.emplace_back("strategy list is empty");
    if (spec.rho_values.empty() == spec.side_values.empty()) errs.emplace_back("give exactly one of rho or L lists");
    if (spec.seeds_per_cell < 1) errs.emplace_back("seeds must be >= 1");
    if (!errs.empty()) {
        std::string msg = "invalid sweep spec:";
        for (const auto& e : errs) msg += "\n  - " + e;
        throw ConfigError(msg);
    }

    const bool by_rho = !spec.rho_values.empty();
    const auto& densities = by_rho ? spec.rho_values : spec.side_values;
    std::vector<SweepRun> runs;
    std::size_t cell = 0;
    for (Strategy strategy : spec.strategies) {
        for (std::size_t n : spec.n_values) {
            for (double d : densities) {
                for (std::size_t k : spec.k_values) {
                    SimConfig c = spec.base;
                    c.behavior.strategy = strategy;
                    c.n_agents = n;
                    c.k = k;
                    if (by_rho) {
                        if (!(d > 0.0)) throw ConfigError("cell " + std::to_string(cell) + ": rho must be > 0");
                        c.side = side_for_density(n, d);
                    } else {
                        c.side = d;
                    }
                    if (const auto v = c.violations(); !v.empty()) {
                        std::string msg = "cell " + std::to_string(cell) + " (strategy=" + to_string(strategy) +
                                          ", N=" + std::to_string(n) + ", " + (by_rho ? "rho=" : "L=") +
                                          format_real(d) + ", k=" + std::to_string(k) + ") is invalid:";
                        for (const auto& e : v) msg += "\n  - " + e;
                        throw ConfigError(msg);
                    }
                    for (std::size_t rep = 0; rep < spec.seeds_per_cell; ++rep) {
                        SimConfig rc = c;
                        rc.seed = derive_seed(spec.base_seed, cell, rep);
                        runs.push_back({cell, rep, std::move(rc)});
                    }
                    ++cell;
                }
            }
        }
    }
    return runs;
}

/// Reads a sweep spec file. List keys: N, rho | L, k, strategy. Scalar keys:
/// seeds, base_seed, plus any single-run config key as a base override.
inline SweepSpec load_sweep_spec(const KeyValueDoc& doc, SimConfig base = {}) {
    static const std::set<std::string> list_keys = {"N", "rho", "L", "k", "strategy", "seeds", "base_seed"};
    const auto& scalar = scalar_config_keys();
    for (const auto& key : doc.keys()) {
        if (!list_keys.count(key) && std::find(scalar.begin(), scalar.end(), key) == scalar.end()) {
            throw ConfigError("unknown sweep key `" + key + "`");
        }
    }
    SweepSpec spec;
    apply_config_keys(doc, base, list_keys);
    if (doc.has("seed")) throw ConfigError("use `base_seed` in sweep files, not `seed`");
    spec.base = base;
    if (doc.has("N")) {
        for (auto v : doc.integer_list("N")) {
            if (v < 1) throw ConfigError("N values must be positive");
            spec.n_values.push_back(static_cast<std::size_t>(v));
        }
    }
    if (doc.has("k")) {
        for (auto v : doc.integer_list("k")) {
            if (v < 1) throw ConfigError("k values must be positive");
            spec.k_values.push_back(static_cast<std::size_t>(v));
        }
    }
    if (doc.has("rho") && doc.has("L")) throw ConfigError("`rho` and `L` lists are mutually exclusive");
    if (doc.has("rho")) spec.rho_values = doc.real_list("rho");
    if (doc.has("L")) spec.side_values = doc.real_list("L");
    if (doc.has("strategy")) {
        spec.strategies.clear();
        for (const auto& s : doc.list("strategy")) spec.strategies.push_back(parse_strategy(s));
    }
    if (doc.has("seeds")) {
        const auto s = doc.integer("seeds");
        if (s < 1) throw ConfigError("seeds must be >= 1");
        spec.seeds_per_cell = static_cast<std::size_t>(s);
    }
    if (doc.has("base_seed")) spec.base_seed = doc.unsigned_integer("base_seed");
    return spec;
}

struct ResultRow {
    std::size_t cell{0};
    std::size_t replicate{0};
    std::size_t n_agents{0};
    double side{0.0};
    double rho{0.0};
    std::size_t k{0};
    Strategy strategy{Strategy::Adaptive};
    std::uint64_t seed{0};
    bool ok{false};
    std::string error;
    RunMetrics metrics;
    double wall_seconds{0.0};
};

struct ResultsTable {
    std::vector<ResultRow> rows; // ordered by (cell, replicate)

    bool all_ok() const {
        return std::all_of(rows.begin(), rows.end(), [](const ResultRow& r) { return r.ok; });
    }
};

/// Thread count: SWARM_LAB_THREADS when set to a positive integer, otherwise
/// `requested`, otherwise the hardware concurrency.
inline std::size_t resolve_parallelism(std::size_t requested) {
    if (const char* env = std::getenv("SWARM_LAB_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
    }
    if (requested > 0) return requested;
    return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

inline ResultRow execute(const SweepRun& job) {
    ResultRow row;
    row.cell = job.cell;
    row.replicate = job.replicate;
    row.n_agents = job.config.n_agents;
    row.side = job.config.side;
    row.rho = static_cast<double>(job.config.n_agents) / (job.config.side * job.config.side);
    row.k = job.config.k;
    row.strategy = job.config.behavior.strategy;
    row.seed = job.config.seed;
    try {
        SimConfig c = job.config;
        c.keep_records = false;
        const RunRecord rec = run(c);
        row.metrics = rec.metrics;
        row.wall_seconds = rec.wall_seconds;
        row.ok = true;
    } catch (const std::exception& e) {
        row.ok = false;
        row.error = e.what();
    }
    return row;
}

/// Runs every materialized job on a pool of `parallelism` threads. Rows land
/// in job order, so the table does not depend on scheduling.
inline ResultsTable run_jobs(const std::vector<SweepRun>& jobs, std::size_t parallelism) {
    ResultsTable table;
    table.rows.resize(jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < jobs.size(); i = next.fetch_add(1)) {
            table.rows[i] = execute(jobs[i]);
        }
    };
    const std::size_t threads = std::clamp<std::size_t>(parallelism, 1, std::max<std::size_t>(1, jobs.size()));
    if (threads == 1) {
        worker();
        return table;
    }
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    pool.clear(); // joins
    return table;
}

inline ResultsTable run_sweep(const SweepSpec& spec, std::size_t parallelism) {
    return run_jobs(materialize(spec), resolve_parallelism(parallelism));
}

} // namespace swarmlab
