#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "swarmlab/behavior.hpp"
#include "swarmlab/core.hpp"
#include "swarmlab/network.hpp"
#include "swarmlab/world.hpp"

namespace swarmlab {

/// Snapshot of one simulated step: coverage of the target plus per-agent
/// positions and exploring flags, all taken at the same instant.
struct StepRecord {
    TimeStep t{0};
    int cov{0};
    std::vector<std::uint8_t> exploring;
    std::vector<Vec2> positions;

    friend bool operator==(const StepRecord&, const StepRecord&) = default;
};

struct RunMetrics {
    double xi{0.0};        // tracking performance
    double theta{0.0};     // exploration ratio
    double rho{0.0};       // swarm density N / L^2
    double rho_local{0.0}; // mean local density over agents and steps
    double delta_rho{0.0}; // rho_local - rho
    bool subsampled{false};
    std::size_t eps_floor_hits{0};

    friend bool operator==(const RunMetrics&, const RunMetrics&) = default;
};

struct LocalDensityOptions {
    std::size_t neighbor_count{6};
    double eps{1e-6};
};

inline double swarm_density(std::size_t n, const Arena& arena) {
    if (n < 1 || !(arena.side > 0.0)) {
        throw ConfigError("swarm_density: need N >= 1 and L > 0");
    }
    return static_cast<double>(n) / (arena.side * arena.side);
}

/// Arena side giving `n` agents the density `rho`.
inline double side_for_density(std::size_t n, double rho) {
    if (n < 1 || !(rho > 0.0)) {
        throw ConfigError("side_for_density: need N >= 1 and rho > 0");
    }
    return std::sqrt(static_cast<double>(n) / rho);
}

inline double density_difference(double rho_local, double rho) { return rho_local - rho; }

/// (m + 1) / (pi * L_i^2) per agent, with L_i the mean distance to its m
/// nearest agents floored at eps. `floor_hits` counts floored agents.
/// `nearest` may be any neighbor table over `positions` with at least m
/// entries per row; only the first m are used.
inline std::vector<double> local_densities(std::span<const Vec2> positions,
                                           const NeighborTable& nearest,
                                           const LocalDensityOptions& opt = {},
                                           std::size_t* floor_hits = nullptr) {
    const std::size_t n = positions.size();
    const std::size_t m = opt.neighbor_count;
    if (nearest.size() != n || nearest.k() < m) {
        throw ConfigError("local density: neighbor table does not cover " + std::to_string(m) + " neighbors");
    }
    const double count = static_cast<double>(m);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        auto row = nearest.row(i);
        for (std::size_t q = 0; q < m; ++q) {
            sum += (positions[row[q]] - positions[i]).norm();
        }
        double mean = sum / count;
        if (mean < opt.eps) {
            mean = opt.eps;
            if (floor_hits) ++*floor_hits;
        }
        out[i] = (count + 1.0) / (std::numbers::pi * mean * mean);
    }
    return out;
}

inline std::vector<double> local_densities(std::span<const Vec2> positions,
                                           const LocalDensityOptions& opt = {},
                                           std::size_t* floor_hits = nullptr) {
    if (positions.size() < opt.neighbor_count + 1) {
        throw ConfigError("local density needs at least " + std::to_string(opt.neighbor_count + 1) + " agents, got " +
                          std::to_string(positions.size()));
    }
    return local_densities(positions, knn(positions, opt.neighbor_count), opt, floor_hits);
}

/// Streams step records into the run-level averages. The post-hoc metric
/// functions below and the engine both go through this.
class MetricsAccumulator {
public:
    explicit MetricsAccumulator(LocalDensityOptions opt = {}, bool with_local_density = true)
        : opt_(opt), with_local_(with_local_density) {}

    void add(const StepRecord& rec) { add_impl(rec, nullptr); }

    /// Same as add(), reusing a neighbor table already built over
    /// rec.positions with at least neighbor_count entries per row.
    void add(const StepRecord& rec, const NeighborTable& nearest) { add_impl(rec, &nearest); }

    std::size_t steps() const { return steps_; }
    std::size_t agents() const { return n_; }
    std::size_t floor_hits() const { return floor_hits_; }

    double tracking_performance() const {
        require_steps();
        return cov_sum_ / static_cast<double>(steps_);
    }

    double exploration_ratio() const {
        require_steps();
        if (n_ == 0) throw ConfigError("exploration ratio needs N >= 1");
        return explore_sum_ / (static_cast<double>(n_) * static_cast<double>(steps_));
    }

    double local_swarm_density() const {
        require_steps();
        if (!with_local_) throw ConfigError("local density was not accumulated");
        return local_sum_ / (static_cast<double>(n_) * static_cast<double>(steps_));
    }

    RunMetrics finish(const Arena& arena) const {
        RunMetrics m;
        m.xi = tracking_performance();
        m.theta = exploration_ratio();
        m.rho = swarm_density(n_, arena);
        m.rho_local = local_swarm_density();
        m.delta_rho = density_difference(m.rho_local, m.rho);
        m.eps_floor_hits = floor_hits_;
        return m;
    }

private:
    void add_impl(const StepRecord& rec, const NeighborTable* nearest) {
        if (rec.exploring.size() != rec.positions.size()) {
            throw ConfigError("step record: flag and position counts differ");
        }
        if (steps_ == 0) {
            n_ = rec.positions.size();
        } else if (rec.positions.size() != n_) {
            throw ConfigError("step record: agent count changed mid-run");
        }
        ++steps_;
        cov_sum_ += static_cast<double>(rec.cov);
        std::size_t exploring = 0;
        for (auto f : rec.exploring) exploring += f ? 1 : 0;
        explore_sum_ += static_cast<double>(exploring);
        if (with_local_) {
            const auto dens = nearest ? local_densities(rec.positions, *nearest, opt_, &floor_hits_)
                                      : local_densities(rec.positions, opt_, &floor_hits_);
            double step_sum = 0.0;
            for (double v : dens) step_sum += v;
            local_sum_ += step_sum;
        }
    }

    void require_steps() const {
        if (steps_ == 0) throw ConfigError("metrics need at least one step record");
    }

    LocalDensityOptions opt_;
    bool with_local_;
    std::size_t steps_{0};
    std::size_t n_{0};
    double cov_sum_{0.0};
    double explore_sum_{0.0};
    double local_sum_{0.0};
    std::size_t floor_hits_{0};
};

inline double tracking_performance(std::span<const StepRecord> records) {
    MetricsAccumulator acc({}, false);
    for (const auto& r : records) acc.add(r);
    return acc.tracking_performance();
}

inline double exploration_ratio(std::span<const StepRecord> records) {
    MetricsAccumulator acc({}, false);
    for (const auto& r : records) acc.add(r);
    return acc.exploration_ratio();
}

inline double local_swarm_density(std::span<const StepRecord> records, const LocalDensityOptions& opt = {}) {
    MetricsAccumulator acc(opt, true);
    for (const auto& r : records) acc.add(r);
    return acc.local_swarm_density();
}

inline RunMetrics compute_metrics(std::span<const StepRecord> records, const Arena& arena,
                                  const LocalDensityOptions& opt = {}) {
    MetricsAccumulator acc(opt, true);
    for (const auto& r : records) acc.add(r);
    return acc.finish(arena);
}

} // namespace swarmlab
