#pragma once

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "swarmlab/behavior.hpp"
#include "swarmlab/core.hpp"
#include "swarmlab/metrics.hpp"
#include "swarmlab/network.hpp"
#include "swarmlab/world.hpp"

namespace swarmlab {

struct SimConfig {
    std::size_t n_agents{50};
    double side{10.0};
    std::size_t k{10};
    double agent_max_speed{0.1};
    double target_max_speed{0.15};
    double detect_radius{1.0};
    TimeStep steps{100000};
    std::uint64_t seed{1};
    BehaviorParams behavior;
    std::size_t record_stride{1};
    BoundaryRule boundary{BoundaryRule::Clamp};
    LocalDensityOptions local_density;
    /// Keep every strided StepRecord in the RunRecord. Metrics are identical
    /// either way; off saves memory in sweeps.
    bool keep_records{false};
    /// Check per-step invariants (speed, a_R range, arena, flag/memory
    /// consistency) and throw on the first violation.
    bool check_invariants{false};

    Arena arena() const { return Arena{side}; }

    std::vector<std::string> violations() const {
        std::vector<std::string> out;
        if (n_agents < 3) out.emplace_back("N must be >= 3");
        if (n_agents < local_density.neighbor_count + 1) {
            out.emplace_back("N must be >= " + std::to_string(local_density.neighbor_count + 1) +
                             " for local density");
        }
        if (k < 2 || k + 1 > n_agents) {
            out.emplace_back("k=" + std::to_string(k) + " outside [2, N-1] with N=" + std::to_string(n_agents));
        }
        if (!(side > 0.0) || !std::isfinite(side)) out.emplace_back("L must be finite and > 0");
        if (!(agent_max_speed > 0.0)) out.emplace_back("agent_max_speed must be > 0");
        if (!(target_max_speed > 0.0)) out.emplace_back("target_max_speed must be > 0");
        if (!(detect_radius > 0.0)) out.emplace_back("detect_radius must be > 0");
        if (steps < 1) out.emplace_back("T must be >= 1");
        if (record_stride < 1) out.emplace_back("record_stride must be >= 1");
        if (local_density.neighbor_count < 1) out.emplace_back("local density neighbor count must be >= 1");
        for (auto& v : behavior.violations()) out.push_back(std::move(v));
        return out;
    }

    /// Non-fatal departures from the studied regime.
    std::vector<std::string> warnings() const {
        std::vector<std::string> out;
        if (!(agent_max_speed < target_max_speed)) {
            out.emplace_back("agent_max_speed >= target_max_speed: target is not faster than the agents");
        }
        return out;
    }

    void validate() const {
        const auto v = violations();
        if (!v.empty()) {
            std::ostringstream os;
            os << "invalid configuration:";
            for (const auto& s : v) os << "\n  - " << s;
            throw ConfigError(os.str());
        }
    }
};

struct WorldState {
    std::vector<AgentState> agents;
    TargetState target;
};

/// Initial placement. Draw order: agent positions (x then y) in ascending
/// id, then target position, then its first waypoint.
inline WorldState init_state(const SimConfig& config, Rng& rng) {
    config.validate();
    const Arena arena = config.arena();
    WorldState w;
    w.agents.resize(config.n_agents);
    const double start_repulsion = config.behavior.strategy == Strategy::MemorylessFixed
                                       ? config.behavior.fixed_repulsion
                                       : config.behavior.repulsion_max;
    for (std::size_t i = 0; i < config.n_agents; ++i) {
        AgentState& a = w.agents[i];
        a.id = i;
        a.pos = arena.random_point(rng);
        a.repulsion = start_repulsion;
        a.exploring = true;
    }
    w.target.pos = arena.random_point(rng);
    w.target.waypoint = arena.random_point(rng);
    w.target.max_speed = config.target_max_speed;
    w.target.radius = config.detect_radius;
    return w;
}

/// Step-by-step simulator. Each step is synchronous: every agent reads the
/// state as of the start of the step and writes into the next buffer.
///
/// Order within step t: target moves (waypoint draws), detection, k-NN
/// rebuild, point-of-attraction update from neighbors' broadcasts, a_R
/// update, then per-agent velocity (one uniform draw each, ascending id),
/// speed rule, move, boundary.
class Simulation {
public:
    explicit Simulation(SimConfig config)
        : config_(std::move(config)), rng_(config_.seed), arena_(config_.arena()), world_(init_state(config_, rng_)) {
        const std::size_t n = config_.n_agents;
        positions_.resize(n);
        detected_.resize(n);
        broadcasts_.resize(n);
        row_broadcasts_.reserve(config_.k);
        next_.resize(n);
        points_.resize(n);
    }

    const SimConfig& config() const { return config_; }
    const std::vector<AgentState>& agents() const { return world_.agents; }
    const TargetState& target() const { return world_.target; }
    TimeStep time() const { return t_; }
    /// Communication neighbors of agent i from the latest step, nearest first.
    std::span<const std::size_t> neighbors(std::size_t i) const { return table_.row(i).first(config_.k); }
    /// Latest neighbor search over the recorded positions; rows are long
    /// enough for both communication and local density.
    const NeighborTable& search_table() const { return table_; }

    /// Advances one step and returns the snapshot taken before agents move.
    StepRecord step() {
        ++t_;
        const std::size_t n = config_.n_agents;
        const BehaviorParams& bp = config_.behavior;

        world_.target = target_step(world_.target, arena_, rng_);

        int cov = 0;
        for (std::size_t i = 0; i < n; ++i) {
            positions_[i] = world_.agents[i].pos;
            detected_[i] = detects(positions_[i], world_.target) ? 1 : 0;
            cov |= detected_[i];
        }

        table_ = knn(positions_, std::max(config_.k, config_.local_density.neighbor_count));

        // Neighbors hear the end-of-previous-step memory plus any direct
        // detection made this step; second-hand news waits a step.
        for (std::size_t j = 0; j < n; ++j) {
            broadcasts_[j].sender = j;
            broadcasts_[j].sighting =
                detected_[j] ? std::optional<Sighting>(Sighting{world_.target.pos, t_}) : world_.agents[j].memory;
        }

        for (std::size_t i = 0; i < n; ++i) {
            const AgentState& a = world_.agents[i];
            row_broadcasts_.clear();
            for (std::size_t j : neighbors(i)) row_broadcasts_.push_back(broadcasts_[j]);
            std::optional<Vec2> seen;
            if (detected_[i]) seen = world_.target.pos;
            AttractionUpdate up = update_point_of_attraction(a, seen, row_broadcasts_, t_, bp);
            next_[i] = a;
            next_[i].exploring = up.exploring;
            next_[i].memory = up.memory;
            points_[i] = up.p;
        }

        for (std::size_t i = 0; i < n; ++i) {
            next_[i].repulsion = update_repulsion_strength(next_[i], bp);
        }

        for (std::size_t i = 0; i < n; ++i) {
            const AgentState& a = next_[i];
            const Velocity rep = repulsion_velocity(a.id, a.pos, a.repulsion, positions_, neighbors(i), bp);
            next_[i] = step_agent(a, points_[i], rep, bp, config_.agent_max_speed, rng_, arena_, config_.boundary);
            if (!next_[i].pos.finite() || !next_[i].vel.finite()) {
                throw NumericError("non-finite state for agent " + std::to_string(i) + " at step " +
                                   std::to_string(t_));
            }
        }

        StepRecord rec;
        rec.t = t_;
        rec.cov = cov;
        rec.positions = positions_;
        rec.exploring.resize(n);
        for (std::size_t i = 0; i < n; ++i) rec.exploring[i] = next_[i].exploring ? 1 : 0;

        std::swap(world_.agents, next_);
        if (config_.check_invariants) check_invariants();
        return rec;
    }

    /// Throws ConfigError describing the first broken per-step invariant.
    void check_invariants() const {
        const BehaviorParams& bp = config_.behavior;
        const double lo = bp.strategy == Strategy::MemorylessFixed ? bp.fixed_repulsion : bp.repulsion_min;
        const double hi = bp.strategy == Strategy::MemorylessFixed ? bp.fixed_repulsion : bp.repulsion_max;
        auto fail = [&](std::size_t i, const std::string& what) {
            throw ConfigError("invariant violated at step " + std::to_string(t_) + ", agent " + std::to_string(i) +
                              ": " + what);
        };
        for (const auto& a : world_.agents) {
            if (a.vel.norm() > config_.agent_max_speed * (1.0 + 1e-12)) fail(a.id, "speed above limit");
            if (a.repulsion < lo || a.repulsion > hi) fail(a.id, "a_R out of range");
            if (!arena_.contains(a.pos)) fail(a.id, "outside arena");
            if (a.exploring == a.memory.has_value()) fail(a.id, "exploring flag disagrees with memory");
            if (a.memory && a.memory->t_best + bp.effective_memory() < t_) fail(a.id, "expired memory held");
        }
        if (!arena_.contains(world_.target.pos)) fail(0, "target outside arena");
    }

private:
    SimConfig config_;
    Rng rng_;
    Arena arena_;
    WorldState world_;
    TimeStep t_{0};
    NeighborTable table_;
    std::vector<Vec2> positions_;
    std::vector<int> detected_;
    std::vector<Broadcast> broadcasts_;
    std::vector<Broadcast> row_broadcasts_;
    std::vector<AgentState> next_;
    std::vector<Vec2> points_;
};

struct RunRecord {
    SimConfig config;
    std::vector<StepRecord> records; // strided; empty unless keep_records
    std::vector<std::uint8_t> coverage; // every step
    RunMetrics metrics;
    double wall_seconds{0.0};
    std::uint64_t seed{0};
};

/// Xi over a slice [begin, end) of a per-step coverage series.
inline double coverage_fraction(std::span<const std::uint8_t> coverage, std::size_t begin, std::size_t end) {
    if (end <= begin || end > coverage.size()) throw ConfigError("coverage_fraction: bad range");
    std::size_t sum = 0;
    for (std::size_t t = begin; t < end; ++t) sum += coverage[t];
    return static_cast<double>(sum) / static_cast<double>(end - begin);
}

/// Runs the configured number of steps. Metrics come from the strided
/// records, so they are exact at stride 1 and flagged subsampled otherwise.
inline RunRecord run(const SimConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    Simulation sim(config);
    RunRecord out;
    out.config = config;
    out.seed = config.seed;
    out.coverage.reserve(static_cast<std::size_t>(config.steps));
    MetricsAccumulator acc(config.local_density, true);
    for (TimeStep t = 1; t <= config.steps; ++t) {
        StepRecord rec = sim.step();
        out.coverage.push_back(static_cast<std::uint8_t>(rec.cov));
        if ((static_cast<std::size_t>(t) - 1) % config.record_stride == 0) {
            acc.add(rec, sim.search_table());
            if (config.keep_records) out.records.push_back(std::move(rec));
        }
    }
    out.metrics = acc.finish(config.arena());
    out.metrics.subsampled = config.record_stride > 1;
    out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

} // namespace swarmlab
