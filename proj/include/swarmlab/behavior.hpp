#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "swarmlab/core.hpp"
#include "swarmlab/world.hpp"

namespace swarmlab {

using TimeStep = std::int64_t;

enum class Strategy { Adaptive, MemorylessFixed };

/// How the combined velocity is brought to the agent speed limit.
enum class SpeedRule {
    Clamp,   // scale down only when faster than the limit
    Rescale, // always scale to exactly the limit
};

/// A remembered target sighting: where, and at which step it was first seen.
struct Sighting {
    Vec2 p;
    TimeStep t_best{0};

    friend bool operator==(const Sighting&, const Sighting&) = default;
};

struct AgentState {
    std::size_t id{0};
    Vec2 pos;
    Velocity vel;
    double repulsion{0.0}; // a_R, length units
    bool exploring{true};
    std::optional<Sighting> memory;

    friend bool operator==(const AgentState&, const AgentState&) = default;
};

/// What an agent shares with whoever lists it as a neighbor. A missing
/// sighting means the sender knows nothing usable.
struct Broadcast {
    std::size_t sender{0};
    std::optional<Sighting> sighting;
};

struct BehaviorParams {
    double inertia{1.0};         // omega
    double social{0.5};          // c
    TimeStep memory_steps{2};    // t_mem
    double repulsion_min{1.0};
    double repulsion_max{4.0};
    double exponent{6.0};        // d
    double delta_explore{0.1};
    double delta_track{0.75};
    Strategy strategy{Strategy::Adaptive};
    double fixed_repulsion{4.0}; // a_R used by the memoryless baseline
    double coincidence_eps{1e-6};
    SpeedRule speed_rule{SpeedRule::Clamp};

    /// Memory window actually applied; the baseline keeps nothing across steps.
    TimeStep effective_memory() const { return strategy == Strategy::MemorylessFixed ? 0 : memory_steps; }

    /// Empty when valid, otherwise one line per violated bound.
    std::vector<std::string> violations() const {
        std::vector<std::string> out;
        if (!(repulsion_min < repulsion_max)) out.emplace_back("repulsion_min must be < repulsion_max");
        if (!(repulsion_min >= 0.0)) out.emplace_back("repulsion_min must be >= 0");
        if (!(exponent >= 1.0)) out.emplace_back("exponent must be >= 1");
        if (!(delta_explore > 0.0)) out.emplace_back("delta_explore must be > 0");
        if (!(delta_track > 0.0)) out.emplace_back("delta_track must be > 0");
        if (!(social >= 0.0)) out.emplace_back("social must be >= 0");
        if (!(inertia >= 0.0)) out.emplace_back("inertia must be >= 0");
        if (memory_steps < 0) out.emplace_back("memory_steps must be >= 0");
        if (!(coincidence_eps > 0.0)) out.emplace_back("coincidence_eps must be > 0");
        if (strategy == Strategy::MemorylessFixed && !(fixed_repulsion >= 0.0)) {
            out.emplace_back("fixed_repulsion must be >= 0");
        }
        return out;
    }
};

struct AttractionUpdate {
    Vec2 p;
    bool exploring{true};
    std::optional<Sighting> memory;
};

/// Point-of-attraction update with bounded memory.
///
/// A direct detection refreshes the agent's own sighting. Own and neighbor
/// sightings older than the memory window are dropped. The fresher of the
/// two wins; at equal age the neighbor's is taken. Among neighbors the first
/// freshest broadcast in list order wins, so callers pass broadcasts nearest
/// first. With nothing left the point of attraction is the agent's own
/// position and the agent is exploring.
inline AttractionUpdate update_point_of_attraction(const AgentState& agent,
                                                   const std::optional<Vec2>& detected_target,
                                                   std::span<const Broadcast> neighbor_broadcasts,
                                                   TimeStep t,
                                                   const BehaviorParams& params) {
    const TimeStep window = params.effective_memory();
    auto expired = [&](const Sighting& s) { return s.t_best + window < t; };

    std::optional<Sighting> own = agent.memory;
    if (detected_target) {
        own = Sighting{*detected_target, t};
    }
    if (own && expired(*own)) {
        own.reset();
    }

    std::optional<Sighting> neigh;
    for (const auto& b : neighbor_broadcasts) {
        if (b.sighting && (!neigh || b.sighting->t_best > neigh->t_best)) {
            neigh = b.sighting;
        }
    }
    if (neigh && expired(*neigh)) {
        neigh.reset();
    }

    if (!own && !neigh) {
        return {agent.pos, true, std::nullopt};
    }
    if (own && (!neigh || own->t_best > neigh->t_best)) {
        return {own->p, false, own};
    }
    return {neigh->p, false, neigh};
}

/// inertia * v_prev + social * r * (p - pos), r in [0, 1).
inline Velocity attraction_velocity(const AgentState& agent, const Vec2& p, const BehaviorParams& params, double r) {
    return params.inertia * agent.vel + (params.social * r) * (p - agent.pos);
}

/// Draws r from the run generator and applies the attraction rule.
inline Velocity attraction_velocity(const AgentState& agent, const Vec2& p, const BehaviorParams& params, Rng& rng) {
    return attraction_velocity(agent, p, params, rng.uniform());
}

/// Adaptive repulsion: shrink a_R while tracking, grow it while exploring,
/// always staying inside [repulsion_min, repulsion_max]. The memoryless
/// baseline keeps its fixed strength.
inline double update_repulsion_strength(const AgentState& agent, const BehaviorParams& params) {
    if (params.strategy == Strategy::MemorylessFixed) {
        return params.fixed_repulsion;
    }
    if (!agent.exploring) {
        return agent.repulsion > params.repulsion_min
                   ? std::max(agent.repulsion - params.delta_track, params.repulsion_min)
                   : params.repulsion_min;
    }
    return agent.repulsion < params.repulsion_max ? std::min(agent.repulsion + params.delta_explore, params.repulsion_max)
                                                  : params.repulsion_max;
}

/// Deterministic unit vector for a coincident pair, pointing from the lower
/// id to the higher one.
inline Vec2 pair_direction(std::size_t a, std::size_t b) {
    const auto lo = static_cast<std::uint64_t>(std::min(a, b));
    const auto hi = static_cast<std::uint64_t>(std::max(a, b));
    const std::uint64_t h = mix64((lo << 32) ^ hi ^ 0x5bd1e995ULL);
    const double angle = 2.0 * std::numbers::pi * (static_cast<double>(h >> 11) * 0x1.0p-53);
    return {std::cos(angle), std::sin(angle)};
}

/// ratio^exponent, with the default exponent 6 done by multiplication.
inline double repulsion_prefactor(double ratio, double exponent) {
    if (exponent == 6.0) {
        const double cube = ratio * ratio * ratio;
        return cube * cube;
    }
    return std::pow(ratio, exponent);
}

/// Repulsive push on agent `id` at `pos` away from agent `other_id` at
/// `other`: -(a_R / r)^d * r_hat. Separations below coincidence_eps are
/// floored to it; exact coincidence takes the pair's deterministic direction.
inline Velocity repulsion_term(std::size_t id,
                               const Vec2& pos,
                               std::size_t other_id,
                               const Vec2& other,
                               double strength,
                               const BehaviorParams& params) {
    const Vec2 rij = other - pos;
    double r = rij.norm();
    Vec2 unit;
    if (r == 0.0) {
        unit = id < other_id ? pair_direction(id, other_id) : -pair_direction(id, other_id);
        r = params.coincidence_eps;
    } else {
        unit = rij * (1.0 / r);
        r = std::max(r, params.coincidence_eps);
    }
    return -(repulsion_prefactor(strength / r, params.exponent) * unit);
}

/// Sum of repulsion terms over the listed neighbors (indices into
/// `positions`, which are also agent ids), using the agent's own a_R.
inline Velocity repulsion_velocity(std::size_t id,
                                   const Vec2& pos,
                                   double strength,
                                   std::span<const Vec2> positions,
                                   std::span<const std::size_t> neighbors,
                                   const BehaviorParams& params) {
    Velocity v;
    for (std::size_t j : neighbors) {
        v += repulsion_term(id, pos, j, positions[j], strength, params);
    }
    return v;
}

inline Velocity repulsion_velocity(const AgentState& agent,
                                   std::span<const AgentState> neighbor_states,
                                   const BehaviorParams& params) {
    Velocity v;
    for (const auto& n : neighbor_states) {
        v += repulsion_term(agent.id, agent.pos, n.id, n.pos, agent.repulsion, params);
    }
    return v;
}

/// Combines attraction and repulsion, applies the speed rule, moves the agent
/// and applies the boundary rule. `agent.repulsion` and `agent.exploring`
/// must already hold this step's values. Consumes one uniform draw.
inline AgentState step_agent(const AgentState& agent,
                             const Vec2& p,
                             const Velocity& repulsion,
                             const BehaviorParams& params,
                             double max_speed,
                             Rng& rng,
                             const Arena& arena,
                             BoundaryRule boundary = BoundaryRule::Clamp) {
    const Velocity attract = attraction_velocity(agent, p, params, rng);
    const Velocity combined = attract + repulsion;
    AgentState next = agent;
    next.vel = params.speed_rule == SpeedRule::Clamp ? limit_speed(combined, max_speed)
                                                     : rescale_speed(combined, max_speed);
    next.pos = agent.pos + next.vel;
    if (boundary == BoundaryRule::Clamp) {
        next.pos = apply_boundary(next.pos, arena);
    } else {
        reflect_boundary(next.pos, next.vel, arena);
    }
    return next;
}

inline AgentState step_agent(const AgentState& agent,
                             const Vec2& p,
                             std::span<const AgentState> neighbors,
                             const BehaviorParams& params,
                             double max_speed,
                             Rng& rng,
                             const Arena& arena,
                             BoundaryRule boundary = BoundaryRule::Clamp) {
    return step_agent(agent, p, repulsion_velocity(agent, neighbors, params), params, max_speed, rng, arena, boundary);
}

} // namespace swarmlab
