#pragma once

#include <algorithm>
#include <span>

#include "swarmlab/core.hpp"

namespace swarmlab {

enum class BoundaryRule { Clamp, Reflect };

struct Arena {
    double side{10.0};

    bool contains(const Vec2& p) const {
        return p.x >= 0.0 && p.x <= side && p.y >= 0.0 && p.y <= side;
    }

    Vec2 random_point(Rng& rng) const {
        const double x = rng.uniform(0.0, side);
        const double y = rng.uniform(0.0, side);
        return {x, y};
    }
};

struct TargetState {
    Vec2 pos;
    Vec2 waypoint;
    double max_speed{0.15};
    double radius{1.0};
};

/// Moves the target straight at its waypoint. When the remaining distance is
/// within one step of travel the target lands on the waypoint, a fresh one is
/// drawn (two draws, x then y) and the leftover travel continues toward it.
inline TargetState target_step(TargetState target, const Arena& arena, Rng& rng) {
    double budget = target.max_speed;
    Vec2 to_wp = target.waypoint - target.pos;
    double remaining = to_wp.norm();
    if (remaining <= budget) {
        target.pos = target.waypoint;
        budget -= remaining;
        target.waypoint = arena.random_point(rng);
        to_wp = target.waypoint - target.pos;
        remaining = to_wp.norm();
        if (remaining <= budget) {
            // Degenerate redraw right next to the target; stop on it.
            target.pos = target.waypoint;
            return target;
        }
    }
    if (budget > 0.0 && remaining > 0.0) {
        target.pos += to_wp * (budget / remaining);
    }
    return target;
}

/// True iff `p` lies within the target's detection disc (boundary inclusive).
inline bool detects(const Vec2& p, const TargetState& target) {
    return dist2(p, target.pos) <= target.radius * target.radius;
}

/// 1 when at least one agent is inside the detection disc, else 0.
inline int coverage(std::span<const Vec2> agents, const TargetState& target) {
    return std::any_of(agents.begin(), agents.end(), [&](const Vec2& p) { return detects(p, target); }) ? 1 : 0;
}

inline Vec2 apply_boundary(const Vec2& pos, const Arena& arena) {
    return {std::clamp(pos.x, 0.0, arena.side), std::clamp(pos.y, 0.0, arena.side)};
}

/// Mirror reflection at the walls; the matching velocity component flips.
inline void reflect_boundary(Vec2& pos, Velocity& vel, const Arena& arena) {
    auto fold = [&](double& p, double& v) {
        if (p < 0.0) {
            p = -p;
            v = -v;
        } else if (p > arena.side) {
            p = 2.0 * arena.side - p;
            v = -v;
        }
        p = std::clamp(p, 0.0, arena.side);
    };
    fold(pos.x, vel.x);
    fold(pos.y, vel.y);
}

} // namespace swarmlab
