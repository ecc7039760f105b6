#pragma once

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <set>
#include <string>
#include <vector>

#include "swarmlab/engine.hpp"
#include "swarmlab/keyvalue.hpp"

namespace swarmlab {

inline const char* to_string(Strategy s) { return s == Strategy::Adaptive ? "adaptive" : "memoryless"; }
inline const char* to_string(BoundaryRule b) { return b == BoundaryRule::Clamp ? "clamp" : "reflect"; }
inline const char* to_string(SpeedRule r) { return r == SpeedRule::Clamp ? "clamp" : "rescale"; }

inline Strategy parse_strategy(const std::string& s) {
    if (s == "adaptive") return Strategy::Adaptive;
    if (s == "memoryless") return Strategy::MemorylessFixed;
    throw ConfigError("unknown strategy `" + s + "` (adaptive|memoryless)");
}

inline BoundaryRule parse_boundary(const std::string& s) {
    if (s == "clamp") return BoundaryRule::Clamp;
    if (s == "reflect") return BoundaryRule::Reflect;
    throw ConfigError("unknown boundary rule `" + s + "` (clamp|reflect)");
}

inline SpeedRule parse_speed_rule(const std::string& s) {
    if (s == "clamp") return SpeedRule::Clamp;
    if (s == "rescale") return SpeedRule::Rescale;
    throw ConfigError("unknown speed rule `" + s + "` (clamp|rescale)");
}

/// Shortest text that reads back to the same double.
inline std::string format_real(double v) {
    char buf[32];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

/// Scalar keys understood in config and sweep files, in canonical order.
inline const std::vector<std::string>& scalar_config_keys() {
    static const std::vector<std::string> keys = {
        "N", "L", "rho", "k", "T", "seed", "v_a_max", "v_o_max", "r", "strategy", "omega", "c", "t_mem",
        "a_R_min", "a_R_max", "d", "delta_explore", "delta_track", "fixed_a_R", "coincidence_eps",
        "speed_rule", "boundary", "record_stride", "local_neighbors", "local_eps",
    };
    return keys;
}

/// Applies every scalar key present in `doc` to `config`. `L` and `rho` are
/// mutually exclusive; `rho` is turned into L through N / L^2 using the N
/// in effect after this call. Keys in `skip` are left for the caller.
inline void apply_config_keys(const KeyValueDoc& doc, SimConfig& config, const std::set<std::string>& skip = {}) {
    auto want = [&](const char* key) { return doc.has(key) && !skip.count(key); };
    BehaviorParams& b = config.behavior;
    if (want("N")) config.n_agents = static_cast<std::size_t>(doc.integer("N"));
    if (want("k")) config.k = static_cast<std::size_t>(doc.integer("k"));
    if (want("T")) config.steps = doc.integer("T");
    if (want("seed")) config.seed = doc.unsigned_integer("seed");
    if (want("v_a_max")) config.agent_max_speed = doc.real("v_a_max");
    if (want("v_o_max")) config.target_max_speed = doc.real("v_o_max");
    if (want("r")) config.detect_radius = doc.real("r");
    if (want("strategy")) b.strategy = parse_strategy(doc.raw("strategy"));
    if (want("omega")) b.inertia = doc.real("omega");
    if (want("c")) b.social = doc.real("c");
    if (want("t_mem")) b.memory_steps = doc.integer("t_mem");
    if (want("a_R_min")) b.repulsion_min = doc.real("a_R_min");
    if (want("a_R_max")) b.repulsion_max = doc.real("a_R_max");
    if (want("d")) b.exponent = doc.real("d");
    if (want("delta_explore")) b.delta_explore = doc.real("delta_explore");
    if (want("delta_track")) b.delta_track = doc.real("delta_track");
    if (want("fixed_a_R")) b.fixed_repulsion = doc.real("fixed_a_R");
    if (want("coincidence_eps")) b.coincidence_eps = doc.real("coincidence_eps");
    if (want("speed_rule")) b.speed_rule = parse_speed_rule(doc.raw("speed_rule"));
    if (want("boundary")) config.boundary = parse_boundary(doc.raw("boundary"));
    if (want("record_stride")) config.record_stride = static_cast<std::size_t>(doc.integer("record_stride"));
    if (want("local_neighbors")) config.local_density.neighbor_count = static_cast<std::size_t>(doc.integer("local_neighbors"));
    if (want("local_eps")) config.local_density.eps = doc.real("local_eps");
    if (want("L") && want("rho")) throw ConfigError("`L` and `rho` are mutually exclusive");
    if (want("L")) config.side = doc.real("L");
    if (want("rho")) config.side = side_for_density(config.n_agents, doc.real("rho"));
}

/// Reads a single-run config file. Unknown keys are an error.
inline SimConfig load_config(const KeyValueDoc& doc, SimConfig base = {}) {
    const auto& known = scalar_config_keys();
    for (const auto& key : doc.keys()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw ConfigError("unknown config key `" + key + "`");
        }
    }
    apply_config_keys(doc, base);
    base.validate();
    return base;
}

/// Canonical key/value rendering; load_config(render_config(c)) == c.
inline std::string render_config(const SimConfig& c) {
    const BehaviorParams& b = c.behavior;
    std::string out;
    auto line = [&](const char* key, const std::string& value) { out += std::string(key) + " = " + value + "\n"; };
    line("N", std::to_string(c.n_agents));
    line("L", format_real(c.side));
    line("k", std::to_string(c.k));
    line("T", std::to_string(c.steps));
    line("seed", std::to_string(c.seed));
    line("v_a_max", format_real(c.agent_max_speed));
    line("v_o_max", format_real(c.target_max_speed));
    line("r", format_real(c.detect_radius));
    line("strategy", to_string(b.strategy));
    line("omega", format_real(b.inertia));
    line("c", format_real(b.social));
    line("t_mem", std::to_string(b.memory_steps));
    line("a_R_min", format_real(b.repulsion_min));
    line("a_R_max", format_real(b.repulsion_max));
    line("d", format_real(b.exponent));
    line("delta_explore", format_real(b.delta_explore));
    line("delta_track", format_real(b.delta_track));
    line("fixed_a_R", format_real(b.fixed_repulsion));
    line("coincidence_eps", format_real(b.coincidence_eps));
    line("speed_rule", to_string(b.speed_rule));
    line("boundary", to_string(c.boundary));
    line("record_stride", std::to_string(c.record_stride));
    line("local_neighbors", std::to_string(c.local_density.neighbor_count));
    line("local_eps", format_real(c.local_density.eps));
    return out;
}

} // namespace swarmlab
