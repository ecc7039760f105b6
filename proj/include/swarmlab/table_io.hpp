#pragma once

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "swarmlab/config_io.hpp"
#include "swarmlab/engine.hpp"
#include "swarmlab/keyvalue.hpp"
#include "swarmlab/sweep.hpp"

namespace swarmlab {

inline constexpr const char* kResultsFormat = "swarmlab-results v1";
inline constexpr const char* kRecordsFormat = "swarmlab-records v1";
inline constexpr const char* kVersion = "0.3.0";

/// Column order of results.tsv. Consumers may rely on it.
inline const std::vector<std::string>& results_columns() {
    static const std::vector<std::string> cols = {
        "cell", "replicate", "N", "L", "rho", "k", "strategy", "seed", "status",
        "Xi", "Theta", "rho_L", "delta_rho", "subsampled", "error",
    };
    return cols;
}

inline std::string fixed17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string sanitize_field(std::string s) {
    for (char& ch : s) {
        if (ch == '\t' || ch == '\n' || ch == '\r') ch = ' ';
    }
    return s;
}

/// Tab-separated, one header row, one row per (cell, replicate). Error rows
/// leave the metric fields empty. Contains no timing data, so reruns of the
/// same spec produce identical bytes.
inline void write_results(std::ostream& os, const ResultsTable& table) {
    const auto& cols = results_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "\t" : "") << cols[i];
    os << '\n';
    for (const auto& r : table.rows) {
        os << r.cell << '\t' << r.replicate << '\t' << r.n_agents << '\t' << fixed17(r.side) << '\t'
           << fixed17(r.rho) << '\t' << r.k << '\t' << to_string(r.strategy) << '\t' << r.seed << '\t'
           << (r.ok ? "ok" : "error") << '\t';
        if (r.ok) {
            os << fixed17(r.metrics.xi) << '\t' << fixed17(r.metrics.theta) << '\t' << fixed17(r.metrics.rho_local)
               << '\t' << fixed17(r.metrics.delta_rho) << '\t' << (r.metrics.subsampled ? 1 : 0) << '\t';
        } else {
            os << "\t\t\t\t\t";
        }
        os << sanitize_field(r.error) << '\n';
    }
}

inline void write_timings(std::ostream& os, const ResultsTable& table) {
    os << "cell\treplicate\twall_seconds\n";
    for (const auto& r : table.rows) os << r.cell << '\t' << r.replicate << '\t' << fixed17(r.wall_seconds) << '\n';
}

/// Parses results.tsv back into rows (metrics, identity columns, status).
inline ResultsTable read_results(std::istream& is) {
    ResultsTable table;
    std::string line;
    if (!std::getline(is, line)) throw ConfigError("results table is empty");
    std::vector<std::string> header;
    {
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, '\t')) header.push_back(f);
    }
    if (header != results_columns()) throw ConfigError("results table header does not match " + std::string(kResultsFormat));
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::size_t pos = 0;
        while (true) {
            const auto tab = line.find('\t', pos);
            f.push_back(line.substr(pos, tab - pos));
            if (tab == std::string::npos) break;
            pos = tab + 1;
        }
        if (f.size() != header.size()) throw ConfigError("results row has " + std::to_string(f.size()) + " fields");
        ResultRow r;
        r.cell = static_cast<std::size_t>(KeyValueDoc::to_unsigned(f[0], "cell"));
        r.replicate = static_cast<std::size_t>(KeyValueDoc::to_unsigned(f[1], "replicate"));
        r.n_agents = static_cast<std::size_t>(KeyValueDoc::to_unsigned(f[2], "N"));
        r.side = KeyValueDoc::to_real(f[3], "L");
        r.rho = KeyValueDoc::to_real(f[4], "rho");
        r.k = static_cast<std::size_t>(KeyValueDoc::to_unsigned(f[5], "k"));
        r.strategy = parse_strategy(f[6]);
        r.seed = KeyValueDoc::to_unsigned(f[7], "seed");
        r.ok = f[8] == "ok";
        if (r.ok) {
            r.metrics.xi = KeyValueDoc::to_real(f[9], "Xi");
            r.metrics.theta = KeyValueDoc::to_real(f[10], "Theta");
            r.metrics.rho_local = KeyValueDoc::to_real(f[11], "rho_L");
            r.metrics.delta_rho = KeyValueDoc::to_real(f[12], "delta_rho");
            r.metrics.subsampled = f[13] == "1";
            r.metrics.rho = r.rho;
        }
        r.error = f[14];
        table.rows.push_back(std::move(r));
    }
    return table;
}

inline nlohmann::ordered_json config_json(const SimConfig& c) {
    nlohmann::ordered_json j;
    const KeyValueDoc doc = KeyValueDoc::parse(render_config(c));
    for (const auto& key : doc.keys()) j[key] = doc.raw(key);
    return j;
}

inline nlohmann::ordered_json conventions_json() {
    nlohmann::ordered_json j;
    j["initialization"] = "agents and target uniform over [0,L]^2, first waypoint uniform, zero velocity, "
                          "a_R = a_R_max (fixed_a_R for memoryless), all agents exploring";
    j["draw_order"] = "init: agent x,y by ascending id, target x,y, waypoint x,y; per step: waypoint redraw "
                      "(x,y) on arrival, then one attraction draw per agent by ascending id";
    j["rng"] = "mt19937_64 seeded with the run seed; uniform = (draw >> 11) * 2^-53";
    j["seed_derivation"] = "seed = base_seed XOR splitmix64((cell << 32) | replicate)";
    j["cell_order"] = "strategy, N, density, k (outermost first); replicate innermost";
    j["boundary"] = "position clamp to [0,L]; velocity kept (reflect available)";
    return j;
}

/// Sidecar document for a sweep: full base config, grid, calibrated
/// constants and conventions. Deterministic for a given spec.
inline nlohmann::ordered_json sweep_metadata(const SweepSpec& spec, const std::string& profile, std::size_t runs) {
    nlohmann::ordered_json j;
    j["format"] = kResultsFormat;
    j["version"] = kVersion;
    j["profile"] = profile;
    j["columns"] = results_columns();
    j["timings_file"] = "timings.tsv";
    nlohmann::ordered_json grid;
    grid["N"] = spec.n_values;
    if (!spec.rho_values.empty()) grid["rho"] = spec.rho_values;
    if (!spec.side_values.empty()) grid["L"] = spec.side_values;
    grid["k"] = spec.k_values;
    std::vector<std::string> strategies;
    for (auto s : spec.strategies) strategies.emplace_back(to_string(s));
    grid["strategy"] = strategies;
    grid["seeds"] = spec.seeds_per_cell;
    grid["base_seed"] = spec.base_seed;
    j["grid"] = grid;
    j["runs"] = runs;
    j["base_config"] = config_json(spec.base);
    j["calibrated"] = {
        {"a_R_min", spec.base.behavior.repulsion_min},
        {"a_R_max", spec.base.behavior.repulsion_max},
        {"t_mem", spec.base.behavior.memory_steps},
        {"fixed_a_R", spec.base.behavior.fixed_repulsion},
    };
    j["conventions"] = conventions_json();
    return j;
}

/// Trajectory dump: a format line, `#cfg key = value` lines carrying the
/// run config, a column header, then one row per recorded step:
/// t, cov, and x_i, y_i, exploring_i for every agent in id order.
inline void write_records(std::ostream& os, const SimConfig& config, const std::vector<StepRecord>& records) {
    os << "# " << kRecordsFormat << '\n';
    std::istringstream cfg(render_config(config));
    for (std::string line; std::getline(cfg, line);) os << "#cfg " << line << '\n';
    os << "t\tcov";
    for (std::size_t i = 0; i < config.n_agents; ++i) os << "\tx" << i << "\ty" << i << "\te" << i;
    os << '\n';
    for (const auto& r : records) {
        os << r.t << '\t' << r.cov;
        for (std::size_t i = 0; i < r.positions.size(); ++i) {
            os << '\t' << fixed17(r.positions[i].x) << '\t' << fixed17(r.positions[i].y) << '\t'
               << static_cast<int>(r.exploring[i]);
        }
        os << '\n';
    }
}

struct RecordsFile {
    SimConfig config;
    std::vector<StepRecord> records;
};

inline RecordsFile read_records(std::istream& is) {
    RecordsFile out;
    std::string line;
    if (!std::getline(is, line) || line != std::string("# ") + kRecordsFormat) {
        throw ConfigError("not a " + std::string(kRecordsFormat) + " file");
    }
    std::string cfg_text;
    while (std::getline(is, line) && line.rfind("#cfg ", 0) == 0) cfg_text += line.substr(5) + "\n";
    out.config = load_config(KeyValueDoc::parse(cfg_text, "records header"));
    // `line` now holds the column header.
    const std::size_t n = out.config.n_agents;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        StepRecord r;
        if (!(ss >> r.t >> r.cov)) throw ConfigError("bad records row");
        r.positions.resize(n);
        r.exploring.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            int e = 0;
            if (!(ss >> r.positions[i].x >> r.positions[i].y >> e)) {
                throw ConfigError("records row at t=" + std::to_string(r.t) + " is short");
            }
            r.exploring[i] = static_cast<std::uint8_t>(e != 0);
        }
        out.records.push_back(std::move(r));
    }
    return out;
}

inline nlohmann::ordered_json metrics_json(const RunMetrics& m) {
    nlohmann::ordered_json j;
    j["Xi"] = m.xi;
    j["Theta"] = m.theta;
    j["rho"] = m.rho;
    j["rho_L"] = m.rho_local;
    j["delta_rho"] = m.delta_rho;
    j["subsampled"] = m.subsampled;
    j["eps_floor_hits"] = m.eps_floor_hits;
    return j;
}

} // namespace swarmlab
