#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "swarmlab/config_io.hpp"
#include "swarmlab/engine.hpp"
#include "swarmlab/keyvalue.hpp"
#include "swarmlab/sweep.hpp"
#include "swarmlab/table_io.hpp"

namespace fs = std::filesystem;
using namespace swarmlab;

namespace {

std::ofstream open_out(const fs::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot write " + path.string());
    return os;
}

void prepare_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create " + dir.string() + ": " + ec.message());
}

int cmd_sweep(const std::string& spec_path, const std::string& out_dir, std::size_t parallelism,
              const std::string& profile) {
    SimConfig base;
    base.steps = profile == "full" ? 100000 : 20000;
    const SweepSpec spec = load_sweep_spec(KeyValueDoc::load(spec_path), base);
    for (const auto& w : spec.base.warnings()) std::cerr << "warning: " << w << '\n';
    const auto jobs = materialize(spec);
    const std::size_t threads = resolve_parallelism(parallelism);
    std::cerr << "sweep: " << jobs.size() << " runs, T=" << spec.base.steps << ", " << threads << " threads\n";

    const ResultsTable table = run_jobs(jobs, threads);

    const fs::path dir(out_dir);
    prepare_dir(dir);
    {
        auto os = open_out(dir / "results.tsv");
        write_results(os, table);
    }
    {
        auto os = open_out(dir / "timings.tsv");
        write_timings(os, table);
    }
    {
        auto os = open_out(dir / "metadata.json");
        os << sweep_metadata(spec, profile, jobs.size()).dump(2) << '\n';
    }
    std::size_t failed = 0;
    for (const auto& r : table.rows) {
        if (!r.ok) {
            ++failed;
            std::cerr << "cell " << r.cell << " replicate " << r.replicate << " failed: " << r.error << '\n';
        }
    }
    std::cerr << "wrote " << (dir / "results.tsv").string() << " (" << table.rows.size() << " rows, " << failed
              << " failed)\n";
    return failed == 0 ? 0 : 1;
}

int cmd_run(const std::string& config_path, const std::string& out_dir, bool records) {
    SimConfig config = load_config(KeyValueDoc::load(config_path));
    for (const auto& w : config.warnings()) std::cerr << "warning: " << w << '\n';
    config.keep_records = records;
    const RunRecord rec = run(config);

    const fs::path dir(out_dir);
    prepare_dir(dir);
    {
        auto os = open_out(dir / "config.txt");
        os << render_config(config);
    }
    nlohmann::ordered_json j;
    j["format"] = "swarmlab-run v1";
    j["version"] = kVersion;
    j["seed"] = rec.seed;
    j["config"] = config_json(config);
    j["metrics"] = metrics_json(rec.metrics);
    j["wall_seconds"] = rec.wall_seconds;
    j["conventions"] = conventions_json();
    {
        auto os = open_out(dir / "run.json");
        os << j.dump(2) << '\n';
    }
    if (records) {
        auto os = open_out(dir / "records.tsv");
        write_records(os, config, rec.records);
    }
    std::cout << metrics_json(rec.metrics).dump(2) << '\n';
    return 0;
}

int cmd_metrics(const std::string& records_path) {
    std::ifstream in(records_path);
    if (!in) throw ConfigError("cannot read " + records_path);
    const RecordsFile file = read_records(in);
    if (file.records.empty()) throw ConfigError(records_path + ": no records");
    RunMetrics m = compute_metrics(file.records, file.config.arena(), file.config.local_density);
    m.subsampled = file.config.record_stride > 1;
    std::cout << metrics_json(m).dump(2) << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"swarm_lab: k-nearest swarm search-and-track simulator and sweep harness"};
    app.require_subcommand(1);

    std::string spec_path, out_dir, profile = "desk";
    std::size_t parallelism = 0;
    auto* sweep = app.add_subcommand("sweep", "run a parameter grid and write results.tsv");
    sweep->add_option("--spec", spec_path, "sweep spec file")->required()->check(CLI::ExistingFile);
    sweep->add_option("--out", out_dir, "output directory")->required();
    sweep->add_option("--parallelism", parallelism, "worker threads (0 = all cores)");
    sweep->add_option("--profile", profile, "desk (T=20000) or full (T=100000)")
        ->check(CLI::IsMember({"desk", "full"}));

    std::string config_path, run_out;
    bool no_records = false;
    auto* single = app.add_subcommand("run", "run one configuration");
    single->add_option("--config", config_path, "config file")->required()->check(CLI::ExistingFile);
    single->add_option("--out", run_out, "output directory")->required();
    single->add_flag("--no-records", no_records, "skip records.tsv");

    std::string records_path;
    auto* metrics = app.add_subcommand("metrics", "recompute metrics from a records file");
    metrics->add_option("--records", records_path, "records.tsv from `run`")->required()->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sweep) return cmd_sweep(spec_path, out_dir, parallelism, profile);
        if (*single) return cmd_run(config_path, run_out, !no_records);
        if (*metrics) return cmd_metrics(records_path);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
