#include <cmath>
#include <cstdlib>
#include <set>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "swarmlab/config_io.hpp"
#include "swarmlab/keyvalue.hpp"
#include "swarmlab/sweep.hpp"
#include "swarmlab/table_io.hpp"

using namespace swarmlab;

namespace {

SweepSpec tiny_spec() {
    SweepSpec s;
    s.n_values = {8, 10};
    s.rho_values = {0.1, 0.3};
    s.k_values = {2, 4};
    s.seeds_per_cell = 2;
    s.base_seed = 77;
    s.base.steps = 200;
    return s;
}

} // namespace

TEST(KeyValue, ParsesCommentsListsAndWhitespace) {
    const auto doc = KeyValueDoc::parse("# header\nN = 20, 50  # sizes\n\n  rho=0.1,0.2\nname = x\n");
    EXPECT_EQ(doc.keys(), (std::vector<std::string>{"N", "rho", "name"}));
    EXPECT_EQ(doc.integer_list("N"), (std::vector<std::int64_t>{20, 50}));
    EXPECT_EQ(doc.real_list("rho"), (std::vector<double>{0.1, 0.2}));
    EXPECT_EQ(doc.raw("name"), "x");
}

TEST(KeyValue, Errors) {
    EXPECT_THROW(KeyValueDoc::parse("N 20"), ConfigError);
    EXPECT_THROW(KeyValueDoc::parse("N = 1\nN = 2"), ConfigError);
    EXPECT_THROW(KeyValueDoc::parse("= 2"), ConfigError);
    const auto doc = KeyValueDoc::parse("a = 1.5x\nb = 1,,2\nc = nan\nd = -3");
    EXPECT_THROW(doc.real("a"), ConfigError);
    EXPECT_THROW(doc.integer_list("b"), ConfigError);
    EXPECT_THROW(doc.real("c"), ConfigError);
    EXPECT_THROW(doc.unsigned_integer("d"), ConfigError);
    EXPECT_THROW(doc.raw("missing"), ConfigError);
    try {
        KeyValueDoc::parse("a = 1\nbroken\n", "f.txt");
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("f.txt:2"), std::string::npos);
    }
}

TEST(ConfigIo, RenderRoundTrips) {
    SimConfig c;
    c.n_agents = 37;
    c.side = std::sqrt(37 / 0.0444);
    c.k = 9;
    c.seed = 0xdeadbeefcafef00dULL;
    c.behavior.strategy = Strategy::MemorylessFixed;
    c.behavior.fixed_repulsion = 2.25;
    c.behavior.speed_rule = SpeedRule::Rescale;
    c.boundary = BoundaryRule::Reflect;
    c.record_stride = 3;
    const SimConfig back = load_config(KeyValueDoc::parse(render_config(c)));
    EXPECT_EQ(render_config(back), render_config(c));
    EXPECT_EQ(back.side, c.side);
    EXPECT_EQ(back.seed, c.seed);
    EXPECT_EQ(back.behavior.strategy, Strategy::MemorylessFixed);
}

TEST(ConfigIo, RhoConvertsThroughN) {
    const auto c = load_config(KeyValueDoc::parse("N = 20\nrho = 0.2\nk = 5"));
    EXPECT_NEAR(c.side, 10.0, 1e-12);
    EXPECT_THROW(load_config(KeyValueDoc::parse("N = 20\nrho = 0.2\nL = 3")), ConfigError);
    EXPECT_THROW(load_config(KeyValueDoc::parse("N = 20\nbogus = 1")), ConfigError);
    EXPECT_THROW(load_config(KeyValueDoc::parse("N = 20\nk = 20")), ConfigError);
    EXPECT_THROW(load_config(KeyValueDoc::parse("strategy = greedy")), ConfigError);
}

TEST(Materialize, ProductCountAndOrder) {
    SweepSpec s;
    s.n_values = {20, 50};
    s.rho_values = {0.01, 0.1, 0.5};
    s.k_values = {5, 10};
    s.seeds_per_cell = 5;
    const auto runs = materialize(s);
    ASSERT_EQ(runs.size(), 60u);
    std::set<std::uint64_t> seeds;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        EXPECT_EQ(runs[i].cell, i / 5);
        EXPECT_EQ(runs[i].replicate, i % 5);
        EXPECT_EQ(runs[i].config.seed, derive_seed(s.base_seed, i / 5, i % 5));
        seeds.insert(runs[i].config.seed);
    }
    EXPECT_EQ(seeds.size(), 60u);
    // strategy, N, density, k with k innermost
    EXPECT_EQ(runs[0].config.k, 5u);
    EXPECT_EQ(runs[5].config.k, 10u);
    EXPECT_EQ(runs[10].config.n_agents, 20u);
    EXPECT_NEAR(runs[10].config.side, std::sqrt(20 / 0.1), 1e-12);
    EXPECT_EQ(runs[30].config.n_agents, 50u);
}

TEST(Materialize, RhoInversion) {
    SweepSpec s;
    s.n_values = {20};
    s.rho_values = {0.2};
    s.k_values = {5};
    s.seeds_per_cell = 1;
    const auto runs = materialize(s);
    EXPECT_NEAR(runs[0].config.side, 10.0, 1e-12);
    const double rho = swarm_density(20, runs[0].config.arena());
    EXPECT_NEAR(rho, 0.2, 1e-12 * 0.2);
}

TEST(Materialize, Errors) {
    SweepSpec s = tiny_spec();
    s.k_values.clear();
    EXPECT_THROW(materialize(s), ConfigError);

    s = tiny_spec();
    s.side_values = {10};
    EXPECT_THROW(materialize(s), ConfigError);

    s = tiny_spec();
    s.k_values = {2, 9};
    try {
        materialize(s);
        FAIL();
    } catch (const ConfigError& e) {
        // N=8 with k=9 is the first bad cell: index 1
        EXPECT_NE(std::string(e.what()).find("cell 1"), std::string::npos) << e.what();
        EXPECT_NE(std::string(e.what()).find("k=9"), std::string::npos);
    }
}

TEST(SweepSpecFile, ParsesListsAndOverrides) {
    const auto doc = KeyValueDoc::parse(
        "N = 20, 50\nrho = 0.01, 0.1\nk = 5, 10, 15\nstrategy = adaptive, memoryless\nseeds = 3\n"
        "base_seed = 99\nT = 1000\nt_mem = 7\n");
    const SweepSpec s = load_sweep_spec(doc);
    EXPECT_EQ(s.n_values, (std::vector<std::size_t>{20, 50}));
    EXPECT_EQ(s.k_values.size(), 3u);
    EXPECT_EQ(s.strategies.size(), 2u);
    EXPECT_EQ(s.seeds_per_cell, 3u);
    EXPECT_EQ(s.base_seed, 99u);
    EXPECT_EQ(s.base.steps, 1000);
    EXPECT_EQ(s.base.behavior.memory_steps, 7);
    EXPECT_EQ(materialize(s).size(), 2u * 2u * 2u * 3u * 3u);

    EXPECT_THROW(load_sweep_spec(KeyValueDoc::parse("N = 20\nrho = 0.1\nL = 3\nk = 5")), ConfigError);
    EXPECT_THROW(load_sweep_spec(KeyValueDoc::parse("N = 20\nrho = 0.1\nk = 5\nseed = 3")), ConfigError);
    EXPECT_THROW(load_sweep_spec(KeyValueDoc::parse("N = 20\nwhat = 1")), ConfigError);
    EXPECT_THROW(load_sweep_spec(KeyValueDoc::parse("N = 20\nseeds = 0")), ConfigError);
}

TEST(RunSweep, ParallelismDoesNotChangeRows) {
    const auto jobs = materialize(tiny_spec());
    const auto one = run_jobs(jobs, 1);
    const auto eight = run_jobs(jobs, 8);
    ASSERT_EQ(one.rows.size(), jobs.size());
    ASSERT_EQ(eight.rows.size(), jobs.size());
    std::ostringstream a, b;
    write_results(a, one);
    write_results(b, eight);
    EXPECT_EQ(a.str(), b.str());
    EXPECT_TRUE(one.all_ok());
    for (const auto& r : one.rows) {
        EXPECT_GE(r.metrics.xi, 0.0);
        EXPECT_LE(r.metrics.xi, 1.0);
        EXPECT_GE(r.metrics.theta, 0.0);
        EXPECT_LE(r.metrics.theta, 1.0);
        EXPECT_NEAR(r.rho, static_cast<double>(r.n_agents) / (r.side * r.side), 1e-15);
        EXPECT_FALSE(std::isnan(r.metrics.rho_local));
    }
}

TEST(RunSweep, RerunIsByteIdentical) {
    const SweepSpec s = tiny_spec();
    std::ostringstream a, b;
    write_results(a, run_sweep(s, 2));
    write_results(b, run_sweep(s, 1));
    EXPECT_EQ(a.str(), b.str());
    std::ostringstream ma, mb;
    ma << sweep_metadata(s, "desk", 16).dump(2);
    mb << sweep_metadata(s, "desk", 16).dump(2);
    EXPECT_EQ(ma.str(), mb.str());
}

TEST(RunSweep, FailedRunBecomesErrorRow) {
    auto jobs = materialize(tiny_spec());
    jobs[3].config.k = 50; // corrupt one job after materialization
    const auto table = run_jobs(jobs, 2);
    EXPECT_FALSE(table.all_ok());
    EXPECT_FALSE(table.rows[3].ok);
    EXPECT_FALSE(table.rows[3].error.empty());
    EXPECT_TRUE(table.rows[4].ok);
    std::ostringstream os;
    write_results(os, table);
    std::istringstream is(os.str());
    const auto back = read_results(is);
    EXPECT_FALSE(back.rows[3].ok);
    EXPECT_TRUE(back.rows[4].ok);
}

TEST(RunSweep, EnvironmentOverridesParallelism) {
    ::setenv("SWARM_LAB_THREADS", "3", 1);
    EXPECT_EQ(resolve_parallelism(8), 3u);
    ::setenv("SWARM_LAB_THREADS", "zero", 1);
    EXPECT_EQ(resolve_parallelism(8), 8u);
    ::unsetenv("SWARM_LAB_THREADS");
    EXPECT_EQ(resolve_parallelism(5), 5u);
    EXPECT_GE(resolve_parallelism(0), 1u);
}

TEST(ResultsFile, HeaderAndRoundTrip) {
    const auto table = run_jobs(materialize(tiny_spec()), 1);
    std::ostringstream os;
    write_results(os, table);
    const std::string text = os.str();
    EXPECT_EQ(text.substr(0, text.find('\n')),
              "cell\treplicate\tN\tL\trho\tk\tstrategy\tseed\tstatus\tXi\tTheta\trho_L\tdelta_rho\tsubsampled\terror");
    std::istringstream is(text);
    const auto back = read_results(is);
    ASSERT_EQ(back.rows.size(), table.rows.size());
    for (std::size_t i = 0; i < back.rows.size(); ++i) {
        EXPECT_EQ(back.rows[i].metrics.xi, table.rows[i].metrics.xi);
        EXPECT_EQ(back.rows[i].metrics.delta_rho, table.rows[i].metrics.delta_rho);
        EXPECT_EQ(back.rows[i].side, table.rows[i].side);
        EXPECT_EQ(back.rows[i].seed, table.rows[i].seed);
    }
    std::istringstream bad("cell\tN\n");
    EXPECT_THROW(read_results(bad), ConfigError);
}

TEST(ResultsFile, Fig6GridIsConsumable) {
    SweepSpec s;
    s.n_values = {20, 30, 40, 50};
    s.rho_values = {0.0444};
    s.k_values = {2, 5, 10};
    s.seeds_per_cell = 1;
    s.base.steps = 100;
    const auto table = run_sweep(s, 1);
    EXPECT_EQ(table.rows.size(), 12u);
    std::ostringstream os;
    write_results(os, table);
    std::istringstream is(os.str());
    const auto back = read_results(is);
    for (const auto& r : back.rows) {
        EXPECT_TRUE(r.ok);
        EXPECT_NEAR(r.rho, 0.0444, 1e-12);
    }
}

TEST(RecordsFile, MetricsSurviveTheRoundTrip) {
    SimConfig c;
    c.n_agents = 9;
    c.side = 6;
    c.k = 3;
    c.steps = 300;
    c.keep_records = true;
    const auto rec = run(c);
    std::stringstream ss;
    write_records(ss, c, rec.records);
    const auto file = read_records(ss);
    EXPECT_EQ(render_config(file.config), render_config(c));
    ASSERT_EQ(file.records.size(), rec.records.size());
    EXPECT_EQ(file.records, rec.records);
    EXPECT_EQ(compute_metrics(file.records, file.config.arena(), file.config.local_density), rec.metrics);
}

TEST(RecordsFile, RejectsForeignInput) {
    std::istringstream a("hello\n");
    EXPECT_THROW(read_records(a), ConfigError);
}
