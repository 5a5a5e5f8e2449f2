#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ringres/format.hpp"
#include "ringres/sweep.hpp"

using namespace ringres;
namespace fs = std::filesystem;

namespace {

// tiny but complete configuration so a grid point runs in tens of ms
SweepConfig tiny_config() {
    SweepConfig cfg = SweepConfig::defaults();
    cfg.power_dbm = {-5.0, 5.0};
    cfg.detuning_ghz = {-50.0, 50.0};
    cfg.tau_fc = {10e-12};
    cfg.seeds = {0, 1};
    cfg.tasks = {"narma10", "capacity", "detuning"};
    cfg.narma10.train_len = 80;
    cfg.narma10.test_len = 80;
    cfg.narma10.warmup_len = 60;  // still >= k_max for the capacity scan
    cfg.narma10.beta = 0.9;
    cfg.capacity.k_max = 10;
    return cfg;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_SUITE_BEGIN("sweep");

TEST_CASE("region labels") {
    CHECK(classify_region(1e4, true, 1e7) == 'C');
    CHECK(classify_region(1e4, false, 1e7) == 'A');
    CHECK(classify_region(3e8, false, 1e7) == 'B');
    CHECK(classify_region(std::numeric_limits<double>::quiet_NaN(), false, 1e7) == 'U');
}

TEST_CASE("degenerate one-point grid produces exactly one row") {
    SweepConfig cfg = tiny_config();
    cfg.power_dbm = {0.0};
    cfg.detuning_ghz = {100.0};
    cfg.seeds = {0};
    cfg.tasks = {"narma10"};
    const SweepTable table = run_sweep(cfg, SweepRunOptions{});
    REQUIRE(table.rows.size() == 1);
    const auto* narma = table.rows[0].outcome("narma10");
    REQUIRE(narma != nullptr);
    CHECK(std::isfinite(narma->metric_mean()));
    CHECK(narma->seed_metric.size() == 1);
    CHECK(table.rows[0].outcome("capacity") == nullptr);
    CHECK(table.rows[0].region != 'U');
}

TEST_CASE("grid cardinality multiplies the lifetime axis") {
    SweepConfig cfg = tiny_config();
    cfg.tau_fc = {10e-12, 10e-9, 25e-9};
    cfg.tasks = {"detuning"};
    cfg.seeds = {0};
    const SweepTable table = run_sweep(cfg, SweepRunOptions{});
    CHECK(table.rows.size() == 3 * 2 * 2);
}

TEST_CASE("seed means are plain arithmetic means of the per-seed metrics") {
    const SweepConfig cfg = tiny_config();
    const SweepTable table = run_sweep(cfg, SweepRunOptions{});
    for (const auto& row : table.rows) {
        for (const auto& task : row.tasks) {
            REQUIRE(task.failed == 0);
            double acc = 0.0;
            for (const double v : task.seed_metric) acc += v;
            CHECK(task.metric_mean() ==
                  doctest::Approx(acc / task.seed_metric.size()).epsilon(1e-15));
        }
    }
}

TEST_CASE("emitted artifacts are deterministic and complete") {
    const SweepConfig cfg = tiny_config();
    const fs::path dir1 = "sweep_test_out1";
    const fs::path dir2 = "sweep_test_out2";
    fs::remove_all(dir1);
    fs::remove_all(dir2);

    SweepRunOptions o1;
    o1.out_dir = dir1.string();
    const SweepTable t1 = run_sweep(cfg, o1);
    SweepRunOptions o2;
    o2.out_dir = dir2.string();
    run_sweep(cfg, o2);

    for (const char* name :
         {"long.csv", "matrix_narma10_tau10ps.csv", "matrix_capacity_tau10ps.csv",
          "matrix_detuning_tau10ps.csv"}) {
        CAPTURE(name);
        CHECK(slurp(dir1 / name) == slurp(dir2 / name));
    }
    CHECK(slurp(dir1 / "manifest.ini").find("config_hash = " + fmt(cfg.hash())) !=
          std::string::npos);

    // matrix layout: axis header row/column plus one cell per grid point
    std::istringstream m(slurp(dir1 / "matrix_narma10_tau10ps.csv"));
    std::string line;
    std::getline(m, line);
    CHECK(line == "power_dbm\\detuning_ghz,-50,50");
    int rows = 0;
    while (std::getline(m, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 2);

    // the long table sorts canonically: tau, power, detuning, task order
    std::istringstream l(slurp(dir1 / "long.csv"));
    std::getline(l, line);  // header
    std::getline(l, line);
    CHECK(line.find("1e-11,-5,-50,narma10") == 0);
    std::getline(l, line);
    CHECK(line.find("1e-11,-5,-50,capacity") == 0);

    fs::remove_all(dir1);
    fs::remove_all(dir2);

    // a fresh emit of the same in-memory table is byte-identical too
    emit_results(t1, cfg, dir1.string());
    emit_results(t1, cfg, dir2.string());
    CHECK(slurp(dir1 / "long.csv") == slurp(dir2 / "long.csv"));
    fs::remove_all(dir1);
    fs::remove_all(dir2);
}

TEST_CASE("empty table emission writes headers and manifest") {
    const SweepConfig cfg = tiny_config();
    SweepTable empty;
    empty.config_hash = cfg.hash();
    const fs::path dir = "sweep_test_empty";
    fs::remove_all(dir);
    emit_results(empty, cfg, dir.string());
    const std::string longcsv = slurp(dir / "long.csv");
    CHECK(longcsv.find("tau_fc_s,power_dbm,detuning_ghz,task,") == 0);
    CHECK(longcsv.find('\n') == longcsv.size() - 1);  // header only
    CHECK(fs::exists(dir / "manifest.ini"));
    fs::remove_all(dir);
}

TEST_CASE("interrupted sweeps resume to identical results") {
    const SweepConfig cfg = tiny_config();
    const fs::path full_dir = "sweep_test_full";
    const fs::path part_dir = "sweep_test_part";
    fs::remove_all(full_dir);
    fs::remove_all(part_dir);

    SweepRunOptions full;
    full.out_dir = full_dir.string();
    run_sweep(cfg, full);

    SweepRunOptions part;
    part.out_dir = part_dir.string();
    part.max_points = 2;  // simulate a kill after two grid points
    run_sweep(cfg, part);
    CHECK_FALSE(fs::exists(part_dir / "long.csv"));  // incomplete: no emission

    SweepRunOptions finish;
    finish.out_dir = part_dir.string();
    finish.resume = true;
    run_sweep(cfg, finish);

    CHECK(slurp(full_dir / "long.csv") == slurp(part_dir / "long.csv"));
    CHECK(slurp(full_dir / "matrix_capacity_tau10ps.csv") ==
          slurp(part_dir / "matrix_capacity_tau10ps.csv"));

    fs::remove_all(full_dir);
    fs::remove_all(part_dir);
}

TEST_CASE("resume rejects a checkpoint from another configuration") {
    SweepConfig cfg = tiny_config();
    cfg.power_dbm = {0.0};
    cfg.detuning_ghz = {50.0};
    cfg.tasks = {"detuning"};
    cfg.seeds = {0};
    const fs::path dir = "sweep_test_hash";
    fs::remove_all(dir);
    SweepRunOptions run;
    run.out_dir = dir.string();
    run_sweep(cfg, run);

    cfg.narma10.beta = 0.4;  // different config, same directory
    SweepRunOptions resume;
    resume.out_dir = dir.string();
    resume.resume = true;
    CHECK_THROWS_WITH_AS(run_sweep(cfg, resume), doctest::Contains("different configuration"),
                         std::runtime_error);
    fs::remove_all(dir);
}

TEST_CASE("results are independent of the worker count") {
    const SweepConfig cfg = tiny_config();
    const fs::path d1 = "sweep_test_w1";
    const fs::path d4 = "sweep_test_w4";
    fs::remove_all(d1);
    fs::remove_all(d4);
    SweepRunOptions o1;
    o1.out_dir = d1.string();
    o1.workers = 1;
    run_sweep(cfg, o1);
    SweepRunOptions o4;
    o4.out_dir = d4.string();
    o4.workers = 4;
    run_sweep(cfg, o4);
    CHECK(slurp(d1 / "long.csv") == slurp(d4 / "long.csv"));
    fs::remove_all(d1);
    fs::remove_all(d4);
}

TEST_CASE("classification reports the waveform-level vote alongside") {
    SweepConfig cfg = SweepConfig::defaults();
    cfg.classify.train_len = 96;
    cfg.classify.test_len = 48;
    cfg.classify.warmup_len = 24;
    PointRequest req;
    req.power_dbm = 0.0;
    req.detuning_ghz = 60.0;
    req.tau_fc = 10e-12;
    const PointTaskResult r = run_point_task(cfg, "classify", req);
    CHECK(r.metric >= 0.0);
    CHECK(r.metric <= 1.0);
    CHECK(std::isfinite(r.aux));
    CHECK(r.aux >= 0.0);
    CHECK(r.aux <= 1.0);
}

TEST_CASE("detuning spread collapses in the far-detuned low-power corner") {
    const SweepConfig cfg = SweepConfig::defaults();
    PointRequest corner;
    corner.power_dbm = -20.0;
    corner.detuning_ghz = 300.0;
    corner.tau_fc = 10e-9;
    const double sigma = run_point_task(cfg, "detuning", corner).sigma_hz;
    CHECK(sigma > 0.0);
    CHECK(sigma < 1e6);  // well below a megahertz out here
}

TEST_CASE("single-point task evaluation mirrors the sweep entries") {
    SweepConfig cfg = tiny_config();
    PointRequest req;
    req.power_dbm = 5.0;
    req.detuning_ghz = 50.0;
    req.tau_fc = 10e-12;
    req.seed = 0;
    const PointTaskResult r = run_point_task(cfg, "narma10", req);
    CHECK(std::isfinite(r.metric));
    CHECK(r.beta == cfg.narma10.beta);

    const PointTaskResult c = run_point_task(cfg, "capacity", req);
    CHECK(c.mc == doctest::Approx(c.c1 + c.c2 + c.c3).epsilon(1e-12));
    CHECK(c.metric == c.mc);
}

TEST_SUITE_END();
