#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "ringres/config.hpp"
#include "ringres/tasks.hpp"

namespace ringres {

// Seed-resolved outcome of one task at one grid point.
struct TaskOutcome {
    std::string task;
    double beta = 0.0;
    std::vector<double> seed_metric;   // NaN where the seed failed
    std::vector<double> seed_lambda;   // chosen ridge lambda per seed
    std::vector<double> seed_sigma_hz; // detuning spread per seed
    std::vector<double> seed_aux;      // secondary metric (waveform accuracy), NaN if none
    // capacity extras, empty for other tasks
    std::vector<double> seed_c1, seed_c2, seed_c3, seed_mc;
    int failed = 0;

    double metric_mean() const;
    double metric_std() const;
    double mean_of(const std::vector<double>& v) const;
};

struct SweepPointResult {
    double tau_fc = 0.0;
    double power_dbm = 0.0;
    double detuning_ghz = 0.0;
    bool self_pulsing = false;
    double pulse_depth = 0.0;
    double sigma_hz = std::numeric_limits<double>::quiet_NaN();  // seed-mean spread
    char region = 'U';
    double wall_ms = 0.0;
    std::vector<TaskOutcome> tasks;

    const TaskOutcome* outcome(const std::string& task) const;
};

// Region labels: C when self-pulsing, A when the detuning spread stays below
// the near-linear threshold, B otherwise; U when the spread is unknown.
char classify_region(double sigma_hz, bool self_pulsing, double sigma_a_threshold_hz);

struct SweepTable {
    std::vector<SweepPointResult> rows;
    std::uint64_t config_hash = 0;
};

struct SweepRunOptions {
    std::string out_dir;            // empty: no checkpoint, no emitted files
    bool resume = false;
    int workers = 0;                // 0: config value, then hardware
    std::optional<int> max_points;  // stop after this many newly computed points
    bool quiet = true;
};

// Runs the grid, checkpointing one JSON line per completed point, and emits
// the result tables unless stopped early. Per-point failures are recorded in
// the affected rows and never abort the sweep.
SweepTable run_sweep(const SweepConfig& config, const SweepRunOptions& opts);

// Writes long.csv, one matrix CSV per (task, carrier lifetime) and the run
// manifest. Emission is deterministic: rows are sorted canonically and all
// numbers use shortest round-trip formatting.
void emit_results(const SweepTable& table, const SweepConfig& config, const std::string& out_dir);

// Single-point task evaluation (the `task` and `capacity` CLI paths).
struct PointRequest {
    double power_dbm = 0.0;
    double detuning_ghz = 0.0;
    double tau_fc = 10e-9;
    std::uint64_t seed = 0;
    bool optimize_bias = false;
};

struct PointTaskResult {
    double metric = 0.0;
    double aux = std::numeric_limits<double>::quiet_NaN();
    double sigma_hz = 0.0;
    double lambda = 0.0;
    double beta = 0.0;
    double c1 = 0.0, c2 = 0.0, c3 = 0.0, mc = 0.0;  // capacity task only
};

PointTaskResult run_point_task(const SweepConfig& config, const std::string& task,
                               const PointRequest& req);

// Debug dump of the sampled reservoir state matrices for one task run.
// Writes <prefix>_train.csv and <prefix>_test.csv, one row per symbol,
// node columns then the bias column.
void dump_state_matrices(const SweepConfig& config, const std::string& task,
                         const PointRequest& req, const std::string& prefix);

}  // namespace ringres
