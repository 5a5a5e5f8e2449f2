// ringres: silicon microring time-delay reservoir simulator and sweep driver.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "ringres/capacity.hpp"
#include "ringres/cavity.hpp"
#include "ringres/config.hpp"
#include "ringres/format.hpp"
#include "ringres/pipeline.hpp"
#include "ringres/sweep.hpp"
#include "ringres/tasks.hpp"
#include "ringres/version.hpp"

using namespace ringres;

namespace {

SweepConfig load_config(const std::string& path) {
    if (path.empty()) return SweepConfig::defaults();
    return SweepConfig::from_ini(IniDoc::load(path));
}

void apply_radar_cli(SweepConfig& cfg, const std::string& data, bool surrogate, int horizon) {
    if (!data.empty()) {
        cfg.radar.data_path = data;
        cfg.radar.surrogate = false;
    }
    if (surrogate) {
        cfg.radar.data_path.clear();
        cfg.radar.surrogate = true;
    }
    if (horizon > 0) cfg.radar.horizon = horizon;
}

int cmd_trace(const SweepConfig& cfg, const PointRequest& req, const std::string& task,
              Eigen::Index symbols, const std::string& out_path) {
    const PhysicalParams params = resolved_physics(cfg, req.tau_fc, ghz_to_rad_s(req.detuning_ghz));
    const double watts = dbm_to_watts(req.power_dbm);

    const TaskConfig& tc = cfg.task(task);
    SplitSpec split{symbols > 0 ? symbols : tc.train_len, 1, 0};
    TaskDataset data;
    if (task == "classify") data = gen_waveform_classification(split, req.seed);
    else if (task == "equalize")
        data = gen_channel_equalization(split, req.seed, cfg.equalize.snr_db, 1);
    else if (task == "radar") {
        if (!cfg.radar.data_path.empty()) data = load_radar(cfg.radar.data_path, cfg.radar.horizon, split);
        else {
            const Eigen::Index need = (split.train_len + split.test_len + cfg.radar.horizon) / 2 + 2;
            data = gen_surrogate_radar(need, req.seed, cfg.radar.horizon, split);
        }
    } else data = gen_narma10(split, req.seed);

    const Mask mask = make_mask(cfg.mask_seed, cfg.node_count, data.mask_lo, data.mask_hi);
    ModulationConfig mod;
    mod.symbol_rate = cfg.symbol_rate;
    mod.node_count = cfg.node_count;
    mod.input_bias = tc.beta;
    mod.average_power_w = watts;
    mod.pump_detuning = params.delta_omega;
    mod.bipolar = data.bipolar_modulation;

    const Eigen::VectorXd x_hat = build_masked_input(data.input, mask, mod.input_bias);
    const double scale = power_scale(x_hat, mod);
    const Eigen::VectorXcd envelope = modulate(x_hat, mod, params.dt, scale);
    const FeedbackRun run = run_with_feedback(envelope, params);

    const int k = mod.steps_per_node(params.dt);
    const Eigen::VectorXd node_power = photodetect(run.drop_power, k);
    const Eigen::VectorXd node_detuning = photodetect(run.delta_nl_hz, k);

    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
        std::cerr << "cannot write " << out_path << "\n";
        return 1;
    }
    out << "t_s,drop_power_w,delta_nl_hz\n";
    const double theta = mod.node_duration();
    for (Eigen::Index i = 0; i < node_power.size(); ++i)
        out << fmt((static_cast<double>(i) + 1.0) * theta) << ',' << fmt(node_power[i]) << ','
            << fmt(node_detuning[i]) << '\n';
    std::cout << "wrote " << node_power.size() << " node samples to " << out_path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"silicon microring time-delay reservoir computer"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    std::string config_path, out_dir, out_file, task_name, radar_data;
    PointRequest req;
    bool resume = false, surrogate = false, dump_defaults = false;
    int workers = 0, max_points = -1, horizon = 0;
    long long symbols = 0;

    auto add_point_opts = [&](CLI::App* cmd) {
        cmd->add_option("--pin", req.power_dbm, "average input power (dBm)");
        cmd->add_option("--detuning", req.detuning_ghz, "pump detuning (GHz)");
        cmd->add_option("--tau-fc", req.tau_fc, "free-carrier lifetime (s)");
        cmd->add_option("--seed", req.seed, "input sequence seed");
        cmd->add_option("--config", config_path, "configuration file");
    };

    auto* sweep = app.add_subcommand("sweep", "run a parameter-space sweep");
    sweep->add_option("--config", config_path, "configuration file");
    sweep->add_option("--out", out_dir, "output directory")->required();
    sweep->add_flag("--resume", resume, "continue from the checkpoint in --out");
    sweep->add_option("--workers", workers, "worker thread count (0 = hardware)");
    sweep->add_option("--max-points", max_points, "stop after N newly computed grid points");

    std::string dump_states;
    auto* task = app.add_subcommand("task", "evaluate one task at one grid point");
    task->add_option("name", task_name, "narma10|classify|equalize|radar")->required();
    add_point_opts(task);
    task->add_flag("--optimize-bias", req.optimize_bias, "grid-search the input bias");
    task->add_option("--radar-data", radar_data, "radar CSV file (header i,q)");
    task->add_flag("--surrogate", surrogate, "use the synthetic radar record");
    task->add_option("--k", horizon, "radar prediction horizon");
    task->add_option("--dump-states", dump_states,
                     "write <prefix>_train.csv/<prefix>_test.csv state matrices");

    auto* capacity = app.add_subcommand("capacity", "memory capacity at one grid point");
    add_point_opts(capacity);
    capacity->add_option("--out", out_file, "write the per-(order,k) curve CSV here");

    auto* trace = app.add_subcommand("trace", "dump a node-sampled time trace");
    add_point_opts(trace);
    trace->add_option("--task", task_name, "input kind (default narma10)");
    trace->add_option("--symbols", symbols, "number of symbols to drive");
    trace->add_option("--out", out_file, "output CSV path")->required();

    auto* config = app.add_subcommand("config", "configuration utilities");
    config->add_flag("--dump-defaults", dump_defaults, "print the default configuration");
    config->add_option("--config", config_path, "configuration file to normalize/echo");
    config->add_option("--out", out_file, "write instead of printing");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sweep->parsed()) {
            SweepConfig cfg = load_config(config_path);
            SweepRunOptions opts;
            opts.out_dir = out_dir;
            opts.resume = resume;
            opts.workers = workers;
            opts.quiet = false;
            if (max_points >= 0) opts.max_points = max_points;
            const SweepTable table = run_sweep(cfg, opts);
            std::cout << "sweep: " << table.rows.size() << " grid points, config hash "
                      << fmt(table.config_hash) << "\n";
            return 0;
        }
        if (task->parsed()) {
            SweepConfig cfg = load_config(config_path);
            apply_radar_cli(cfg, radar_data, surrogate, horizon);
            const PointTaskResult r = run_point_task(cfg, task_name, req);
            std::cout << "task=" << task_name << " pin_dbm=" << fmt(req.power_dbm)
                      << " detuning_ghz=" << fmt(req.detuning_ghz)
                      << " tau_fc_s=" << fmt(req.tau_fc) << " seed=" << fmt(req.seed) << "\n";
            std::cout << "metric=" << fmt(r.metric) << " lambda=" << fmt(r.lambda)
                      << " beta=" << fmt(r.beta) << " sigma_delta_nl_hz=" << fmt(r.sigma_hz);
            if (std::isfinite(r.aux)) std::cout << " waveform_accuracy=" << fmt(r.aux);
            std::cout << "\n";
            if (!dump_states.empty()) {
                dump_state_matrices(cfg, task_name, req, dump_states);
                std::cout << "wrote " << dump_states << "_train.csv and " << dump_states
                          << "_test.csv\n";
            }
            return 0;
        }
        if (capacity->parsed()) {
            SweepConfig cfg = load_config(config_path);
            const PointTaskResult r = run_point_task(cfg, "capacity", req);
            std::cout << "mc=" << fmt(r.mc) << " c1=" << fmt(r.c1) << " c2=" << fmt(r.c2)
                      << " c3=" << fmt(r.c3) << " sigma_delta_nl_hz=" << fmt(r.sigma_hz) << "\n";
            if (!out_file.empty()) {
                // re-run through the report path for the full curves
                const PhysicalParams params =
                    resolved_physics(cfg, req.tau_fc, ghz_to_rad_s(req.detuning_ghz));
                const TaskDataset data =
                    gen_narma10(SplitSpec{cfg.narma10.train_len, cfg.narma10.test_len,
                                          cfg.narma10.warmup_len},
                                req.seed);
                const Mask mask = make_mask(cfg.mask_seed, cfg.node_count, data.mask_lo, data.mask_hi);
                ModulationConfig mod;
                mod.symbol_rate = cfg.symbol_rate;
                mod.node_count = cfg.node_count;
                mod.input_bias = cfg.narma10.beta;
                mod.average_power_w = dbm_to_watts(req.power_dbm);
                mod.pump_detuning = params.delta_omega;
                const ReservoirStates st = run_reservoir(data.input, data.train_len, data.test_len,
                                                         data.warmup_len, mask, mod, params);
                CapacityOptions co = cfg.capacity;
                co.input_lo = 0.0;
                co.input_hi = 0.5;
                const CapacityReport report =
                    capacity_report(st.train, st.test, data.input, data.warmup_len,
                                    2 * data.warmup_len + data.train_len, co);
                std::ofstream out(out_file, std::ios::binary);
                out << report.to_csv();
                std::cout << "wrote capacity curves to " << out_file << "\n";
            }
            return 0;
        }
        if (trace->parsed()) {
            SweepConfig cfg = load_config(config_path);
            if (task_name.empty()) task_name = "narma10";
            return cmd_trace(cfg, req, task_name, symbols, out_file);
        }
        if (config->parsed()) {
            const SweepConfig cfg = dump_defaults ? SweepConfig::defaults() : load_config(config_path);
            if (out_file.empty()) {
                std::cout << cfg.to_ini().dump();
            } else {
                cfg.to_ini().save(out_file);
                std::cout << "wrote " << out_file << "\n";
            }
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
