#include "ringres/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <nlohmann/json.hpp>
#include <sstream>
#include <thread>

#include "ringres/cavity.hpp"
#include "ringres/format.hpp"
#include "ringres/pipeline.hpp"
#include "ringres/readout.hpp"
#include "ringres/version.hpp"

namespace ringres {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

double mean_ignoring_nan(const std::vector<double>& v) {
    double sum = 0.0;
    int n = 0;
    for (double x : v)
        if (std::isfinite(x)) {
            sum += x;
            ++n;
        }
    return n ? sum / n : kNan;
}

double std_ignoring_nan(const std::vector<double>& v) {
    const double m = mean_ignoring_nan(v);
    if (!std::isfinite(m)) return kNan;
    double sum = 0.0;
    int n = 0;
    for (double x : v)
        if (std::isfinite(x)) {
            sum += (x - m) * (x - m);
            ++n;
        }
    return std::sqrt(sum / n);
}

}  // namespace

double TaskOutcome::metric_mean() const { return mean_ignoring_nan(seed_metric); }
double TaskOutcome::metric_std() const { return std_ignoring_nan(seed_metric); }
double TaskOutcome::mean_of(const std::vector<double>& v) const { return mean_ignoring_nan(v); }

const TaskOutcome* SweepPointResult::outcome(const std::string& task) const {
    for (const auto& t : tasks)
        if (t.task == task) return &t;
    return nullptr;
}

char classify_region(double sigma_hz, bool self_pulsing, double sigma_a_threshold_hz) {
    if (self_pulsing) return 'C';
    if (!std::isfinite(sigma_hz)) return 'U';
    return sigma_hz < sigma_a_threshold_hz ? 'A' : 'B';
}

namespace {

// ---------------------------------------------------------------------------
// dataset cache: datasets depend on (task, seed) but not on the grid point

struct DatasetCache {
    std::map<std::pair<std::string, std::uint64_t>, TaskDataset> items;

    const TaskDataset& get(const std::string& task, std::uint64_t seed) const {
        return items.at({task, seed});
    }
};

SplitSpec split_of(const TaskConfig& t) {
    return SplitSpec{t.train_len, t.test_len, t.warmup_len};
}

TaskDataset build_dataset(const SweepConfig& cfg, const std::string& task, std::uint64_t seed) {
    if (task == "family") return gen_narma10(split_of(cfg.narma10), seed);
    if (task == "classify") return gen_waveform_classification(split_of(cfg.classify), seed);
    if (task == "equalize")
        return gen_channel_equalization(split_of(cfg.equalize), seed, cfg.equalize.snr_db,
                                        cfg.equalize.test_subsets);
    if (task == "radar") {
        const auto split = split_of(cfg.radar);
        if (!cfg.radar.data_path.empty()) {
            TaskDataset d = load_radar(cfg.radar.data_path, cfg.radar.horizon, split);
            d.seed = d.requested_seed = seed;
            return d;
        }
        if (!cfg.radar.surrogate)
            throw std::invalid_argument("radar task needs a data path or the surrogate enabled");
        const Eigen::Index need = (2 * split.warmup_len + split.train_len + split.test_len +
                                   cfg.radar.horizon + 1) / 2 + 1;
        return gen_surrogate_radar(need, seed, cfg.radar.horizon, split);
    }
    throw std::invalid_argument("unknown dataset kind: " + task);
}

// which dataset kinds the requested task list needs
std::vector<std::string> dataset_kinds(const std::vector<std::string>& tasks) {
    std::vector<std::string> kinds;
    auto add = [&kinds](const std::string& k) {
        if (std::find(kinds.begin(), kinds.end(), k) == kinds.end()) kinds.push_back(k);
    };
    for (const auto& t : tasks) {
        if (t == "narma10" || t == "capacity" || t == "detuning") add("family");
        else add(t);
    }
    return kinds;
}

// ---------------------------------------------------------------------------
// single reservoir evaluations

struct RunMetrics {
    double metric = kNan;
    double aux = kNan;
    double lambda = kNan;
    double sigma_hz = kNan;
    double c1 = kNan, c2 = kNan, c3 = kNan, mc = kNan;
};

ModulationConfig make_mod(const SweepConfig& cfg, const TaskDataset& data, double beta,
                          double watts, double delta_omega) {
    ModulationConfig mod;
    mod.symbol_rate = cfg.symbol_rate;
    mod.node_count = cfg.node_count;
    mod.input_bias = beta;
    mod.average_power_w = watts;
    mod.pump_detuning = delta_omega;
    mod.bipolar = data.bipolar_modulation;
    return mod;
}

double evaluate_metric(const TaskDataset& data, const Eigen::VectorXd& y_hat,
                       const Eigen::VectorXd& y, double* aux) {
    switch (data.metric) {
        case MetricKind::nmse:
            return nmse(y_hat, y);
        case MetricKind::accuracy: {
            if (aux && data.group.size() == data.input.size()) {
                // waveform-level majority vote over the points of each period
                const Eigen::Index off = 2 * data.warmup_len + data.train_len;
                std::map<int, std::pair<int, int>> votes;  // group -> (square votes, total)
                std::map<int, double> label;
                for (Eigen::Index i = 0; i < y_hat.size(); ++i) {
                    const int g = data.group[off + i];
                    auto& v = votes[g];
                    v.first += y_hat[i] >= 0.5;
                    ++v.second;
                    label[g] = y[i];
                }
                int good = 0;
                for (const auto& [g, v] : votes) {
                    const bool pred_square = 2 * v.first >= v.second;  // ties go to square
                    good += pred_square == (label[g] >= 0.5);
                }
                *aux = static_cast<double>(good) / static_cast<double>(votes.size());
            }
            return accuracy(y_hat, y);
        }
        case MetricKind::ser: {
            const int subsets = data.test_subsets;
            const Eigen::Index chunk = y.size() / subsets;
            double acc = 0.0;
            for (int s = 0; s < subsets; ++s)
                acc += ser(y_hat.segment(s * chunk, chunk), y.segment(s * chunk, chunk));
            return acc / subsets;
        }
    }
    return kNan;
}

// One reservoir pass plus readout for any task. `want_capacity` adds the
// memory-capacity scan on the same states.
RunMetrics run_once(const SweepConfig& cfg, const TaskDataset& data, const PhysicalParams& params,
                    double watts, double beta, bool want_capacity) {
    const Mask mask = make_mask(cfg.mask_seed, cfg.node_count, data.mask_lo, data.mask_hi);
    const ModulationConfig mod = make_mod(cfg, data, beta, watts, params.delta_omega);
    const ReservoirStates states = run_reservoir(data.input, data.train_len, data.test_len,
                                                 data.warmup_len, mask, mod, params);

    RunMetrics out;
    out.sigma_hz = states.detuning.sigma_hz;

    const Eigen::VectorXd y_train = data.train_targets();
    const Eigen::VectorXd y_test = data.test_targets();
    const auto model = train_ridge_cv<double>(states.train, y_train);
    out.lambda = model.lambda;
    const Eigen::VectorXd y_hat = predict(model, states.test);
    double aux = kNan;
    out.metric = evaluate_metric(data, y_hat, y_test, &aux);
    out.aux = aux;

    if (want_capacity) {
        CapacityOptions opts = cfg.capacity;
        opts.input_lo = 0.0;
        opts.input_hi = 0.5;
        const auto report =
            capacity_report(states.train, states.test, data.input, data.warmup_len,
                            2 * data.warmup_len + data.train_len, opts);
        out.c1 = report.order_sums.size() > 0 ? report.order_sums[0] : kNan;
        out.c2 = report.order_sums.size() > 1 ? report.order_sums[1] : kNan;
        out.c3 = report.order_sums.size() > 2 ? report.order_sums[2] : kNan;
        out.mc = report.total;
    }
    return out;
}

// Validation grid search for the input bias: the last fifth of the train
// rows serves as the validation split; smaller metric wins (accuracy is
// flipped). The chosen bias is then used for every seed at the point.
double optimize_beta(const SweepConfig& cfg, const TaskDataset& data, const PhysicalParams& params,
                     double watts) {
    const Mask mask = make_mask(cfg.mask_seed, cfg.node_count, data.mask_lo, data.mask_hi);
    double best_beta = 0.1;
    double best_score = std::numeric_limits<double>::infinity();
    for (int i = 1; i <= 10; ++i) {
        const double beta = 0.1 * i;
        const ModulationConfig mod = make_mod(cfg, data, beta, watts, params.delta_omega);
        double score;
        try {
            const ReservoirStates states = run_reservoir(
                data.input, data.train_len, data.test_len, data.warmup_len, mask, mod, params);
            const Eigen::Index val = data.train_len / 5;
            const Eigen::Index fit = data.train_len - val;
            const auto model = train_ridge_cv<double>(states.train.topRows(fit),
                                                      data.train_targets().head(fit));
            const Eigen::VectorXd y_hat = predict(model, states.train.bottomRows(val));
            const Eigen::VectorXd y_val = data.train_targets().tail(val);
            switch (data.metric) {
                case MetricKind::accuracy: score = -accuracy(y_hat, y_val); break;
                case MetricKind::ser: score = ser(y_hat, y_val); break;
                default: score = nmse(y_hat, y_val); break;
            }
        } catch (const std::exception&) {
            continue;
        }
        if (score < best_score) {
            best_score = score;
            best_beta = beta;
        }
    }
    return best_beta;
}

// ---------------------------------------------------------------------------
// per-point evaluation

SweepPointResult evaluate_point(const SweepConfig& cfg, double tau_fc, double power_dbm,
                                double detuning_ghz, const DatasetCache& cache) {
    const auto t0 = std::chrono::steady_clock::now();
    SweepPointResult row;
    row.tau_fc = tau_fc;
    row.power_dbm = power_dbm;
    row.detuning_ghz = detuning_ghz;

    const PhysicalParams params = resolved_physics(cfg, tau_fc, ghz_to_rad_s(detuning_ghz));
    const double watts = dbm_to_watts(power_dbm);
    const std::size_t n_seeds = cfg.seeds.size();

    try {
        SelfPulsingOptions sp;
        sp.depth_threshold = cfg.pulse_depth_threshold;
        const auto pulse = detect_self_pulsing(params, watts, params.delta_omega, sp);
        row.self_pulsing = pulse.is_pulsing;
        row.pulse_depth = pulse.oscillation_depth;
    } catch (const std::exception&) {
        // a blown-up probe never aborts the sweep; the row keeps NaN depth
        row.self_pulsing = false;
        row.pulse_depth = kNan;
    }

    const bool want_narma =
        std::find(cfg.tasks.begin(), cfg.tasks.end(), "narma10") != cfg.tasks.end();
    const bool want_capacity =
        std::find(cfg.tasks.begin(), cfg.tasks.end(), "capacity") != cfg.tasks.end();
    const bool want_detuning =
        std::find(cfg.tasks.begin(), cfg.tasks.end(), "detuning") != cfg.tasks.end();

    auto new_outcome = [n_seeds](const std::string& name, double beta) {
        TaskOutcome o;
        o.task = name;
        o.beta = beta;
        o.seed_metric.assign(n_seeds, kNan);
        o.seed_lambda.assign(n_seeds, kNan);
        o.seed_sigma_hz.assign(n_seeds, kNan);
        o.seed_aux.assign(n_seeds, kNan);
        return o;
    };

    std::vector<TaskOutcome> outcomes;
    if (want_narma || want_capacity || want_detuning) {
        double beta = cfg.narma10.beta;
        if (cfg.optimize_bias)
            beta = optimize_beta(cfg, cache.get("family", cfg.seeds.front()), params, watts);
        TaskOutcome narma = new_outcome("narma10", beta);
        TaskOutcome capacity = new_outcome("capacity", beta);
        capacity.seed_c1.assign(n_seeds, kNan);
        capacity.seed_c2.assign(n_seeds, kNan);
        capacity.seed_c3.assign(n_seeds, kNan);
        capacity.seed_mc.assign(n_seeds, kNan);
        TaskOutcome detuning = new_outcome("detuning", beta);

        for (std::size_t s = 0; s < n_seeds; ++s) {
            try {
                const RunMetrics m =
                    run_once(cfg, cache.get("family", cfg.seeds[s]), params, watts, beta,
                             want_capacity);
                narma.seed_metric[s] = m.metric;
                narma.seed_lambda[s] = m.lambda;
                narma.seed_sigma_hz[s] = m.sigma_hz;
                capacity.seed_metric[s] = m.mc;
                capacity.seed_lambda[s] = m.lambda;
                capacity.seed_sigma_hz[s] = m.sigma_hz;
                capacity.seed_c1[s] = m.c1;
                capacity.seed_c2[s] = m.c2;
                capacity.seed_c3[s] = m.c3;
                capacity.seed_mc[s] = m.mc;
                detuning.seed_metric[s] = m.sigma_hz;
                detuning.seed_sigma_hz[s] = m.sigma_hz;
            } catch (const std::exception&) {
                ++narma.failed;
                ++capacity.failed;
                ++detuning.failed;
            }
        }
        for (const auto& t : cfg.tasks) {
            if (t == "narma10") outcomes.push_back(narma);
            if (t == "capacity") outcomes.push_back(capacity);
            if (t == "detuning") outcomes.push_back(detuning);
        }
    }

    for (const auto& t : cfg.tasks) {
        if (t == "narma10" || t == "capacity" || t == "detuning") continue;
        double beta = cfg.task(t).beta;
        if (cfg.optimize_bias)
            beta = optimize_beta(cfg, cache.get(t, cfg.seeds.front()), params, watts);
        TaskOutcome o = new_outcome(t, beta);
        for (std::size_t s = 0; s < n_seeds; ++s) {
            try {
                const RunMetrics m =
                    run_once(cfg, cache.get(t, cfg.seeds[s]), params, watts, beta, false);
                o.seed_metric[s] = m.metric;
                o.seed_lambda[s] = m.lambda;
                o.seed_sigma_hz[s] = m.sigma_hz;
                o.seed_aux[s] = m.aux;
            } catch (const std::exception&) {
                ++o.failed;
            }
        }
        outcomes.push_back(o);
    }
    row.tasks = std::move(outcomes);

    // representative spread: first task in config order that measured one
    for (const auto& o : row.tasks) {
        const double s = mean_ignoring_nan(o.seed_sigma_hz);
        if (std::isfinite(s)) {
            row.sigma_hz = s;
            break;
        }
    }
    row.region = classify_region(row.sigma_hz, row.self_pulsing, cfg.region_sigma_a_hz);

    row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                      .count();
    return row;
}

// ---------------------------------------------------------------------------
// checkpoint serialization

json to_json(const SweepPointResult& r) {
    json tasks = json::array();
    for (const auto& t : r.tasks) {
        json jt{{"task", t.task},       {"beta", t.beta},
                {"metric", t.seed_metric}, {"lambda", t.seed_lambda},
                {"sigma", t.seed_sigma_hz}, {"aux", t.seed_aux},
                {"failed", t.failed}};
        if (!t.seed_mc.empty()) {
            jt["c1"] = t.seed_c1;
            jt["c2"] = t.seed_c2;
            jt["c3"] = t.seed_c3;
            jt["mc"] = t.seed_mc;
        }
        tasks.push_back(std::move(jt));
    }
    return json{{"tau_fc", r.tau_fc},
                {"power_dbm", r.power_dbm},
                {"detuning_ghz", r.detuning_ghz},
                {"self_pulsing", r.self_pulsing},
                {"pulse_depth", r.pulse_depth},
                {"sigma_hz", r.sigma_hz},
                {"region", std::string(1, r.region)},
                {"wall_ms", r.wall_ms},
                {"tasks", std::move(tasks)}};
}

std::vector<double> doubles_of(const json& j) {
    std::vector<double> v;
    for (const auto& x : j) v.push_back(x.is_null() ? kNan : x.get<double>());
    return v;
}

SweepPointResult from_json(const json& j) {
    SweepPointResult r;
    r.tau_fc = j.at("tau_fc").get<double>();
    r.power_dbm = j.at("power_dbm").get<double>();
    r.detuning_ghz = j.at("detuning_ghz").get<double>();
    r.self_pulsing = j.at("self_pulsing").get<bool>();
    r.pulse_depth = j.at("pulse_depth").get<double>();
    r.sigma_hz = j.at("sigma_hz").is_null() ? kNan : j.at("sigma_hz").get<double>();
    r.region = j.at("region").get<std::string>()[0];
    r.wall_ms = j.at("wall_ms").get<double>();
    for (const auto& jt : j.at("tasks")) {
        TaskOutcome t;
        t.task = jt.at("task").get<std::string>();
        t.beta = jt.at("beta").get<double>();
        t.seed_metric = doubles_of(jt.at("metric"));
        t.seed_lambda = doubles_of(jt.at("lambda"));
        t.seed_sigma_hz = doubles_of(jt.at("sigma"));
        t.seed_aux = doubles_of(jt.at("aux"));
        t.failed = jt.at("failed").get<int>();
        if (jt.contains("mc")) {
            t.seed_c1 = doubles_of(jt.at("c1"));
            t.seed_c2 = doubles_of(jt.at("c2"));
            t.seed_c3 = doubles_of(jt.at("c3"));
            t.seed_mc = doubles_of(jt.at("mc"));
        }
        r.tasks.push_back(std::move(t));
    }
    return r;
}

struct PointKey {
    double tau_fc, power_dbm, detuning_ghz;
    bool operator<(const PointKey& o) const {
        if (tau_fc != o.tau_fc) return tau_fc < o.tau_fc;
        if (power_dbm != o.power_dbm) return power_dbm < o.power_dbm;
        return detuning_ghz < o.detuning_ghz;
    }
};

}  // namespace

SweepTable run_sweep(const SweepConfig& config, const SweepRunOptions& opts) {
    if (config.power_dbm.empty() || config.detuning_ghz.empty() || config.tau_fc.empty())
        throw std::invalid_argument("sweep grid axes must be non-empty");
    if (config.seeds.empty()) throw std::invalid_argument("need at least one seed");
    if (config.tasks.empty()) throw std::invalid_argument("no tasks requested");

    SweepTable table;
    table.config_hash = config.hash();

    // reload finished points
    std::map<PointKey, SweepPointResult> done;
    const fs::path ckpath =
        opts.out_dir.empty() ? fs::path{} : fs::path(opts.out_dir) / "checkpoint.jsonl";
    if (opts.resume) {
        if (opts.out_dir.empty())
            throw std::invalid_argument("resume needs an output directory");
        std::ifstream in(ckpath);
        if (in) {
            std::string line;
            bool first = true;
            while (std::getline(in, line)) {
                if (line.empty()) continue;
                const json j = json::parse(line);
                if (first) {
                    first = false;
                    const auto h = j.at("config_hash").get<std::string>();
                    if (h != fmt(table.config_hash))
                        throw std::runtime_error(
                            "checkpoint belongs to a different configuration (hash " + h + ")");
                    continue;
                }
                SweepPointResult r = from_json(j);
                done[{r.tau_fc, r.power_dbm, r.detuning_ghz}] = std::move(r);
            }
        }
    }

    // canonical job list
    std::vector<PointKey> jobs;
    for (double tau : config.tau_fc)
        for (double p : config.power_dbm)
            for (double d : config.detuning_ghz)
                if (!done.count({tau, p, d})) jobs.push_back({tau, p, d});

    // datasets are read-only across workers; build them up front
    DatasetCache cache;
    for (const auto& kind : dataset_kinds(config.tasks))
        for (const auto seed : config.seeds) cache.items[{kind, seed}] = build_dataset(config, kind, seed);

    std::ofstream ck;
    std::mutex ck_mutex;
    if (!opts.out_dir.empty()) {
        fs::create_directories(opts.out_dir);
        const bool fresh = !opts.resume || !fs::exists(ckpath);
        ck.open(ckpath, fresh ? std::ios::trunc : std::ios::app);
        if (!ck) throw std::runtime_error("cannot write checkpoint: " + ckpath.string());
        if (fresh) {
            ck << json{{"config_hash", fmt(table.config_hash)}, {"version", kVersion}}.dump()
               << "\n";
            ck.flush();
        }
    }

    int budget = opts.max_points.value_or(static_cast<int>(jobs.size()));
    std::atomic<int> remaining{budget};
    std::atomic<std::size_t> next{0};
    std::vector<std::optional<SweepPointResult>> fresh_rows(jobs.size());
    std::exception_ptr fatal;
    std::mutex fatal_mutex;

    int workers = opts.workers > 0 ? opts.workers : config.workers;
    if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
    if (workers <= 0) workers = 1;
    workers = std::min<int>(workers, std::max<int>(1, static_cast<int>(jobs.size())));

    auto work = [&]() {
        for (;;) {
            if (remaining.fetch_sub(1) <= 0) return;
            const std::size_t idx = next.fetch_add(1);
            if (idx >= jobs.size()) return;
            const PointKey& k = jobs[idx];
            try {
                SweepPointResult r =
                    evaluate_point(config, k.tau_fc, k.power_dbm, k.detuning_ghz, cache);
                if (!opts.quiet) {
                    std::ostringstream msg;
                    msg << "point tau_fc=" << k.tau_fc << " P=" << k.power_dbm
                        << "dBm df=" << k.detuning_ghz << "GHz region=" << r.region << "\n";
                    std::cerr << msg.str();
                }
                if (ck.is_open()) {
                    const std::string line = to_json(r).dump();
                    std::lock_guard<std::mutex> lock(ck_mutex);
                    ck << line << "\n";
                    ck.flush();
                }
                fresh_rows[idx] = std::move(r);
            } catch (...) {
                std::lock_guard<std::mutex> lock(fatal_mutex);
                if (!fatal) fatal = std::current_exception();
                return;
            }
        }
    };

    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < workers; ++i) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    if (fatal) std::rethrow_exception(fatal);

    for (auto& [key, row] : done) table.rows.push_back(std::move(row));
    std::size_t computed = 0;
    for (auto& r : fresh_rows)
        if (r) {
            table.rows.push_back(std::move(*r));
            ++computed;
        }

    std::sort(table.rows.begin(), table.rows.end(), [](const auto& a, const auto& b) {
        return PointKey{a.tau_fc, a.power_dbm, a.detuning_ghz} <
               PointKey{b.tau_fc, b.power_dbm, b.detuning_ghz};
    });

    const bool complete = done.size() + computed ==
                          config.tau_fc.size() * config.power_dbm.size() * config.detuning_ghz.size();
    if (complete && !opts.out_dir.empty()) emit_results(table, config, opts.out_dir);
    return table;
}

namespace {

std::string joined(const std::vector<double>& v, char sep) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += sep;
        out += fmt(v[i]);
    }
    return out;
}

std::string tau_label(double tau_fc) { return fmt(tau_fc * 1e12) + "ps"; }

}  // namespace

void emit_results(const SweepTable& table, const SweepConfig& config, const std::string& out_dir) {
    fs::create_directories(out_dir);

    // rows are already canonically sorted by run_sweep; sort a copy anyway so
    // emission is self-contained
    std::vector<const SweepPointResult*> rows;
    for (const auto& r : table.rows) rows.push_back(&r);
    std::sort(rows.begin(), rows.end(), [](const auto* a, const auto* b) {
        return PointKey{a->tau_fc, a->power_dbm, a->detuning_ghz} <
               PointKey{b->tau_fc, b->power_dbm, b->detuning_ghz};
    });

    {
        std::ofstream out(fs::path(out_dir) / "long.csv", std::ios::binary);
        out << "tau_fc_s,power_dbm,detuning_ghz,task,beta,metric_mean,metric_std,seed_metrics,"
               "seed_lambdas,aux_mean,c1,c2,c3,mc,sigma_delta_nl_hz,self_pulsing,pulse_depth,"
               "region,failed_seeds,status\n";
        for (const auto* r : rows) {
            for (const auto& t : r->tasks) {
                const std::size_t n = t.seed_metric.size();
                const std::string status =
                    t.failed == 0 ? "ok"
                                  : (t.failed == static_cast<int>(n) ? "failed" : "partial");
                out << fmt(r->tau_fc) << ',' << fmt(r->power_dbm) << ',' << fmt(r->detuning_ghz)
                    << ',' << t.task << ',' << fmt(t.beta) << ',' << fmt(t.metric_mean()) << ','
                    << fmt(t.metric_std()) << ',' << joined(t.seed_metric, ';') << ','
                    << joined(t.seed_lambda, ';') << ',' << fmt(t.mean_of(t.seed_aux)) << ','
                    << fmt(t.mean_of(t.seed_c1)) << ',' << fmt(t.mean_of(t.seed_c2)) << ','
                    << fmt(t.mean_of(t.seed_c3)) << ',' << fmt(t.mean_of(t.seed_mc)) << ','
                    << fmt(r->sigma_hz) << ',' << (r->self_pulsing ? '1' : '0') << ','
                    << fmt(r->pulse_depth) << ',' << r->region << ',' << fmt(t.failed) << ','
                    << status << '\n';
            }
        }
    }

    // per-(task, tau_fc) matrices: power rows x detuning columns
    for (const auto& task : config.tasks) {
        for (const double tau : config.tau_fc) {
            std::ofstream out(fs::path(out_dir) /
                                  ("matrix_" + task + "_tau" + tau_label(tau) + ".csv"),
                              std::ios::binary);
            out << "power_dbm\\detuning_ghz";
            for (const double d : config.detuning_ghz) out << ',' << fmt(d);
            out << '\n';
            for (const double p : config.power_dbm) {
                out << fmt(p);
                for (const double d : config.detuning_ghz) {
                    double v = kNan;
                    for (const auto* r : rows) {
                        if (r->tau_fc == tau && r->power_dbm == p && r->detuning_ghz == d) {
                            if (const auto* o = r->outcome(task)) v = o->metric_mean();
                            break;
                        }
                    }
                    out << ',' << fmt(v);
                }
                out << '\n';
            }
        }
    }

    {
        IniDoc manifest;
        manifest.set("run", "config_hash", fmt(table.config_hash));
        manifest.set("run", "version", kVersion);
        manifest.set("run", "points", fmt(static_cast<long long>(table.rows.size())));
        std::string seeds;
        for (std::size_t i = 0; i < config.seeds.size(); ++i) {
            if (i) seeds += ",";
            seeds += fmt(config.seeds[i]);
        }
        manifest.set("run", "seeds", seeds);
        std::string tasks;
        for (std::size_t i = 0; i < config.tasks.size(); ++i) {
            if (i) tasks += ",";
            tasks += config.tasks[i];
        }
        manifest.set("run", "tasks", tasks);
        double wall = 0.0;
        for (const auto& r : table.rows) wall += r.wall_ms;
        manifest.set("run", "wall_ms_total", fmt(wall));
        manifest.set("grid", "tau_fc_s", joined(config.tau_fc, ','));
        manifest.set("grid", "power_dbm", joined(config.power_dbm, ','));
        manifest.set("grid", "detuning_ghz", joined(config.detuning_ghz, ','));
        manifest.save((fs::path(out_dir) / "manifest.ini").string());
    }
}

void dump_state_matrices(const SweepConfig& config, const std::string& task,
                         const PointRequest& req, const std::string& prefix) {
    const PhysicalParams params =
        resolved_physics(config, req.tau_fc, ghz_to_rad_s(req.detuning_ghz));
    const std::string kind =
        (task == "narma10" || task == "capacity" || task == "detuning") ? "family" : task;
    const TaskDataset data = build_dataset(config, kind, req.seed);
    const Mask mask = make_mask(config.mask_seed, config.node_count, data.mask_lo, data.mask_hi);
    const ModulationConfig mod =
        make_mod(config, data, config.task(task).beta, dbm_to_watts(req.power_dbm),
                 params.delta_omega);
    const ReservoirStates states = run_reservoir(data.input, data.train_len, data.test_len,
                                                 data.warmup_len, mask, mod, params);

    auto write = [&](const Eigen::MatrixXd& m, const std::string& path) {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + path);
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            for (Eigen::Index c = 0; c < m.cols(); ++c) {
                if (c) out << ',';
                out << fmt(m(r, c));
            }
            out << '\n';
        }
    };
    write(states.train, prefix + "_train.csv");
    write(states.test, prefix + "_test.csv");
}

PointTaskResult run_point_task(const SweepConfig& config, const std::string& task,
                               const PointRequest& req) {
    const PhysicalParams params = resolved_physics(config, req.tau_fc, ghz_to_rad_s(req.detuning_ghz));
    const double watts = dbm_to_watts(req.power_dbm);

    const std::string kind =
        (task == "narma10" || task == "capacity" || task == "detuning") ? "family" : task;
    const TaskDataset data = build_dataset(config, kind, req.seed);

    double beta = config.task(task).beta;
    if (req.optimize_bias) beta = optimize_beta(config, data, params, watts);

    const RunMetrics m = run_once(config, data, params, watts, beta, task == "capacity");
    PointTaskResult out;
    out.beta = beta;
    out.lambda = m.lambda;
    out.sigma_hz = m.sigma_hz;
    out.aux = m.aux;
    out.c1 = m.c1;
    out.c2 = m.c2;
    out.c3 = m.c3;
    out.mc = m.mc;
    if (task == "capacity") out.metric = m.mc;
    else if (task == "detuning") out.metric = m.sigma_hz;
    else out.metric = m.metric;
    return out;
}

}  // namespace ringres
