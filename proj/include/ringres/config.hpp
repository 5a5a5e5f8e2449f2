#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ringres/capacity.hpp"
#include "ringres/physics.hpp"

namespace ringres {

// Minimal sectioned key/value document. Insertion order is preserved so a
// dump is byte-stable; '#' and ';' start comments.
class IniDoc {
public:
    static IniDoc parse(const std::string& text);
    static IniDoc load(const std::string& path);

    void set(const std::string& section, const std::string& key, const std::string& value);
    const std::string* find(const std::string& section, const std::string& key) const;

    std::string get(const std::string& section, const std::string& key,
                    const std::string& fallback) const;
    double get_double(const std::string& section, const std::string& key, double fallback) const;
    long long get_int(const std::string& section, const std::string& key, long long fallback) const;
    bool get_bool(const std::string& section, const std::string& key, bool fallback) const;

    std::string dump() const;
    void save(const std::string& path) const;

private:
    struct Section {
        std::string name;
        std::vector<std::pair<std::string, std::string>> entries;
    };
    std::vector<Section> sections_;
    Section& section(const std::string& name);
};

// Numeric list syntax: either comma-separated values or "start:step:stop"
// (inclusive stop, within half a step).
std::vector<double> parse_number_list(const std::string& text);

struct TaskConfig {
    long long train_len = 2000;
    long long test_len = 2000;
    long long warmup_len = 200;
    double beta = 0.3;
    int test_subsets = 1;     // equalize only
    double snr_db = 32.0;     // equalize only
    int horizon = 1;          // radar only
    std::string data_path;    // radar only; empty selects the surrogate
    bool surrogate = true;    // radar only
};

// Everything a sweep needs: cavity constants, modulation layout, grid axes,
// task set and per-task options.
struct SweepConfig {
    PhysicalParams physics;
    double symbol_rate = 1.0e9;
    int node_count = 50;
    std::uint64_t mask_seed = 42;

    std::vector<double> power_dbm;
    std::vector<double> detuning_ghz;
    std::vector<double> tau_fc;
    std::vector<std::uint64_t> seeds;
    std::vector<std::string> tasks;
    int workers = 0;  // 0 = hardware concurrency

    double region_sigma_a_hz = 1e7;
    double pulse_depth_threshold = 0.05;
    bool optimize_bias = false;

    TaskConfig narma10;
    TaskConfig classify;
    TaskConfig equalize;
    TaskConfig radar;
    CapacityOptions capacity;

    static SweepConfig defaults();
    static SweepConfig from_ini(const IniDoc& doc);
    IniDoc to_ini() const;

    std::string canonical_text() const;
    std::uint64_t hash() const;

    const TaskConfig& task(const std::string& name) const;
};

double dbm_to_watts(double dbm);
double ghz_to_rad_s(double ghz);

// Cavity parameters for one grid point. The step size follows the carrier
// lifetime (dt = min(configured dt, tau_fc/10) once tau_fc is resolvable)
// and is quantized so a node duration is a whole number of steps.
PhysicalParams resolved_physics(const SweepConfig& cfg, double tau_fc_s, double delta_omega_rad_s);

}  // namespace ringres
