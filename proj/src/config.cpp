#include "ringres/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "ringres/format.hpp"

namespace ringres {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream ss(s);
    while (std::getline(ss, item, sep)) out.push_back(trim(item));
    return out;
}

double to_double(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("cannot parse number '" + s + "' for " + what);
    }
}

}  // namespace

IniDoc::Section& IniDoc::section(const std::string& name) {
    for (auto& s : sections_)
        if (s.name == name) return s;
    sections_.push_back({name, {}});
    return sections_.back();
}

IniDoc IniDoc::parse(const std::string& text) {
    IniDoc doc;
    std::istringstream in(text);
    std::string line;
    std::string current = "";
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto comment = line.find_first_of("#;");
        if (comment != std::string::npos) line.erase(comment);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::invalid_argument("config line " + std::to_string(lineno) +
                                            ": unterminated section header");
            current = trim(line.substr(1, line.size() - 2));
            doc.section(current);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key = value");
        doc.set(current, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return doc;
}

IniDoc IniDoc::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

void IniDoc::set(const std::string& sec, const std::string& key, const std::string& value) {
    auto& s = section(sec);
    for (auto& kv : s.entries) {
        if (kv.first == key) {
            kv.second = value;
            return;
        }
    }
    s.entries.emplace_back(key, value);
}

const std::string* IniDoc::find(const std::string& sec, const std::string& key) const {
    for (const auto& s : sections_) {
        if (s.name != sec) continue;
        for (const auto& kv : s.entries)
            if (kv.first == key) return &kv.second;
    }
    return nullptr;
}

std::string IniDoc::get(const std::string& sec, const std::string& key,
                        const std::string& fallback) const {
    const std::string* v = find(sec, key);
    return v ? *v : fallback;
}

double IniDoc::get_double(const std::string& sec, const std::string& key, double fallback) const {
    const std::string* v = find(sec, key);
    return v ? to_double(*v, sec + "." + key) : fallback;
}

long long IniDoc::get_int(const std::string& sec, const std::string& key, long long fallback) const {
    const std::string* v = find(sec, key);
    if (!v) return fallback;
    try {
        std::size_t pos = 0;
        const long long r = std::stoll(*v, &pos);
        if (pos != v->size()) throw std::invalid_argument(*v);
        return r;
    } catch (const std::exception&) {
        throw std::invalid_argument("cannot parse integer '" + *v + "' for " + sec + "." + key);
    }
}

bool IniDoc::get_bool(const std::string& sec, const std::string& key, bool fallback) const {
    const std::string* v = find(sec, key);
    if (!v) return fallback;
    if (*v == "true" || *v == "1" || *v == "yes") return true;
    if (*v == "false" || *v == "0" || *v == "no") return false;
    throw std::invalid_argument("cannot parse boolean '" + *v + "' for " + sec + "." + key);
}

std::string IniDoc::dump() const {
    std::string out;
    for (const auto& s : sections_) {
        if (!s.name.empty()) out += "[" + s.name + "]\n";
        for (const auto& kv : s.entries) out += kv.first + " = " + kv.second + "\n";
        out += "\n";
    }
    return out;
}

void IniDoc::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << dump();
}

std::vector<double> parse_number_list(const std::string& text) {
    const std::string t = trim(text);
    if (t.empty()) return {};
    if (t.find(':') != std::string::npos) {
        const auto parts = split(t, ':');
        if (parts.size() != 3) throw std::invalid_argument("range syntax is start:step:stop");
        const double start = to_double(parts[0], "range start");
        const double step = to_double(parts[1], "range step");
        const double stop = to_double(parts[2], "range stop");
        if (step <= 0.0) throw std::invalid_argument("range step must be positive");
        std::vector<double> out;
        for (double v = start; v <= stop + 0.5 * step; v += step) out.push_back(v);
        return out;
    }
    std::vector<double> out;
    for (const auto& item : split(t, ','))
        if (!item.empty()) out.push_back(to_double(item, "list entry"));
    return out;
}

double dbm_to_watts(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }
double ghz_to_rad_s(double ghz) { return kTwoPi * ghz * 1e9; }

SweepConfig SweepConfig::defaults() {
    SweepConfig c;
    c.power_dbm = parse_number_list("-20:1:20");
    c.detuning_ghz = parse_number_list("-300:10:300");
    c.tau_fc = {10e-12, 10e-9, 25e-9};
    c.seeds = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    c.tasks = {"narma10", "capacity", "detuning"};
    c.narma10 = TaskConfig{2000, 2000, 200, 0.9, 1, 32.0, 1, "", true};
    c.classify = TaskConfig{2000, 1000, 200, 0.1, 1, 32.0, 1, "", true};
    c.equalize = TaskConfig{10000, 100000, 200, 0.2, 10, 32.0, 1, "", true};
    c.radar = TaskConfig{1000, 1000, 200, 0.3, 1, 32.0, 1, "", true};
    return c;
}

namespace {

std::string join_numbers(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += fmt(v[i]);
    }
    return out;
}

std::string join_seeds(const std::vector<std::uint64_t>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += fmt(v[i]);
    }
    return out;
}

std::string join_names(const std::vector<std::string>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += v[i];
    }
    return out;
}

void task_to_ini(IniDoc& doc, const std::string& sec, const TaskConfig& t, bool equalize,
                 bool radar) {
    doc.set(sec, "train_len", fmt(t.train_len));
    doc.set(sec, "test_len", fmt(t.test_len));
    doc.set(sec, "warmup_len", fmt(t.warmup_len));
    doc.set(sec, "beta", fmt(t.beta));
    if (equalize) {
        doc.set(sec, "test_subsets", fmt(t.test_subsets));
        doc.set(sec, "snr_db", fmt(t.snr_db));
    }
    if (radar) {
        doc.set(sec, "k", fmt(t.horizon));
        doc.set(sec, "data", t.data_path);
        doc.set(sec, "surrogate", t.surrogate ? "true" : "false");
    }
}

TaskConfig task_from_ini(const IniDoc& doc, const std::string& sec, const TaskConfig& defaults) {
    TaskConfig t = defaults;
    t.train_len = doc.get_int(sec, "train_len", defaults.train_len);
    t.test_len = doc.get_int(sec, "test_len", defaults.test_len);
    t.warmup_len = doc.get_int(sec, "warmup_len", defaults.warmup_len);
    t.beta = doc.get_double(sec, "beta", defaults.beta);
    t.test_subsets = static_cast<int>(doc.get_int(sec, "test_subsets", defaults.test_subsets));
    t.snr_db = doc.get_double(sec, "snr_db", defaults.snr_db);
    t.horizon = static_cast<int>(doc.get_int(sec, "k", defaults.horizon));
    t.data_path = doc.get(sec, "data", defaults.data_path);
    t.surrogate = doc.get_bool(sec, "surrogate", defaults.surrogate);
    return t;
}

}  // namespace

IniDoc SweepConfig::to_ini() const {
    IniDoc doc;
    doc.set("physics", "resonance_frequency_rad_s", fmt(physics.omega0));
    doc.set("physics", "intrinsic_decay_s1", fmt(physics.gamma_i));
    doc.set("physics", "coupling_decay_per_coupler_s1", fmt(physics.gamma_c));
    doc.set("physics", "mu1_sqrt_s1", fmt(physics.mu1));
    doc.set("physics", "mu2_sqrt_s1", fmt(physics.mu2));
    doc.set("physics", "tpa_carrier_gain", fmt(physics.g_tpa));
    doc.set("physics", "tpa_loss_per_joule_s1", fmt(physics.tpa_loss));
    doc.set("physics", "fca_cross_section_m2", fmt(physics.sigma_fca));
    doc.set("physics", "fcd_index_coefficient_m3", fmt(physics.dn_dN));
    doc.set("physics", "thermo_optic_coefficient_k1", fmt(physics.dn_dT));
    doc.set("physics", "silicon_index", fmt(physics.n_si));
    doc.set("physics", "thermal_heating_efficiency_k_j1", fmt(physics.eta_th));
    doc.set("physics", "thermal_time_s", fmt(physics.tau_th));
    doc.set("physics", "feedback_delay_s", fmt(physics.tau_d));
    doc.set("physics", "feedback_phase_rad", fmt(physics.phi_fb));
    doc.set("physics", "feedback_amplitude_transmission", fmt(physics.r_fb));
    doc.set("physics", "integration_step_s", fmt(physics.dt));

    doc.set("modulation", "symbol_rate_bd", fmt(symbol_rate));
    doc.set("modulation", "node_count", fmt(node_count));
    doc.set("modulation", "mask_seed", fmt(mask_seed));

    doc.set("sweep", "power_dbm", join_numbers(power_dbm));
    doc.set("sweep", "detuning_ghz", join_numbers(detuning_ghz));
    doc.set("sweep", "tau_fc_s", join_numbers(tau_fc));
    doc.set("sweep", "seeds", join_seeds(seeds));
    doc.set("sweep", "tasks", join_names(tasks));
    doc.set("sweep", "workers", fmt(workers));
    doc.set("sweep", "region_sigma_a_hz", fmt(region_sigma_a_hz));
    doc.set("sweep", "pulse_depth_threshold", fmt(pulse_depth_threshold));
    doc.set("sweep", "optimize_bias", optimize_bias ? "true" : "false");

    task_to_ini(doc, "task.narma10", narma10, false, false);
    task_to_ini(doc, "task.classify", classify, false, false);
    task_to_ini(doc, "task.equalize", equalize, true, false);
    task_to_ini(doc, "task.radar", radar, false, true);

    doc.set("capacity", "max_order", fmt(capacity.max_order));
    doc.set("capacity", "k_max", fmt(capacity.k_max));
    doc.set("capacity", "rescale_input", capacity.rescale_input ? "true" : "false");
    doc.set("capacity", "noise_threshold", fmt(capacity.noise_threshold));
    return doc;
}

SweepConfig SweepConfig::from_ini(const IniDoc& doc) {
    SweepConfig c = defaults();
    c.physics.omega0 = doc.get_double("physics", "resonance_frequency_rad_s", c.physics.omega0);
    c.physics.gamma_i = doc.get_double("physics", "intrinsic_decay_s1", c.physics.gamma_i);
    c.physics.gamma_c =
        doc.get_double("physics", "coupling_decay_per_coupler_s1", c.physics.gamma_c);
    c.physics.mu1 = doc.get_double("physics", "mu1_sqrt_s1", c.physics.mu1);
    c.physics.mu2 = doc.get_double("physics", "mu2_sqrt_s1", c.physics.mu2);
    c.physics.g_tpa = doc.get_double("physics", "tpa_carrier_gain", c.physics.g_tpa);
    c.physics.tpa_loss = doc.get_double("physics", "tpa_loss_per_joule_s1", c.physics.tpa_loss);
    c.physics.sigma_fca = doc.get_double("physics", "fca_cross_section_m2", c.physics.sigma_fca);
    c.physics.dn_dN = doc.get_double("physics", "fcd_index_coefficient_m3", c.physics.dn_dN);
    c.physics.dn_dT = doc.get_double("physics", "thermo_optic_coefficient_k1", c.physics.dn_dT);
    c.physics.n_si = doc.get_double("physics", "silicon_index", c.physics.n_si);
    c.physics.eta_th =
        doc.get_double("physics", "thermal_heating_efficiency_k_j1", c.physics.eta_th);
    c.physics.tau_th = doc.get_double("physics", "thermal_time_s", c.physics.tau_th);
    c.physics.tau_d = doc.get_double("physics", "feedback_delay_s", c.physics.tau_d);
    c.physics.phi_fb = doc.get_double("physics", "feedback_phase_rad", c.physics.phi_fb);
    c.physics.r_fb =
        doc.get_double("physics", "feedback_amplitude_transmission", c.physics.r_fb);
    c.physics.dt = doc.get_double("physics", "integration_step_s", c.physics.dt);

    c.symbol_rate = doc.get_double("modulation", "symbol_rate_bd", c.symbol_rate);
    c.node_count = static_cast<int>(doc.get_int("modulation", "node_count", c.node_count));
    c.mask_seed = static_cast<std::uint64_t>(doc.get_int("modulation", "mask_seed",
                                                         static_cast<long long>(c.mask_seed)));

    if (const auto* v = doc.find("sweep", "power_dbm")) c.power_dbm = parse_number_list(*v);
    if (const auto* v = doc.find("sweep", "detuning_ghz")) c.detuning_ghz = parse_number_list(*v);
    if (const auto* v = doc.find("sweep", "tau_fc_s")) c.tau_fc = parse_number_list(*v);
    if (const auto* v = doc.find("sweep", "seeds")) {
        c.seeds.clear();
        for (double d : parse_number_list(*v)) c.seeds.push_back(static_cast<std::uint64_t>(d));
    }
    if (const auto* v = doc.find("sweep", "tasks")) {
        c.tasks.clear();
        for (const auto& name : split(*v, ','))
            if (!name.empty()) c.tasks.push_back(name);
    }
    c.workers = static_cast<int>(doc.get_int("sweep", "workers", c.workers));
    c.region_sigma_a_hz = doc.get_double("sweep", "region_sigma_a_hz", c.region_sigma_a_hz);
    c.pulse_depth_threshold =
        doc.get_double("sweep", "pulse_depth_threshold", c.pulse_depth_threshold);
    c.optimize_bias = doc.get_bool("sweep", "optimize_bias", c.optimize_bias);

    c.narma10 = task_from_ini(doc, "task.narma10", c.narma10);
    c.classify = task_from_ini(doc, "task.classify", c.classify);
    c.equalize = task_from_ini(doc, "task.equalize", c.equalize);
    c.radar = task_from_ini(doc, "task.radar", c.radar);

    c.capacity.max_order = static_cast<int>(doc.get_int("capacity", "max_order", c.capacity.max_order));
    c.capacity.k_max = static_cast<int>(doc.get_int("capacity", "k_max", c.capacity.k_max));
    c.capacity.rescale_input = doc.get_bool("capacity", "rescale_input", c.capacity.rescale_input);
    c.capacity.noise_threshold =
        doc.get_double("capacity", "noise_threshold", c.capacity.noise_threshold);
    return c;
}

std::string SweepConfig::canonical_text() const { return to_ini().dump(); }

std::uint64_t SweepConfig::hash() const { return fnv1a64(canonical_text()); }

const TaskConfig& SweepConfig::task(const std::string& name) const {
    if (name == "narma10" || name == "capacity" || name == "detuning") return narma10;
    if (name == "classify") return classify;
    if (name == "equalize") return equalize;
    if (name == "radar") return radar;
    throw std::invalid_argument("unknown task: " + name);
}

PhysicalParams resolved_physics(const SweepConfig& cfg, double tau_fc_s, double delta_omega_rad_s) {
    PhysicalParams p = cfg.physics;
    p.tau_fc = tau_fc_s;
    p.delta_omega = delta_omega_rad_s;

    const double theta = 1.0 / (cfg.symbol_rate * cfg.node_count);
    double dt_max = p.dt;
    dt_max = std::min(dt_max, tau_fc_s / 10.0);
    dt_max = std::min(dt_max, p.photon_lifetime() / 10.0);
    const long long k = static_cast<long long>(std::ceil(theta / dt_max - 1e-9));
    p.dt = theta / static_cast<double>(k);
    p.validate();
    return p;
}

}  // namespace ringres
