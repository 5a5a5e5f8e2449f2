#include "ringres/tasks.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "ringres/physics.hpp"
#include "ringres/rng.hpp"

namespace ringres {

namespace {

// Independent uniform segments for warm-up/train/warm-up/test so that
// changing one block's length never changes the values of another.
Eigen::VectorXd segmented_uniform(const SplitSpec& split, std::uint64_t seed, double lo, double hi) {
    const Eigen::Index lens[4] = {split.warmup_len, split.train_len, split.warmup_len,
                                  split.test_len};
    Eigen::VectorXd u(2 * split.warmup_len + split.train_len + split.test_len);
    Eigen::Index at = 0;
    for (int blk = 0; blk < 4; ++blk) {
        Rng rng(sub_seed(seed, static_cast<std::uint64_t>(blk)));
        for (Eigen::Index i = 0; i < lens[blk]; ++i) u[at++] = rng.uniform(lo, hi);
    }
    return u;
}

void check_split(const SplitSpec& split) {
    if (split.train_len < 1 || split.test_len < 1 || split.warmup_len < 0)
        throw std::invalid_argument("invalid split lengths");
}

}  // namespace

std::string metric_name(MetricKind m) {
    switch (m) {
        case MetricKind::nmse: return "nmse";
        case MetricKind::accuracy: return "accuracy";
        case MetricKind::ser: return "ser";
    }
    return "?";
}

Eigen::VectorXd narma10_recurrence(const Eigen::VectorXd& u, bool* diverged) {
    const Eigen::Index len = u.size();
    Eigen::VectorXd y = Eigen::VectorXd::Zero(len + 1);  // y[n+1] needed for the last target
    if (diverged) *diverged = false;
    for (Eigen::Index n = 0; n < len; ++n) {
        double window = 0.0;  // sum of y(n-i), i = 0..9, zero history
        for (Eigen::Index i = n >= 9 ? n - 9 : 0; i <= n; ++i) window += y[i];
        const double u_old = n >= 9 ? u[n - 9] : 0.0;
        y[n + 1] = 0.3 * y[n] + 0.05 * y[n] * window + 1.5 * u_old * u[n] + 0.1;
        if (std::abs(y[n + 1]) > 10.0) {
            if (diverged) *diverged = true;
            break;
        }
    }
    return y;
}

TaskDataset gen_narma10(const SplitSpec& split, std::uint64_t seed) {
    check_split(split);
    for (std::uint64_t attempt_seed = seed;; ++attempt_seed) {
        const Eigen::VectorXd u = segmented_uniform(split, attempt_seed, 0.0, 0.5);
        const Eigen::Index len = u.size();
        bool diverged = false;
        const Eigen::VectorXd y = narma10_recurrence(u, &diverged);
        if (diverged) continue;

        TaskDataset d;
        d.input = u;
        d.target = y.tail(len);  // target(n) = y(n+1)
        d.warmup_len = split.warmup_len;
        d.train_len = split.train_len;
        d.test_len = split.test_len;
        d.mask_lo = 0.0;
        d.mask_hi = 1.0;
        d.metric = MetricKind::nmse;
        d.bipolar_modulation = false;
        d.seed = attempt_seed;
        d.requested_seed = seed;
        return d;
    }
}

TaskDataset gen_waveform_classification(const SplitSpec& split, std::uint64_t seed) {
    check_split(split);
    constexpr int kPeriod = 12;
    const Eigen::Index total = 2 * split.warmup_len + split.train_len + split.test_len;
    const Eigen::Index periods = (total + kPeriod - 1) / kPeriod;

    Rng rng(sub_seed(seed, 0));
    TaskDataset d;
    d.input.resize(total);
    d.target.resize(total);
    d.group.resize(total);
    for (Eigen::Index p = 0; p < periods; ++p) {
        const bool square = rng.uniform01() < 0.5;
        for (int j = 0; j < kPeriod; ++j) {
            const Eigen::Index n = p * kPeriod + j;
            if (n >= total) break;
            d.input[n] = square ? (j < kPeriod / 2 ? 1.0 : -1.0)
                                : std::sin(kTwoPi * static_cast<double>(j) / kPeriod);
            d.target[n] = square ? 1.0 : 0.0;
            d.group[n] = static_cast<int>(p);
        }
    }
    d.warmup_len = split.warmup_len;
    d.train_len = split.train_len;
    d.test_len = split.test_len;
    d.mask_lo = 0.0;
    d.mask_hi = 1.0;
    d.metric = MetricKind::accuracy;
    d.bipolar_modulation = true;  // sine/square samples are signed
    d.seed = d.requested_seed = seed;
    return d;
}

Eigen::VectorXd ChannelModel::fir(const Eigen::VectorXd& d) {
    const Eigen::Index len = d.size();
    Eigen::VectorXd q(len);
    for (Eigen::Index n = 0; n < len; ++n) {
        double acc = 0.0;
        for (int t = 0; t < 10; ++t) {
            const Eigen::Index idx = n + 2 - t;  // taps run from d(n+2) down to d(n-7)
            if (idx >= 0 && idx < len) acc += kTaps[t] * d[idx];
        }
        q[n] = acc;
    }
    return q;
}

TaskDataset gen_channel_equalization(const SplitSpec& split, std::uint64_t seed, double snr_db,
                                     int test_subsets) {
    check_split(split);
    if (test_subsets < 1 || split.test_len % test_subsets != 0)
        throw std::invalid_argument("test length must divide evenly into subsets");

    const Eigen::Index lens[4] = {split.warmup_len, split.train_len, split.warmup_len,
                                  split.test_len};
    const Eigen::Index total = 2 * split.warmup_len + split.train_len + split.test_len;
    Eigen::VectorXd symbols(total);
    Eigen::Index at = 0;
    for (int blk = 0; blk < 4; ++blk) {
        Rng rng(sub_seed(seed, static_cast<std::uint64_t>(blk)));
        for (Eigen::Index i = 0; i < lens[blk]; ++i) {
            static constexpr double kAlphabet[4] = {-3.0, -1.0, 1.0, 3.0};
            symbols[at++] = kAlphabet[rng.raw() & 3u];
        }
    }

    const Eigen::VectorXd q = ChannelModel::fir(symbols);
    const double var_q = (q.array() - q.mean()).square().sum() / static_cast<double>(q.size());
    const double noise_sd = std::sqrt(var_q / std::pow(10.0, snr_db / 10.0));

    Rng noise_rng(sub_seed(seed, 4));
    TaskDataset d;
    d.input.resize(total);
    for (Eigen::Index n = 0; n < total; ++n) {
        const double v = noise_sd * noise_rng.gaussian();
        d.input[n] = q[n] + ChannelModel::kQuadratic * q[n] * q[n] +
                     ChannelModel::kCubic * q[n] * q[n] * q[n] + v + 5.0;
    }
    d.target = symbols;
    d.warmup_len = split.warmup_len;
    d.train_len = split.train_len;
    d.test_len = split.test_len;
    d.test_subsets = test_subsets;
    d.input_preshift = 5.0;
    d.mask_lo = -1.0;
    d.mask_hi = 1.0;
    d.metric = MetricKind::ser;
    d.bipolar_modulation = true;  // bipolar mask flips the field sign
    d.seed = d.requested_seed = seed;
    return d;
}

TaskDataset make_radar_dataset(const Eigen::VectorXd& in_phase, const Eigen::VectorXd& quadrature,
                               int k, const SplitSpec& split) {
    check_split(split);
    if (k < 1) throw std::invalid_argument("prediction horizon k must be >= 1");
    if (in_phase.size() != quadrature.size())
        throw std::invalid_argument("I and Q lengths differ");

    Eigen::VectorXd flat(2 * in_phase.size());
    for (Eigen::Index i = 0; i < in_phase.size(); ++i) {
        flat[2 * i] = in_phase[i];
        flat[2 * i + 1] = quadrature[i];
    }

    const Eigen::Index total = 2 * split.warmup_len + split.train_len + split.test_len;
    if (flat.size() < total + k)
        throw std::runtime_error("radar record too short: need " + std::to_string(total + k) +
                                 " flattened samples, have " + std::to_string(flat.size()));

    TaskDataset d;
    d.input = flat.head(total);
    d.target = flat.segment(k, total);
    d.warmup_len = split.warmup_len;
    d.train_len = split.train_len;
    d.test_len = split.test_len;
    d.mask_lo = 0.0;
    d.mask_hi = 1.0;
    d.metric = MetricKind::nmse;
    d.bipolar_modulation = true;  // measured I/Q samples are signed
    return d;
}

TaskDataset load_radar(const std::string& path, int k, const SplitSpec& split) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open radar file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("radar file is empty: " + path);
    // header: "i,q" (whitespace tolerated)
    {
        std::string squeezed;
        for (char c : line)
            if (!std::isspace(static_cast<unsigned char>(c))) squeezed += c;
        if (squeezed != "i,q")
            throw std::runtime_error("radar file " + path + ": expected header 'i,q', got '" +
                                     line + "'");
    }

    std::vector<double> is, qs;
    Eigen::Index row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string a, b;
        if (!std::getline(ss, a, ',') || !std::getline(ss, b))
            throw std::runtime_error("radar file " + path + ": malformed row " +
                                     std::to_string(row));
        try {
            std::size_t pa = 0, pb = 0;
            const double iv = std::stod(a, &pa);
            const double qv = std::stod(b, &pb);
            is.push_back(iv);
            qs.push_back(qv);
        } catch (const std::exception&) {
            throw std::runtime_error("radar file " + path + ": non-numeric value in row " +
                                     std::to_string(row));
        }
    }
    const Eigen::VectorXd iv = Eigen::Map<const Eigen::VectorXd>(is.data(), is.size());
    const Eigen::VectorXd qv = Eigen::Map<const Eigen::VectorXd>(qs.data(), qs.size());
    return make_radar_dataset(iv, qv, k, split);
}

void surrogate_radar_iq(Eigen::Index length, std::uint64_t seed, Eigen::VectorXd& in_phase,
                        Eigen::VectorXd& quadrature) {
    if (length < 1) throw std::invalid_argument("surrogate length must be >= 1");
    Rng rng(sub_seed(seed, 0));
    in_phase.resize(length);
    quadrature.resize(length);

    // Two mean-reverting processes: log-amplitude texture and phase wander.
    const double tau_amp = 40.0, tau_phase = 60.0;
    const double k_amp = 1.0 - 1.0 / tau_amp, k_phase = 1.0 - 1.0 / tau_phase;
    const double s_amp = std::sqrt(2.0 / tau_amp), s_phase = std::sqrt(2.0 / tau_phase);
    double x_amp = 0.0, x_phase = 0.0;
    for (Eigen::Index n = 0; n < length; ++n) {
        x_amp = k_amp * x_amp + s_amp * rng.gaussian();
        x_phase = k_phase * x_phase + s_phase * rng.gaussian();
        const double amplitude = std::exp(0.4 * x_amp);
        const double phase = kTwoPi / 8.0 + 0.15 * x_phase;  // around pi/4
        in_phase[n] = amplitude * std::cos(phase) + 0.02 * rng.gaussian();
        quadrature[n] = amplitude * std::sin(phase) + 0.02 * rng.gaussian();
    }
}

TaskDataset gen_surrogate_radar(Eigen::Index length, std::uint64_t seed, int k,
                                const SplitSpec& split) {
    Eigen::VectorXd iv, qv;
    surrogate_radar_iq(length, seed, iv, qv);
    TaskDataset d = make_radar_dataset(iv, qv, k, split);
    d.seed = d.requested_seed = seed;
    return d;
}

}  // namespace ringres
