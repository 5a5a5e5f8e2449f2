#include "ringres/pipeline.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "ringres/rng.hpp"

namespace ringres {

Mask make_mask(std::uint64_t seed, int node_count, double lo, double hi) {
    if (node_count <= 0) throw std::invalid_argument("mask needs at least one node");
    Rng rng(seed);
    Mask m;
    m.values.resize(node_count);
    for (int i = 0; i < node_count; ++i) m.values[i] = rng.uniform(lo, hi);
    return m;
}

int ModulationConfig::steps_per_node(double dt) const {
    const double theta = node_duration();
    const double ratio = theta / dt;
    const long long k = std::llround(ratio);
    if (k < 1 || std::abs(ratio - static_cast<double>(k)) > 1e-6)
        throw std::invalid_argument("node duration is not an integer multiple of dt");
    return static_cast<int>(k);
}

Eigen::VectorXd build_masked_input(const Eigen::VectorXd& u, const Mask& mask, double beta) {
    Eigen::MatrixXd block = u * mask.values.transpose();  // L x N, row per symbol
    block.array() += beta;
    return block.transpose().reshaped();  // column-major of transpose = symbol-major stream
}

double power_scale(const Eigen::VectorXd& x_hat, const ModulationConfig& cfg, Eigen::Index lo,
                   Eigen::Index count) {
    if (!(cfg.average_power_w > 0.0))
        throw std::invalid_argument("average power must be positive");
    if (count <= 0 || lo < 0 || lo + count > x_hat.size())
        throw std::invalid_argument("power_scale: bad normalization segment");
    const auto seg = x_hat.segment(lo, count);
    const double mean = cfg.bipolar ? seg.array().abs().mean() : seg.mean();
    if (!(mean > 0.0))
        throw std::invalid_argument("power normalization needs a non-zero mean drive");
    return cfg.average_power_w / mean;
}

double power_scale(const Eigen::VectorXd& x_hat, const ModulationConfig& cfg) {
    return power_scale(x_hat, cfg, 0, x_hat.size());
}

namespace {

inline double field_amplitude(double sample, double scale, bool bipolar, Eigen::Index idx) {
    if (bipolar) {
        const double a = std::sqrt(scale * std::abs(sample));
        return sample < 0.0 ? -a : a;
    }
    if (sample < 0.0)
        throw std::invalid_argument("negative power sample at node-stream index " +
                                    std::to_string(idx));
    return std::sqrt(scale * sample);
}

}  // namespace

Eigen::VectorXcd modulate(const Eigen::VectorXd& x_hat, const ModulationConfig& cfg, double dt,
                          double scale) {
    const int k = cfg.steps_per_node(dt);
    Eigen::VectorXcd envelope(x_hat.size() * k);
    for (Eigen::Index i = 0; i < x_hat.size(); ++i) {
        const double amp = field_amplitude(x_hat[i], scale, cfg.bipolar, i);
        envelope.segment(i * k, k).setConstant({amp, 0.0});
    }
    return envelope;
}

Eigen::VectorXcd modulate(const Eigen::VectorXd& x_hat, const ModulationConfig& cfg, double dt) {
    return modulate(x_hat, cfg, dt, power_scale(x_hat, cfg));
}

Eigen::VectorXd photodetect(const Eigen::VectorXd& drop_power_waveform, int steps_per_node) {
    if (steps_per_node < 1) throw std::invalid_argument("steps_per_node must be positive");
    if (drop_power_waveform.size() % steps_per_node != 0)
        throw std::invalid_argument("waveform is not aligned to node boundaries");
    const Eigen::Index nodes = drop_power_waveform.size() / steps_per_node;
    const int window = std::max(1, steps_per_node / 4);
    Eigen::VectorXd samples(nodes);
    for (Eigen::Index i = 0; i < nodes; ++i) {
        const Eigen::Index end = (i + 1) * steps_per_node;
        samples[i] = drop_power_waveform.segment(end - window, window).mean();
    }
    return samples;
}

Eigen::MatrixXd assemble_states(const Eigen::VectorXd& node_samples, Eigen::Index rows, int n,
                                Eigen::Index warmup) {
    if (node_samples.size() != (warmup + rows) * n)
        throw std::invalid_argument("node sample count does not match (warmup + rows) * n");
    Eigen::MatrixXd states(rows, n + 1);
    for (Eigen::Index r = 0; r < rows; ++r)
        states.row(r).head(n) = node_samples.segment((warmup + r) * n, n);
    states.col(n).setOnes();
    if (!states.allFinite()) throw std::runtime_error("non-finite reservoir state");
    return states;
}

ReservoirStates run_reservoir(const Eigen::VectorXd& input, Eigen::Index train_len,
                              Eigen::Index test_len, Eigen::Index warmup_len, const Mask& mask,
                              const ModulationConfig& cfg, const PhysicalParams& physics) {
    const Eigen::Index symbols = 2 * warmup_len + train_len + test_len;
    if (input.size() != symbols)
        throw std::invalid_argument("input length does not match 2*warmup + train + test");
    if (mask.node_count() != cfg.node_count)
        throw std::invalid_argument("mask length does not match the node count");

    PhysicalParams p = physics;
    p.delta_omega = cfg.pump_detuning;
    const int k = cfg.steps_per_node(p.dt);
    const int window = std::max(1, k / 4);
    const int n = cfg.node_count;

    const Eigen::VectorXd x_hat = build_masked_input(input, mask, cfg.input_bias);
    // normalization fixed on the train segment only
    const double scale = power_scale(x_hat, cfg, warmup_len * n, train_len * n);

    CavityLoop loop(p);
    Eigen::VectorXd node_power(symbols * n);
    Eigen::VectorXd node_detuning(symbols * n);
    for (Eigen::Index s = 0; s < x_hat.size(); ++s) {
        const std::complex<double> e_in(field_amplitude(x_hat[s], scale, cfg.bipolar, s), 0.0);
        double p_acc = 0.0;
        double d_acc = 0.0;
        for (int j = 0; j < k; ++j) {
            const auto out = loop.step(e_in);
            if (j >= k - window) {
                p_acc += out.drop_power;
                d_acc += out.delta_nl_hz;
            }
        }
        node_power[s] = p_acc / window;
        node_detuning[s] = d_acc / window;
    }

    ReservoirStates rs;
    rs.power_scale = scale;
    rs.train = assemble_states(node_power.head((warmup_len + train_len) * n), train_len, n, warmup_len);
    rs.test = assemble_states(node_power.tail((warmup_len + test_len) * n), test_len, n, warmup_len);

    // detuning trace over the processed (non-warm-up) node samples
    rs.detuning.samples_hz.resize((train_len + test_len) * n);
    rs.detuning.samples_hz.head(train_len * n) = node_detuning.segment(warmup_len * n, train_len * n);
    rs.detuning.samples_hz.tail(test_len * n) =
        node_detuning.segment((2 * warmup_len + train_len) * n, test_len * n);
    rs.detuning.sigma_hz = population_std(rs.detuning.samples_hz);
    return rs;
}

}  // namespace ringres
