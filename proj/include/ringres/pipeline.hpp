#pragma once

#include <Eigen/Core>
#include <cstdint>

#include "ringres/cavity.hpp"
#include "ringres/physics.hpp"

namespace ringres {

// Fixed random input weights, one per virtual node.
struct Mask {
    Eigen::VectorXd values;
    int node_count() const { return static_cast<int>(values.size()); }
};

// Uniform mask over [lo, hi], reproducible from the seed.
Mask make_mask(std::uint64_t seed, int node_count, double lo, double hi);

// Time-multiplexing and modulation settings for one reservoir run.
struct ModulationConfig {
    double symbol_rate = 1.0e9;    // Bd
    int node_count = 50;
    double input_bias = 0.3;       // beta, added after masking
    double average_power_w = 1e-3; // time-averaged optical power
    double pump_detuning = 0.0;    // rad/s, forwarded into the cavity model
    bool bipolar = false;          // signed-field modulation for signed streams

    double symbol_period() const { return 1.0 / symbol_rate; }
    double node_duration() const { return symbol_period() / node_count; }
    // Integration steps per virtual node; throws if theta is off the dt grid.
    int steps_per_node(double dt) const;
};

// Masked and biased sample stream at node rate: sample (n, j) = u(n)*mask[j] + beta,
// all N nodes of symbol n before symbol n+1.
Eigen::VectorXd build_masked_input(const Eigen::VectorXd& u, const Mask& mask, double beta);

// Power normalization factor so that the time-average of scale*x equals the
// requested average power. Bipolar streams normalize on |x|.
double power_scale(const Eigen::VectorXd& x_hat, const ModulationConfig& cfg);
double power_scale(const Eigen::VectorXd& x_hat, const ModulationConfig& cfg, Eigen::Index lo,
                   Eigen::Index count);

// Field envelope on the dt grid, piecewise constant over each node duration.
// Unipolar mode rejects negative samples (the envelope is sqrt of a power);
// bipolar mode maps sample x to sign(x)*sqrt(scale*|x|).
Eigen::VectorXcd modulate(const Eigen::VectorXd& x_hat, const ModulationConfig& cfg, double dt);
Eigen::VectorXcd modulate(const Eigen::VectorXd& x_hat, const ModulationConfig& cfg, double dt,
                          double scale);

// One sample per virtual node: the drop power averaged over the final
// quarter of each node window. The waveform length must be a whole number
// of windows.
Eigen::VectorXd photodetect(const Eigen::VectorXd& drop_power_waveform, int steps_per_node);

// Drops warmup*n leading samples, reshapes to rows of n node responses and
// appends the constant bias column.
Eigen::MatrixXd assemble_states(const Eigen::VectorXd& node_samples, Eigen::Index rows, int n,
                                Eigen::Index warmup);

struct ReservoirStates {
    Eigen::MatrixXd train;          // train_len x (N+1)
    Eigen::MatrixXd test;           // test_len x (N+1)
    DetuningTrace detuning;         // node-sampled, warm-ups excluded
    double power_scale = 0.0;
};

// End-to-end reservoir transform of a symbol sequence laid out as
// [warmup | train | warmup | test]. The power scale is fixed on the train
// segment and reused everywhere else.
ReservoirStates run_reservoir(const Eigen::VectorXd& input, Eigen::Index train_len,
                              Eigen::Index test_len, Eigen::Index warmup_len, const Mask& mask,
                              const ModulationConfig& cfg, const PhysicalParams& physics);

}  // namespace ringres
