#pragma once

#include <Eigen/Core>
#include <complex>
#include <vector>

#include "ringres/physics.hpp"

namespace ringres {

// Nonlinear-detuning trace on the node-sampling grid plus its spread.
struct DetuningTrace {
    Eigen::VectorXd samples_hz;
    double sigma_hz = 0.0;
};

// Population standard deviation; exactly zero for a constant trace.
double population_std(const Eigen::VectorXd& samples);

inline double sigma_delta_nl(const DetuningTrace& trace) { return population_std(trace.samples_hz); }

// Incremental driver of the ring closed through the delayed through->add
// feedback path. Each step() consumes one input-envelope sample (held
// constant over the step) and reports the drop power and nonlinear detuning
// at the start of the step. The delay buffer starts out empty (zeros).
class CavityLoop {
public:
    struct StepOutput {
        double drop_power;     // |E_drop|^2 (W)
        double delta_nl_hz;    // resonance shift (Hz)
    };

    explicit CavityLoop(const PhysicalParams& params);

    StepOutput step(std::complex<double> e_in);

    const CavityState& state() const { return state_; }
    const PhysicalParams& params() const { return params_; }
    double time() const { return static_cast<double>(step_index_) * params_.dt; }

private:
    PhysicalParams params_;
    CavityState state_;
    std::complex<double> feedback_gain_;
    std::vector<std::complex<double>> delay_;  // ring buffer of E_through
    std::size_t head_ = 0;
    long long step_index_ = 0;
};

struct FeedbackRun {
    Eigen::VectorXd drop_power;    // per integration step (W)
    Eigen::VectorXd delta_nl_hz;   // per integration step (Hz)
};

// Closed-loop run over a full input envelope sampled on the dt grid.
// Integration failures carry the simulation time at which they occurred.
FeedbackRun run_with_feedback(const Eigen::VectorXcd& input_envelope, const PhysicalParams& params);

struct SelfPulsingOptions {
    double depth_threshold = 0.05;      // (max-min)/mean of drop power
    double settle_factor = 20.0;        // settling window, units of tau_th
    double ramp_time = 200e-9;          // smooth turn-on (s)
};

struct SelfPulsingResult {
    bool is_pulsing = false;
    double oscillation_depth = 0.0;
};

// Drives the closed loop with constant power p_in_watts at detuning
// delta_omega, waits out a settling window, then measures the relative
// oscillation depth of the drop power over an observation window. The
// turn-on is ramped with a C^2 profile so that the marginally damped loop
// modes far from resonance are not excited by the switch-on transient.
SelfPulsingResult detect_self_pulsing(const PhysicalParams& params, double p_in_watts,
                                      double delta_omega, const SelfPulsingOptions& opts = {});

}  // namespace ringres
