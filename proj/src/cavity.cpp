#include "ringres/cavity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ringres {

double population_std(const Eigen::VectorXd& samples) {
    const Eigen::Index n = samples.size();
    if (n == 0) return 0.0;
    if (samples.maxCoeff() == samples.minCoeff()) return 0.0;
    const double mean = samples.mean();
    const double var = (samples.array() - mean).square().sum() / static_cast<double>(n);
    return std::sqrt(var);
}

CavityLoop::CavityLoop(const PhysicalParams& params) : params_(params) {
    params_.validate();
    const long long d = params_.delay_steps();
    delay_.assign(static_cast<std::size_t>(std::max(1ll, d)), {0.0, 0.0});
    feedback_gain_ =
        params_.r_fb * std::complex<double>(std::cos(params_.phi_fb), std::sin(params_.phi_fb));
}

CavityLoop::StepOutput CavityLoop::step(std::complex<double> e_in) {
    // Oldest buffer entry is E_through from tau_d ago; zero until filled.
    const std::complex<double> e_add =
        params_.r_fb > 0.0 ? feedback_gain_ * delay_[head_] : std::complex<double>(0.0, 0.0);

    const std::complex<double> cavity_leak(0.0, params_.mu2);
    const std::complex<double> e_drop = e_add + cavity_leak * state_.a;
    StepOutput out;
    out.drop_power = std::norm(e_drop);
    out.delta_nl_hz = nonlinear_detuning(state_, params_);

    delay_[head_] = e_in + std::complex<double>(0.0, params_.mu1) * state_.a;
    head_ = head_ + 1 == delay_.size() ? 0 : head_ + 1;

    state_ = step_rk4(state_, DriveSample(e_in), DriveSample(e_add), params_, time());
    ++step_index_;
    return out;
}

FeedbackRun run_with_feedback(const Eigen::VectorXcd& input_envelope, const PhysicalParams& params) {
    CavityLoop loop(params);
    if (params.r_fb > 0.0 && input_envelope.size() < params.delay_steps())
        throw std::invalid_argument("input shorter than the feedback delay");

    FeedbackRun run;
    run.drop_power.resize(input_envelope.size());
    run.delta_nl_hz.resize(input_envelope.size());
    for (Eigen::Index i = 0; i < input_envelope.size(); ++i) {
        const auto s = loop.step(input_envelope[i]);
        run.drop_power[i] = s.drop_power;
        run.delta_nl_hz[i] = s.delta_nl_hz;
    }
    return run;
}

SelfPulsingResult detect_self_pulsing(const PhysicalParams& params, double p_in_watts,
                                      double delta_omega, const SelfPulsingOptions& opts) {
    PhysicalParams p = params;
    p.delta_omega = delta_omega;
    CavityLoop loop(p);

    const double amplitude = std::sqrt(std::max(0.0, p_in_watts));
    const double ramp = std::max(opts.ramp_time, 10.0 * p.photon_lifetime());
    const double settle = std::max(opts.settle_factor * p.tau_th, 1.5 * ramp);
    const double observe =
        std::max({opts.settle_factor * p.tau_th, opts.settle_factor * p.tau_fc, 100e-9});

    const long long ramp_steps = std::llround(ramp / p.dt);
    const long long settle_steps = std::llround(settle / p.dt);
    const long long observe_steps = std::llround(observe / p.dt);

    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    double sum = 0.0;
    for (long long i = 0; i < settle_steps + observe_steps; ++i) {
        double a = amplitude;
        if (i < ramp_steps) {
            // quintic smoothstep: C^2 turn-on
            const double x = static_cast<double>(i) / static_cast<double>(ramp_steps);
            a *= x * x * x * (10.0 + x * (-15.0 + 6.0 * x));
        }
        const auto s = loop.step({a, 0.0});
        if (i >= settle_steps) {
            lo = std::min(lo, s.drop_power);
            hi = std::max(hi, s.drop_power);
            sum += s.drop_power;
        }
    }

    SelfPulsingResult r;
    const double mean = sum / static_cast<double>(observe_steps);
    r.oscillation_depth = mean > 1e-30 ? (hi - lo) / mean : 0.0;
    r.is_pulsing = r.oscillation_depth > opts.depth_threshold;
    return r;
}

}  // namespace ringres
