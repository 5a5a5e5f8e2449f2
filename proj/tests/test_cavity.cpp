#include <doctest.h>

#include <cmath>
#include <complex>

#include "ringres/cavity.hpp"
#include "ringres/rng.hpp"

using namespace ringres;
using cplx = std::complex<double>;

namespace {

PhysicalParams linear_params() {
    PhysicalParams p;
    p.g_tpa = 0.0;
    p.tpa_loss = 0.0;
    p.sigma_fca = 0.0;
    p.eta_th = 0.0;
    return p;
}

double dbm_to_watts_local(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }

// C2 turn-on followed by a CW hold, sampled on the dt grid
Eigen::VectorXcd ramped_cw(double amplitude, double ramp_s, double total_s, double dt) {
    const Eigen::Index n = static_cast<Eigen::Index>(std::llround(total_s / dt));
    const Eigen::Index nr = static_cast<Eigen::Index>(std::llround(ramp_s / dt));
    Eigen::VectorXcd env(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double a = amplitude;
        if (i < nr) {
            const double x = static_cast<double>(i) / static_cast<double>(nr);
            a *= x * x * x * (10.0 + x * (-15.0 + 6.0 * x));
        }
        env[i] = cplx(a, 0.0);
    }
    return env;
}

}  // namespace

TEST_SUITE_BEGIN("cavity");

TEST_CASE("population std is exactly zero for constant traces") {
    Eigen::VectorXd v = Eigen::VectorXd::Constant(1001, 0.123456789);
    CHECK(population_std(v) == 0.0);
    Eigen::VectorXd two(2);
    two << -1.0, 1.0;
    CHECK(population_std(two) == doctest::Approx(1.0).epsilon(1e-15));
    Eigen::VectorXd ramp = Eigen::VectorXd::LinSpaced(100, 0.0, 1.0);
    CHECK(population_std(ramp) > 0.0);
}

TEST_CASE("all-zero input yields all-zero drop power and zero spread") {
    const PhysicalParams p;
    const Eigen::VectorXcd zeros = Eigen::VectorXcd::Zero(2000);
    const FeedbackRun run = run_with_feedback(zeros, p);
    CHECK(run.drop_power.maxCoeff() == 0.0);
    CHECK(run.drop_power.minCoeff() == 0.0);
    CHECK(population_std(run.delta_nl_hz) == 0.0);
}

TEST_CASE("severed feedback equals the open-loop integration") {
    PhysicalParams p;
    p.r_fb = 0.0;
    p.delta_omega = kTwoPi * 5e9;
    Rng rng(3);
    Eigen::VectorXcd drive(4000);
    for (auto& d : drive) d = cplx(std::sqrt(1e-3) * rng.uniform01(), 0.0);

    const FeedbackRun run = run_with_feedback(drive, p);

    CavityState s;
    for (Eigen::Index i = 0; i < drive.size(); ++i) {
        const cplx e_drop = cplx(0.0, p.mu2) * s.a;  // no add-port field
        CHECK(run.drop_power[i] == std::norm(e_drop));
        s = step_rk4(s, DriveSample(drive[i]), DriveSample(cplx(0, 0)), p);
    }
}

TEST_CASE("closed-loop CW steady state matches the algebraic loop solve") {
    PhysicalParams p = linear_params();
    p.delta_omega = kTwoPi * 2e9;
    const double amp = std::sqrt(1e-3);

    const Eigen::VectorXcd env = ramped_cw(amp, 150e-9, 700e-9, p.dt);
    const FeedbackRun run = run_with_feedback(env, p);

    // independent fixed-point iteration of the scalar loop equation
    const cplx i(0.0, 1.0);
    const cplx pole = cplx(0.5 * p.linear_decay(), 0.0) - i * p.delta_omega;
    const cplx gain = p.r_fb * std::exp(i * p.phi_fb);
    const cplx e_in(amp, 0.0);
    cplx e_th = e_in;
    for (int it = 0; it < 100000; ++it) {
        const cplx e_add = gain * e_th;
        const cplx a = (i * p.mu1 * e_in + i * p.mu2 * e_add) / pole;
        const cplx next = e_in + i * p.mu1 * a;
        if (std::abs(next - e_th) < 1e-16 * std::abs(next)) {
            e_th = next;
            break;
        }
        e_th = next;
    }
    const cplx e_add = gain * e_th;
    const cplx a = (i * p.mu1 * e_in + i * p.mu2 * e_add) / pole;
    const double expected = std::norm(e_add + i * p.mu2 * a);

    CHECK(run.drop_power[run.drop_power.size() - 1] ==
          doctest::Approx(expected).epsilon(1e-6));
}

TEST_CASE("input shorter than the delay is rejected in closed loop") {
    const PhysicalParams p;  // tau_d = 0.5 ns -> 500 steps
    const Eigen::VectorXcd tiny = Eigen::VectorXcd::Zero(100);
    CHECK_THROWS_AS(run_with_feedback(tiny, p), std::invalid_argument);
}

TEST_CASE("run_with_feedback is deterministic") {
    PhysicalParams p;
    p.delta_omega = -kTwoPi * 40e9;
    Rng rng(21);
    Eigen::VectorXcd drive(3000);
    for (auto& d : drive) d = cplx(std::sqrt(3e-3) * rng.uniform01(), 0.0);
    const FeedbackRun r1 = run_with_feedback(drive, p);
    const FeedbackRun r2 = run_with_feedback(drive, p);
    CHECK(r1.drop_power == r2.drop_power);
    CHECK(r1.delta_nl_hz == r2.delta_nl_hz);
}

TEST_CASE("linearized cavity never self-pulses") {
    PhysicalParams p = linear_params();
    for (const double det_ghz : {0.0, 40.0, 300.0}) {
        const auto r = detect_self_pulsing(p, 1e-2, kTwoPi * det_ghz * 1e9);
        CAPTURE(det_ghz);
        CHECK_FALSE(r.is_pulsing);
        CHECK(r.oscillation_depth < 1e-9);
    }
}

TEST_CASE("negligible drive power never self-pulses") {
    const PhysicalParams p;  // nonlinearities active
    for (const double det_ghz : {0.0, -100.0}) {
        const auto r = detect_self_pulsing(p, 1e-7, kTwoPi * det_ghz * 1e9);  // -40 dBm
        CAPTURE(det_ghz);
        CHECK_FALSE(r.is_pulsing);
    }
}

TEST_CASE("high power near resonance self-pulses at tau_fc = 10 ns") {
    PhysicalParams p;
    p.tau_fc = 10e-9;
    const auto r = detect_self_pulsing(p, dbm_to_watts_local(20.0), 0.0);
    CHECK(r.is_pulsing);
    CHECK(r.oscillation_depth > 0.05);

    // the limit cycle is physical: it survives halving the step
    PhysicalParams ph = p;
    ph.dt = p.dt / 2.0;
    const auto r2 = detect_self_pulsing(ph, dbm_to_watts_local(20.0), 0.0);
    CHECK(r2.is_pulsing);
}

TEST_SUITE_END();
