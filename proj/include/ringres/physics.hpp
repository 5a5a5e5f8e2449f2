#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace ringres {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Thrown when the state or one of its derivatives stops being finite.
class integration_error : public std::runtime_error {
public:
    explicit integration_error(const std::string& what) : std::runtime_error(what) {}
};

// All cavity, material and feedback constants of the add-drop ring.
// Decay rates are energy rates (|a|^2 decays at gamma), couplings are
// amplitude rates: with symmetric couplers mu = sqrt(gamma_c).
// Defaults describe a silicon ring at 1550 nm with loaded Q ~ 3e4,
// 0.8 dB/cm propagation loss and a ~5e-18 m^3 mode volume.
struct PhysicalParams {
    double omega0 = 1.215259076e15;    // cold resonance (rad/s)
    double delta_omega = 0.0;          // pump detuning from resonance (rad/s, signed)
    double gamma_i = 1.314853e9;       // intrinsic energy decay (1/s)
    double gamma_c = 1.959689e10;      // energy decay per bus coupler (1/s)
    double mu1 = 1.3998889241583825e5; // input-bus coupling (1/sqrt(s))
    double mu2 = 1.3998889241583825e5; // add/drop-bus coupling (1/sqrt(s))
    double g_tpa = 9.123215e57;        // carrier generation, dN/dt = g_tpa*|a|^4 (m^-3 J^-2 s^-1)
    double tpa_loss = 1.169211e22;     // two-photon loss, gamma_TPA = tpa_loss*|a|^2 (1/(J s))
    double sigma_fca = 1.0e-21;        // free-carrier absorption cross-section (m^2)
    double dn_dN = -1.73e-27;          // carrier index coefficient (m^3), negative
    double dn_dT = 1.86e-4;            // thermo-optic coefficient (1/K), positive
    double n_si = 3.485;               // silicon refractive index
    double eta_th = 1.5e10;            // temperature rise per joule absorbed (K/J)
    double tau_fc = 10e-9;             // free-carrier lifetime (s)
    double tau_th = 50e-9;             // thermal relaxation time (s)
    double tau_d = 0.5e-9;             // feedback waveguide delay (s)
    double phi_fb = 0.0;               // feedback phase (rad)
    double r_fb = 1.0;                 // feedback amplitude transmission, [0, 1]
    double dt = 1e-12;                 // integration step (s)

    double linear_decay() const { return gamma_i + 2.0 * gamma_c; }
    double photon_lifetime() const { return 1.0 / linear_decay(); }

    long long delay_steps() const { return std::llround(tau_d / dt); }

    // Throws std::invalid_argument on any violated constraint.
    void validate() const;
};

// Instantaneous cavity state. |a|^2 is the stored energy in joules.
struct CavityState {
    std::complex<double> a{0.0, 0.0};  // modal amplitude (sqrt(J))
    double carrier_density = 0.0;      // excess free carriers (m^-3)
    double temperature_offset = 0.0;   // cavity heating (K)
};

struct CavityDerivatives {
    std::complex<double> da;
    double d_carrier;
    double d_temperature;
};

// Envelopes at the four bus ports (sqrt(W)).
struct PortFields {
    std::complex<double> e_in;
    std::complex<double> e_add;
    std::complex<double> e_through;
    std::complex<double> e_drop;
};

// Drive envelope for one integration step, sampled at t, t+dt/2, t+dt.
// Symbol-shaped inputs are piecewise constant, so the single-value form
// covers the common case.
struct DriveSample {
    std::complex<double> at_start;
    std::complex<double> at_mid;
    std::complex<double> at_end;

    DriveSample() = default;
    DriveSample(std::complex<double> v) : at_start(v), at_mid(v), at_end(v) {}
    DriveSample(std::complex<double> s, std::complex<double> m, std::complex<double> e)
        : at_start(s), at_mid(m), at_end(e) {}
};

// Resonance shift from the carrier plasma (blue, >= 0) and thermo-optic
// (red, <= 0) index changes, in Hz.
inline double nonlinear_detuning(const CavityState& s, const PhysicalParams& p) {
    const double scale = -p.omega0 / p.n_si;
    const double domega_carrier = scale * p.dn_dN * s.carrier_density;
    const double domega_thermal = scale * p.dn_dT * s.temperature_offset;
    return (domega_carrier + domega_thermal) / kTwoPi;
}

// Right-hand side of the coupled amplitude / carrier / temperature system.
// Heating is driven by the total absorbed power: linear, two-photon and
// free-carrier absorption (coupler losses radiate into the buses).
inline CavityDerivatives derivatives(const CavityState& s, std::complex<double> e_in,
                                     std::complex<double> e_add, const PhysicalParams& p) {
    const double energy = std::norm(s.a);
    const double gamma_tpa = p.tpa_loss * energy;
    const double gamma_fca = p.sigma_fca * (kSpeedOfLight / p.n_si) * s.carrier_density;
    const double gamma_abs = p.gamma_i + gamma_tpa + gamma_fca;
    const double gamma_tot = gamma_abs + 2.0 * p.gamma_c;
    const double detuning = p.delta_omega + kTwoPi * nonlinear_detuning(s, p);

    CavityDerivatives d;
    d.da = std::complex<double>(-0.5 * gamma_tot, detuning) * s.a +
           std::complex<double>(0.0, p.mu1) * e_in + std::complex<double>(0.0, p.mu2) * e_add;
    d.d_carrier = -s.carrier_density / p.tau_fc + p.g_tpa * energy * energy;
    d.d_temperature = -s.temperature_offset / p.tau_th + p.eta_th * gamma_abs * energy;

    if (!std::isfinite(d.da.real()) || !std::isfinite(d.da.imag()))
        throw integration_error("non-finite modal amplitude derivative");
    if (!std::isfinite(d.d_carrier))
        throw integration_error("non-finite carrier density derivative");
    if (!std::isfinite(d.d_temperature))
        throw integration_error("non-finite temperature derivative");
    return d;
}

// One classical fixed-step RK4 update. `t` is only used in error messages.
inline CavityState step_rk4(const CavityState& s, const DriveSample& e_in,
                            const DriveSample& e_add, const PhysicalParams& p, double t = 0.0) {
    const double dt = p.dt;
    const double h2 = 0.5 * dt;

    const CavityDerivatives k1 = derivatives(s, e_in.at_start, e_add.at_start, p);
    CavityState m{s.a + h2 * k1.da, s.carrier_density + h2 * k1.d_carrier,
                  s.temperature_offset + h2 * k1.d_temperature};
    const CavityDerivatives k2 = derivatives(m, e_in.at_mid, e_add.at_mid, p);
    m = CavityState{s.a + h2 * k2.da, s.carrier_density + h2 * k2.d_carrier,
                    s.temperature_offset + h2 * k2.d_temperature};
    const CavityDerivatives k3 = derivatives(m, e_in.at_mid, e_add.at_mid, p);
    m = CavityState{s.a + dt * k3.da, s.carrier_density + dt * k3.d_carrier,
                    s.temperature_offset + dt * k3.d_temperature};
    const CavityDerivatives k4 = derivatives(m, e_in.at_end, e_add.at_end, p);

    const double w = dt / 6.0;
    CavityState out;
    out.a = s.a + w * (k1.da + 2.0 * k2.da + 2.0 * k3.da + k4.da);
    out.carrier_density =
        s.carrier_density + w * (k1.d_carrier + 2.0 * k2.d_carrier + 2.0 * k3.d_carrier + k4.d_carrier);
    out.temperature_offset =
        s.temperature_offset +
        w * (k1.d_temperature + 2.0 * k2.d_temperature + 2.0 * k3.d_temperature + k4.d_temperature);

    // Sources are non-negative and decay is exponential; clip the tiny
    // negative excursions the discrete update can produce near zero.
    if (out.carrier_density < 0.0) out.carrier_density = 0.0;
    if (out.temperature_offset < 0.0) out.temperature_offset = 0.0;

    if (!std::isfinite(out.a.real()) || !std::isfinite(out.a.imag()) ||
        !std::isfinite(out.carrier_density) || !std::isfinite(out.temperature_offset))
        throw integration_error("integration failure at t = " + std::to_string(t) + " s");
    return out;
}

// Port outputs for the current state. The bus fields pass the couplers with
// unit direct transmission; the cavity contributes with an i*mu coefficient
// on both buses.
inline PortFields output_fields(const CavityState& s, std::complex<double> e_in,
                                std::complex<double> e_add, const PhysicalParams& p) {
    PortFields f;
    f.e_in = e_in;
    f.e_add = e_add;
    f.e_through = e_in + std::complex<double>(0.0, p.mu1) * s.a;
    f.e_drop = e_add + std::complex<double>(0.0, p.mu2) * s.a;
    return f;
}

// Silicon defaults (same values as the member initializers).
PhysicalParams silicon_defaults();

}  // namespace ringres
