#include "ringres/physics.hpp"

#include <cmath>

namespace ringres {

namespace {

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

void PhysicalParams::validate() const {
    require(omega0 > 0.0, "omega0 must be positive");
    require(gamma_i > 0.0, "gamma_i must be positive");
    require(gamma_c > 0.0, "gamma_c must be positive");
    require(mu1 >= 0.0 && mu2 >= 0.0, "coupling coefficients must be non-negative");
    require(g_tpa >= 0.0, "g_tpa must be non-negative");
    require(tpa_loss >= 0.0, "tpa_loss must be non-negative");
    require(sigma_fca >= 0.0, "sigma_fca must be non-negative");
    require(n_si > 0.0, "n_si must be positive");
    require(eta_th >= 0.0, "eta_th must be non-negative");
    require(tau_fc > 0.0, "tau_fc must be positive");
    require(tau_th > 0.0, "tau_th must be positive");
    require(tau_d >= 0.0, "tau_d must be non-negative");
    require(r_fb >= 0.0 && r_fb <= 1.0, "r_fb must be within [0, 1]");
    require(dt > 0.0, "dt must be positive");

    // Step-size constraints: always resolve the cavity, and resolve the
    // carrier dynamics once they are slower than 100 ps.
    require(dt <= photon_lifetime() / 10.0 * (1.0 + 1e-12),
            "dt must not exceed one tenth of the photon lifetime");
    if (tau_fc >= 100e-12)
        require(dt <= tau_fc / 10.0 * (1.0 + 1e-12),
                "dt must not exceed tau_fc/10 for carrier lifetimes >= 100 ps");

    // The delay buffer indexes whole steps, so the delay must sit on the grid.
    const double steps = tau_d / dt;
    require(std::abs(steps - std::llround(steps)) <= 1e-6 * (steps + 1.0),
            "tau_d must be an integer multiple of dt");
    if (r_fb > 0.0)
        require(delay_steps() >= 1, "closed-loop runs need tau_d >= dt");
}

PhysicalParams silicon_defaults() { return PhysicalParams{}; }

}  // namespace ringres
