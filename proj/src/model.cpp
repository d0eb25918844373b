#include "omi/model.hpp"

#include "omi/errors.hpp"

#include <cmath>
#include <string>

namespace omi {

namespace {

void require_finite_nonneg(double v, const char* name) {
    if (!std::isfinite(v) || v < 0.0) {
        throw DomainError(std::string(name) + " must be finite and >= 0");
    }
}

double norm_of(double g1, double g2) {
    const double n = std::hypot(g1, g2);
    if (!(n > 0.0)) {
        throw DegenerateTransformError("bright/dark transform needs g1^2 + g2^2 > 0");
    }
    return n;
}

}  // namespace

double SystemParams::two_photon_detuning(int mode, int drive) const noexcept {
    const double wm[2] = {omega_m1, omega_m2};
    return delta + (wm[drive] - wm[mode]);
}

void SystemParams::validate() const {
    require_finite_nonneg(gamma1, "gamma1");
    require_finite_nonneg(gamma2, "gamma2");
    require_finite_nonneg(kappa, "kappa");
    require_finite_nonneg(kappa_ext, "kappa_ext");
    require_finite_nonneg(omega_m1, "omega_m1");
    require_finite_nonneg(omega_m2, "omega_m2");
    for (const auto& row : G) {
        for (double g : row) require_finite_nonneg(g, "coupling G");
    }
    if (!std::isfinite(Delta) || !std::isfinite(delta)) {
        throw DomainError("detunings must be finite");
    }
    if (kappa_ext > kappa) {
        throw DomainError("kappa_ext must not exceed kappa");
    }
    if (variant == Variant::Full && omega_m1 == omega_m2) {
        throw DomainError("full variant needs omega_m1 != omega_m2");
    }
}

double cooperativity(double g, double gamma, double kappa) {
    if (!(gamma > 0.0) || !(kappa > 0.0)) {
        throw DomainError("cooperativity: gamma and kappa must be > 0");
    }
    return 4.0 * g * g / (gamma * kappa);
}

double coupling_from_cooperativity(double C, double gamma, double kappa) {
    if (!(C >= 0.0)) {
        throw DomainError("coupling_from_cooperativity: C must be >= 0");
    }
    if (!(gamma > 0.0) || !(kappa > 0.0)) {
        throw DomainError("coupling_from_cooperativity: gamma and kappa must be > 0");
    }
    return 0.5 * std::sqrt(C * gamma * kappa);
}

SystemParams make_params(const ParamsInput& in) {
    SystemParams p;
    p.omega_m1 = hz_to_angular(in.omega_m1_hz);
    p.omega_m2 = hz_to_angular(in.omega_m2_hz);
    p.gamma1 = hz_to_angular(in.gamma1_hz);
    p.gamma2 = hz_to_angular(in.gamma2_hz);
    p.kappa = hz_to_angular(in.kappa_hz);
    p.kappa_ext = in.kappa_ext_hz ? hz_to_angular(*in.kappa_ext_hz) : 0.5 * p.kappa;
    p.Delta = hz_to_angular(in.Delta_hz);
    p.delta = hz_to_angular(in.delta_hz);
    p.variant = in.variant;

    for (int k = 0; k < 2; ++k) {
        const auto& d = in.drives[k];
        if (d.g_hz.has_value() == d.cooperativity.has_value()) {
            throw DomainError("drive " + std::to_string(k + 1) +
                              ": exactly one of G or C must be given");
        }
        p.G[k][k] = d.g_hz ? hz_to_angular(*d.g_hz)
                           : coupling_from_cooperativity(*d.cooperativity, p.gamma(k), p.kappa);
    }

    if (!(in.rho > 0.0) || !std::isfinite(in.rho)) {
        throw DomainError("rho must be finite and > 0");
    }
    p.G[1][0] = in.g_mode2_drive1_hz ? hz_to_angular(*in.g_mode2_drive1_hz) : in.rho * p.G[0][0];
    p.G[0][1] = in.g_mode1_drive2_hz ? hz_to_angular(*in.g_mode1_drive2_hz) : p.G[1][1] / in.rho;

    p.validate();
    return p;
}

SuperpositionPair bright_dark_decompose(cplx beta1, cplx beta2, double phi1, double phi2,
                                        double g1, double g2) {
    const double n = norm_of(g1, g2);
    const cplx e1 = std::polar(1.0, phi1);
    const cplx e2 = std::polar(1.0, phi2);
    return {(e1 * g1 * beta1 + e2 * g2 * beta2) / n,
            (std::conj(e2) * g2 * beta1 - std::conj(e1) * g1 * beta2) / n};
}

std::array<cplx, 2> bright_dark_compose(const SuperpositionPair& pair, double phi1, double phi2,
                                        double g1, double g2) {
    const double n = norm_of(g1, g2);
    const cplx e1 = std::polar(1.0, phi1);
    const cplx e2 = std::polar(1.0, phi2);
    // Adjoint of the decomposition matrix.
    return {(std::conj(e1) * g1 * pair.beta_B + e2 * g2 * pair.beta_D) / n,
            (std::conj(e2) * g2 * pair.beta_B - e1 * g1 * pair.beta_D) / n};
}

}  // namespace omi
