#pragma once

// Physical parameters of the three-mode system (one optical mode, two
// mechanical modes, two red-sideband drives) and the bright/dark transform.
//
// Conventions: every rate and frequency stored in SystemParams is angular
// (rad/s). Configuration files carry ordinary frequencies (Hz) and go through
// make_params(), which converts. gamma_j and kappa are energy damping rates, so
// amplitudes decay at gamma_j/2 and kappa/2.

#include <array>
#include <complex>
#include <numbers>
#include <optional>

namespace omi {

using cplx = std::complex<double>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

constexpr double hz_to_angular(double hz) noexcept { return kTwoPi * hz; }
constexpr double angular_to_hz(double w) noexcept { return w / kTwoPi; }

enum class Variant {
    ResonantOnly,  // each drive couples only to its own mode
    Full,          // adds the two-photon non-resonant cross couplings
};

// G[j][k]: coupling of drive k to mechanical mode j (rad/s), 0-based.
using CouplingMatrix = std::array<std::array<double, 2>, 2>;

struct SystemParams {
    double omega_m1 = 0.0;
    double omega_m2 = 0.0;
    double gamma1 = 0.0;
    double gamma2 = 0.0;
    double kappa = 0.0;
    double kappa_ext = 0.0;
    double Delta = 0.0;  // omega_0 - omega_s
    double delta = 0.0;  // common two-photon detuning
    CouplingMatrix G{};
    Variant variant = Variant::ResonantOnly;

    double mode_splitting() const noexcept { return omega_m2 - omega_m1; }
    double gamma(int mode) const noexcept { return mode == 0 ? gamma1 : gamma2; }
    double gamma_mean() const noexcept { return 0.5 * (gamma1 + gamma2); }

    // delta_jk = delta + (omega_mk - omega_mj)
    double two_photon_detuning(int mode, int drive) const noexcept;

    // Whether drive k couples to mode j under the active variant.
    bool coupled(int mode, int drive) const noexcept {
        return variant == Variant::Full || mode == drive;
    }

    // Throws DomainError on a violated invariant.
    void validate() const;
};

// Cooperativity C = 4 g^2 / (gamma kappa).
double cooperativity(double g, double gamma, double kappa);

// Inverse of cooperativity(): g = sqrt(C gamma kappa) / 2.
double coupling_from_cooperativity(double C, double gamma, double kappa);

// Per-drive coupling: exactly one of the two is set.
struct DriveCoupling {
    std::optional<double> g_hz;
    std::optional<double> cooperativity;
};

// Ordinary-frequency description of a system, as found in config files.
struct ParamsInput {
    double omega_m1_hz = 0.0;
    double omega_m2_hz = 0.0;
    double gamma1_hz = 0.0;
    double gamma2_hz = 0.0;
    double kappa_hz = 0.0;
    std::optional<double> kappa_ext_hz;  // default kappa / 2
    double Delta_hz = 0.0;
    double delta_hz = 0.0;
    std::array<DriveCoupling, 2> drives{};
    // Ratio of single-photon rates g2/g1; sets the default cross couplings
    // G[1][0] = rho G[0][0] and G[0][1] = G[1][1] / rho.
    double rho = 1.0;
    std::optional<double> g_mode2_drive1_hz;  // explicit G[1][0]
    std::optional<double> g_mode1_drive2_hz;  // explicit G[0][1]
    Variant variant = Variant::ResonantOnly;
};

// Converts to angular units, resolves C -> G per drive (drive k uses
// gamma_k) and fills the cross couplings. Throws DomainError.
SystemParams make_params(const ParamsInput& in);

struct SuperpositionPair {
    cplx beta_B;
    cplx beta_D;
};

// beta_B = (e^{i phi1} g1 beta1 + e^{i phi2} g2 beta2) / N
// beta_D = (e^{-i phi2} g2 beta1 - e^{-i phi1} g1 beta2) / N,  N = sqrt(g1^2 + g2^2)
SuperpositionPair bright_dark_decompose(cplx beta1, cplx beta2, double phi1, double phi2,
                                        double g1, double g2);

// Inverse of bright_dark_decompose; returns {beta1, beta2}.
std::array<cplx, 2> bright_dark_compose(const SuperpositionPair& pair, double phi1, double phi2,
                                        double g1, double g2);

}  // namespace omi
