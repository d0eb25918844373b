#pragma once

// Extraction of decay rates, interference fringes and derived metrics.

#include "omi/model.hpp"
#include "omi/trace.hpp"

#include <array>
#include <span>
#include <vector>

namespace omi {

struct Window {
    double t_start = 0.0;
    double t_end = 0.0;
};

// Model y(t) = baseline + amplitude * exp(-rate (t - window.t_start)).
struct FitResult {
    double rate = 0.0;  // rad/s
    double amplitude = 0.0;
    double baseline = 0.0;
    double rms_residual = 0.0;
    Window window;
    int iterations = 0;
};

inline constexpr std::size_t kMinTraceFitSamples = 20;

// Separable least squares: baseline and amplitude are solved linearly for
// each rate, the rate by a log-grid scan refined with Brent's method. Throws
// RankError (< 20 samples), FitRejectedError (no decay) or
// FitNotConvergedError (rate outside [1e-3, 1e3] / window span).
FitResult fit_exponential(const RealTrace& trace, Window window);

// Same fitter on arbitrary sample points; t_origin anchors the amplitude.
FitResult fit_exponential_points(std::span<const double> t, std::span<const double> y,
                                 std::size_t min_points, double t_origin);

struct FringeResult {
    double mean = 0.0;      // A
    double contrast = 0.0;  // B >= 0
    double phi0 = 0.0;      // fringe maximum, in [0, 2 pi); minimum at phi0 + pi
    bool phi0_defined = false;
    double visibility = 0.0;  // B / A
    double rms_residual = 0.0;
};

// Linear least squares of E(phi) = A + Bc cos(phi) + Bs sin(phi). Needs >= 5
// distinct phases covering an arc >= pi, otherwise RankError.
FringeResult fit_fringe(std::span<const double> phis, std::span<const double> energies);

// (gamma_B - gamma_D) / (gamma_B - gamma_mean); DomainError unless
// gamma_B > gamma_mean.
double suppression_metric(double gamma_B, double gamma_D, double gamma1, double gamma2);

struct DampingPrediction {
    double rate = 0.0;          // rad/s, energy damping
    bool adiabatic_ok = false;  // kappa >= 10 x max(G, gamma)
};

// gamma_j (1 + C_j) for mode j (0-based) under its own drive.
DampingPrediction predicted_total_damping(const SystemParams& params, int mode);

// Bright mode, resonant couplings: gamma_mean + 4 (G11^2 + G22^2) / kappa,
// i.e. gamma (1 + C1 + C2) for equal gammas.
DampingPrediction predicted_bright_damping(const SystemParams& params);

// Effective cooperativity implied by a fitted total damping rate.
double effective_cooperativity(double fitted_rate, double gamma_ref);

// Steady-state |alpha|^2 of the resonant-only equations under continuous
// drives, for probe shifts x (rad/s) of the signal frequency:
//   Delta(x) = Delta - x,  delta_j(x) = delta + x + two_photon_offset_j
//   alpha_ss = sqrt(kappa_ext) A_s / [i Delta + kappa/2 + sum_j G_jj^2 / (gamma_j/2 - i delta_j)]
std::vector<double> omit_spectrum(const SystemParams& params,
                                  std::span<const double> probe_shifts,
                                  std::array<double, 2> two_photon_offsets = {0.0, 0.0},
                                  cplx signal_amplitude = 1.0);

}  // namespace omi
