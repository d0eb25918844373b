#pragma once

// Semiclassical equations of motion for the cavity field alpha and the two
// mechanical amplitudes beta1, beta2 (each in its own rotating frame):
//
//   d beta_j/dt = -(gamma_j/2) beta_j - i sum_k e^{-i delta_jk t - i phi_k} s_k G[j][k] alpha
//   d alpha/dt  = -(i Delta + kappa/2) alpha
//                 - i sum_{j,k} e^{+i delta_jk t + i phi_k} s_k G[j][k] beta_j
//                 + sqrt(kappa_ext) A_s
//
// with delta_jk = delta + (omega_mk - omega_mj). The resonant-only variant keeps
// k = j terms only.

#include "omi/model.hpp"
#include "omi/sequence.hpp"
#include "omi/trace.hpp"

#include <cstddef>
#include <vector>

namespace omi {

struct StateVector {
    cplx alpha{};
    cplx beta1{};
    cplx beta2{};

    StateVector& operator+=(const StateVector& o) noexcept {
        alpha += o.alpha;
        beta1 += o.beta1;
        beta2 += o.beta2;
        return *this;
    }
    StateVector& operator*=(cplx f) noexcept {
        alpha *= f;
        beta1 *= f;
        beta2 *= f;
        return *this;
    }
    friend StateVector operator+(StateVector a, const StateVector& b) noexcept { return a += b; }
    friend StateVector operator-(StateVector a, const StateVector& b) noexcept {
        a.alpha -= b.alpha;
        a.beta1 -= b.beta1;
        a.beta2 -= b.beta2;
        return a;
    }
    friend StateVector operator*(cplx f, StateVector a) noexcept { return a *= f; }
    friend StateVector operator*(double f, StateVector a) noexcept { return a *= f; }

    // |alpha|^2 + |beta1|^2 + |beta2|^2
    double norm2() const noexcept;
    bool finite() const noexcept;
};

enum class Method { FixedRk4, Adaptive };

struct IntegratorOptions {
    double dt = 0.0;  // step (fixed RK4) or sample spacing seed (adaptive), s
    Method method = Method::FixedRk4;
    bool adiabatic = false;  // advisory: callers pick integrate_adiabatic
    std::size_t record_stride = 1;
    double rel_tol = 1e-10;  // adaptive only
    double abs_tol = 1e-14;  // adaptive only

    void validate() const;
};

// Integrated trajectory. Samples are spaced dt * record_stride; stage i starts
// at sample stage_start[i] (boundaries are snapped to the sample grid), and
// stage_start.back() is the index of the final sample.
template <class S>
struct Trajectory {
    Trace<S> states;
    std::vector<std::size_t> stage_start;

    double stage_start_time(std::size_t i) const { return states.time(stage_start.at(i)); }
    double stage_end_time(std::size_t i) const { return states.time(stage_start.at(i + 1)); }
    std::size_t stage_of_sample(std::size_t n) const;
};

struct MechanicalState {
    cplx beta1{};
    cplx beta2{};
};

using StateTrajectory = Trajectory<StateVector>;
using MechanicalTrajectory = Trajectory<MechanicalState>;

StateVector derivative(const StateVector& state, double t, const SystemParams& params,
                       const StageCoefficients& coeffs);

// dt * max(kappa, |Delta| + kappa/2, |Delta_m|); integrate() requires <= 0.3.
double stability_product(const SystemParams& params, double dt);
inline constexpr double kMaxStabilityProduct = 0.3;

// dt with dt * max(kappa, |Delta_m|, |Delta|) = 0.1.
double default_time_step(const SystemParams& params);

// Throws StabilityError when the fixed step is too coarse and
// DivergenceError on a non-finite state.
StateTrajectory integrate(const PulseSequence& seq, const SystemParams& params,
                          const StateVector& init, const IntegratorOptions& opts);

// Cavity adiabatically eliminated: alpha is replaced by its instantaneous
// steady state. Needs Delta = 0 and kappa >= 10 x every active coupling,
// mechanical rate and two-photon detuning; otherwise ApplicabilityError.
MechanicalTrajectory integrate_adiabatic(const PulseSequence& seq, const SystemParams& params,
                                         const MechanicalState& init,
                                         const IntegratorOptions& opts);

// Instantaneous cavity steady state used by integrate_adiabatic.
cplx adiabatic_field(const MechanicalState& mech, double t, const SystemParams& params,
                     const StageCoefficients& coeffs);

// Max componentwise difference between runs at dt and dt/2, relative to the
// largest component magnitude of the finer run.
double convergence_report(const PulseSequence& seq, const SystemParams& params,
                          const StateVector& init, double dt);

// Same metric between two trajectories on an identical sample grid.
double max_relative_difference(const StateTrajectory& a, const StateTrajectory& b);

ComplexTrace alpha_trace(const StateTrajectory& traj);

}  // namespace omi
