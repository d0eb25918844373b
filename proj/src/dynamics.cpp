#include "omi/dynamics.hpp"

#include "omi/errors.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace omi {

namespace {

constexpr cplx kI{0.0, 1.0};

// Sample layout shared by both integrators.
struct SamplePlan {
    double step = 0.0;
    std::size_t stride = 1;
    std::vector<std::size_t> stage_start;  // sample indices, size = stages + 1
};

SamplePlan plan_samples(const PulseSequence& seq, double dt, std::size_t stride) {
    SamplePlan plan{dt, stride, {}};
    const double h = dt * static_cast<double>(stride);
    std::size_t idx = 0;
    plan.stage_start.push_back(0);
    for (const Stage& s : seq.stages()) {
        const auto n = static_cast<std::size_t>(std::max(1.0, std::round(s.duration / h)));
        idx += n;
        plan.stage_start.push_back(idx);
    }
    return plan;
}

// RHS of the full equations with the per-stage constants hoisted.
class FullEquations {
  public:
    FullEquations(const SystemParams& p, const StageCoefficients& c)
        : p_(p), c_(c), sqrt_kext_(std::sqrt(p.kappa_ext)) {}

    StateVector operator()(const StateVector& s, double t) const {
        const cplx beta[2] = {s.beta1, s.beta2};
        cplx dbeta[2] = {-0.5 * p_.gamma1 * beta[0], -0.5 * p_.gamma2 * beta[1]};
        cplx scattered{};
        for (int j = 0; j < 2; ++j) {
            for (int k = 0; k < 2; ++k) {
                const double amp = c_.drive_scale[k] * p_.G[j][k];
                if (amp == 0.0 || !p_.coupled(j, k)) continue;
                const cplx e =
                    std::polar(amp, p_.two_photon_detuning(j, k) * t + c_.drive_phase[k]);
                dbeta[j] -= kI * std::conj(e) * s.alpha;
                scattered += e * beta[j];
            }
        }
        StateVector d;
        d.alpha = -(kI * p_.Delta + 0.5 * p_.kappa) * s.alpha - kI * scattered +
                  sqrt_kext_ * c_.signal_amplitude;
        d.beta1 = dbeta[0];
        d.beta2 = dbeta[1];
        return d;
    }

  private:
    const SystemParams& p_;
    const StageCoefficients& c_;
    double sqrt_kext_;
};

class AdiabaticEquations {
  public:
    AdiabaticEquations(const SystemParams& p, const StageCoefficients& c) : p_(p), c_(c) {}

    MechanicalState operator()(const MechanicalState& m, double t) const {
        const cplx alpha = adiabatic_field(m, t, p_, c_);
        const cplx beta[2] = {m.beta1, m.beta2};
        cplx dbeta[2] = {-0.5 * p_.gamma1 * beta[0], -0.5 * p_.gamma2 * beta[1]};
        for (int j = 0; j < 2; ++j) {
            for (int k = 0; k < 2; ++k) {
                const double amp = c_.drive_scale[k] * p_.G[j][k];
                if (amp == 0.0 || !p_.coupled(j, k)) continue;
                const cplx e =
                    std::polar(amp, p_.two_photon_detuning(j, k) * t + c_.drive_phase[k]);
                dbeta[j] -= kI * std::conj(e) * alpha;
            }
        }
        return {dbeta[0], dbeta[1]};
    }

  private:
    const SystemParams& p_;
    const StageCoefficients& c_;
};

MechanicalState axpy(double a, const MechanicalState& x, const MechanicalState& y) {
    return {y.beta1 + a * x.beta1, y.beta2 + a * x.beta2};
}
StateVector axpy(double a, const StateVector& x, const StateVector& y) { return y + a * x; }

template <class S, class F>
S rk4_step(const F& f, const S& y, double t, double h) {
    const S k1 = f(y, t);
    const S k2 = f(axpy(0.5 * h, k1, y), t + 0.5 * h);
    const S k3 = f(axpy(0.5 * h, k2, y), t + 0.5 * h);
    const S k4 = f(axpy(h, k3, y), t + h);
    S out = axpy(h / 6.0, k1, y);
    out = axpy(h / 3.0, k2, out);
    out = axpy(h / 3.0, k3, out);
    return axpy(h / 6.0, k4, out);
}

bool finite(const MechanicalState& m) {
    return std::isfinite(m.beta1.real()) && std::isfinite(m.beta1.imag()) &&
           std::isfinite(m.beta2.real()) && std::isfinite(m.beta2.imag());
}
bool finite(const StateVector& s) { return s.finite(); }

template <class S, class MakeEq>
Trajectory<S> run_fixed_rk4(const PulseSequence& seq, const S& init, const SamplePlan& plan,
                            MakeEq make_equations) {
    std::vector<S> samples;
    samples.reserve(plan.stage_start.back() + 1);
    samples.push_back(init);
    S y = init;
    std::size_t step_index = 0;
    for (std::size_t i = 0; i < seq.size(); ++i) {
        const auto eq = make_equations(seq.stages()[i].coeffs);
        const std::size_t n_samples = plan.stage_start[i + 1] - plan.stage_start[i];
        for (std::size_t n = 0; n < n_samples; ++n) {
            for (std::size_t r = 0; r < plan.stride; ++r, ++step_index) {
                // Absolute time from the step counter; no accumulated drift.
                const double t = static_cast<double>(step_index) * plan.step;
                y = rk4_step(eq, y, t, plan.step);
            }
            if (!finite(y)) {
                const double t = static_cast<double>(step_index) * plan.step;
                throw DivergenceError(t, "integration diverged at t = " + std::to_string(t) +
                                             " s");
            }
            samples.push_back(y);
        }
    }
    const double h = plan.step * static_cast<double>(plan.stride);
    return {Trace<S>(0.0, h, std::move(samples)), plan.stage_start};
}

using OdeState = std::array<cplx, 3>;

StateTrajectory run_adaptive(const PulseSequence& seq, const SystemParams& params,
                             const StateVector& init, const IntegratorOptions& opts,
                             const SamplePlan& plan) {
    namespace ode = boost::numeric::odeint;
    const double h = plan.step * static_cast<double>(plan.stride);
    std::vector<StateVector> samples;
    samples.reserve(plan.stage_start.back() + 1);
    samples.push_back(init);
    OdeState x{init.alpha, init.beta1, init.beta2};

    for (std::size_t i = 0; i < seq.size(); ++i) {
        const FullEquations eq(params, seq.stages()[i].coeffs);
        auto system = [&eq](const OdeState& s, OdeState& ds, double t) {
            const StateVector d = eq({s[0], s[1], s[2]}, t);
            ds = {d.alpha, d.beta1, d.beta2};
        };
        std::vector<double> times;
        for (std::size_t n = plan.stage_start[i]; n <= plan.stage_start[i + 1]; ++n) {
            times.push_back(static_cast<double>(n) * h);
        }
        bool first = true;
        auto observer = [&](const OdeState& s, double t) {
            if (first) {
                first = false;
                return;
            }
            StateVector v{s[0], s[1], s[2]};
            if (!v.finite()) {
                throw DivergenceError(t, "integration diverged at t = " + std::to_string(t) +
                                             " s");
            }
            samples.push_back(v);
        };
        auto stepper = ode::make_controlled(opts.abs_tol, opts.rel_tol,
                                            ode::runge_kutta_dopri5<OdeState>());
        ode::integrate_times(stepper, system, x, times.begin(), times.end(), plan.step,
                             observer);
    }
    return {Trace<StateVector>(0.0, h, std::move(samples)), plan.stage_start};
}

}  // namespace

double StateVector::norm2() const noexcept {
    return std::norm(alpha) + std::norm(beta1) + std::norm(beta2);
}

bool StateVector::finite() const noexcept {
    for (cplx z : {alpha, beta1, beta2}) {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    }
    return true;
}

void IntegratorOptions::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("integrator: dt must be > 0");
    if (record_stride < 1) throw DomainError("integrator: record_stride must be >= 1");
    if (method == Method::Adaptive && !(rel_tol > 0.0 && abs_tol > 0.0)) {
        throw DomainError("integrator: adaptive tolerances must be > 0");
    }
}

template <class S>
std::size_t Trajectory<S>::stage_of_sample(std::size_t n) const {
    auto it = std::upper_bound(stage_start.begin(), stage_start.end() - 1, n);
    return static_cast<std::size_t>(std::distance(stage_start.begin(), it)) - 1;
}

template struct Trajectory<StateVector>;
template struct Trajectory<MechanicalState>;

StateVector derivative(const StateVector& state, double t, const SystemParams& params,
                       const StageCoefficients& coeffs) {
    return FullEquations(params, coeffs)(state, t);
}

double stability_product(const SystemParams& p, double dt) {
    return dt * std::max({p.kappa, std::abs(p.Delta) + 0.5 * p.kappa, std::abs(p.mode_splitting())});
}

double default_time_step(const SystemParams& p) {
    const double fastest = std::max({p.kappa, std::abs(p.mode_splitting()), std::abs(p.Delta)});
    if (!(fastest > 0.0)) {
        throw DomainError("default_time_step: no finite time scale (kappa, Delta_m, Delta all 0)");
    }
    return 0.1 / fastest;
}

StateTrajectory integrate(const PulseSequence& seq, const SystemParams& params,
                          const StateVector& init, const IntegratorOptions& opts) {
    params.validate();
    opts.validate();
    if (!init.finite()) throw DomainError("integrate: initial state must be finite");
    const SamplePlan plan = plan_samples(seq, opts.dt, opts.record_stride);
    if (opts.method == Method::Adaptive) {
        return run_adaptive(seq, params, init, opts, plan);
    }
    const double prod = stability_product(params, opts.dt);
    if (prod > kMaxStabilityProduct) {
        throw StabilityError("integrate: step too large, dt*max(kappa, |Delta|+kappa/2, "
                             "|Delta_m|) = " +
                             std::to_string(prod) + " > " + std::to_string(kMaxStabilityProduct));
    }
    return run_fixed_rk4(seq, init, plan, [&params](const StageCoefficients& c) {
        return FullEquations(params, c);
    });
}

cplx adiabatic_field(const MechanicalState& mech, double t, const SystemParams& p,
                     const StageCoefficients& c) {
    const cplx beta[2] = {mech.beta1, mech.beta2};
    cplx scattered{};
    for (int j = 0; j < 2; ++j) {
        for (int k = 0; k < 2; ++k) {
            const double amp = c.drive_scale[k] * p.G[j][k];
            if (amp == 0.0 || !p.coupled(j, k)) continue;
            scattered += std::polar(amp, p.two_photon_detuning(j, k) * t + c.drive_phase[k]) *
                         beta[j];
        }
    }
    return (-kI * scattered + std::sqrt(p.kappa_ext) * c.signal_amplitude) / (0.5 * p.kappa);
}

MechanicalTrajectory integrate_adiabatic(const PulseSequence& seq, const SystemParams& params,
                                         const MechanicalState& init,
                                         const IntegratorOptions& opts) {
    params.validate();
    opts.validate();
    if (params.Delta != 0.0) {
        throw ApplicabilityError("integrate_adiabatic: requires Delta = 0");
    }
    double slowest_bound = std::max(params.gamma1, params.gamma2);
    double coupling_sum = 0.0;
    double max_detuning = 0.0;
    for (int j = 0; j < 2; ++j) {
        for (int k = 0; k < 2; ++k) {
            if (!params.coupled(j, k) || params.G[j][k] == 0.0) continue;
            coupling_sum += params.G[j][k];
            max_detuning = std::max(max_detuning, std::abs(params.two_photon_detuning(j, k)));
            slowest_bound = std::max(slowest_bound, params.G[j][k]);
        }
    }
    slowest_bound = std::max(slowest_bound, max_detuning);
    if (params.kappa < 10.0 * slowest_bound) {
        throw ApplicabilityError(
            "integrate_adiabatic: kappa must be >= 10 x max(G, gamma, |delta_jk|)");
    }
    const double rate_bound = 0.5 * std::max(params.gamma1, params.gamma2) +
                              2.0 * coupling_sum * coupling_sum / params.kappa + max_detuning;
    if (opts.dt * rate_bound > kMaxStabilityProduct) {
        throw StabilityError("integrate_adiabatic: step too large for the effective rates");
    }
    const SamplePlan plan = plan_samples(seq, opts.dt, opts.record_stride);
    return run_fixed_rk4(seq, init, plan, [&params](const StageCoefficients& c) {
        return AdiabaticEquations(params, c);
    });
}

double max_relative_difference(const StateTrajectory& a, const StateTrajectory& b) {
    if (a.states.size() != b.states.size()) {
        throw RangeError("max_relative_difference: sample grids differ");
    }
    double diff = 0.0;
    double scale = 0.0;
    for (std::size_t i = 0; i < a.states.size(); ++i) {
        const StateVector& x = a.states[i];
        const StateVector& y = b.states[i];
        diff = std::max({diff, std::abs(x.alpha - y.alpha), std::abs(x.beta1 - y.beta1),
                         std::abs(x.beta2 - y.beta2)});
        scale = std::max({scale, std::abs(y.alpha), std::abs(y.beta1), std::abs(y.beta2)});
    }
    return scale > 0.0 ? diff / scale : diff;
}

double convergence_report(const PulseSequence& seq, const SystemParams& params,
                          const StateVector& init, double dt) {
    IntegratorOptions coarse;
    coarse.dt = dt;
    coarse.record_stride = 1;
    IntegratorOptions fine = coarse;
    fine.dt = 0.5 * dt;
    fine.record_stride = 2;
    return max_relative_difference(integrate(seq, params, init, coarse),
                                   integrate(seq, params, init, fine));
}

ComplexTrace alpha_trace(const StateTrajectory& traj) {
    std::vector<cplx> a;
    a.reserve(traj.states.size());
    for (const auto& s : traj.states.samples()) a.push_back(s.alpha);
    return traj.states.with_samples(std::move(a));
}

}  // namespace omi
