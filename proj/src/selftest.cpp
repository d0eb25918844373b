#include "omi/selftest.hpp"

#include "omi/analysis.hpp"
#include "omi/config.hpp"
#include "omi/detection.hpp"
#include "omi/dynamics.hpp"
#include "omi/errors.hpp"
#include "omi/model.hpp"
#include "omi/sequence.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <random>

namespace omi {

namespace {

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

CheckOutcome verdict(bool ok, std::string detail) { return {ok, std::move(detail)}; }

SystemParams make_system(double c1, double c2, Variant v, double g1_hz = 3.5e3,
                         double g2_hz = 3.6e3) {
    ParamsInput in;
    in.omega_m1_hz = 69.48e6;
    in.omega_m2_hz = 69.66e6;
    in.gamma1_hz = g1_hz;
    in.gamma2_hz = g2_hz;
    in.kappa_hz = 1.6e6;
    in.drives[0].cooperativity = c1;
    in.drives[1].cooperativity = c2;
    in.variant = v;
    return make_params(in);
}

Stage stage(double duration, cplx signal, double p1, double p2, double s1, double s2) {
    Stage st;
    st.duration = duration;
    st.coeffs.signal_amplitude = signal;
    st.coeffs.drive_phase = {p1, p2};
    st.coeffs.drive_scale = {s1, s2};
    return st;
}

IntegratorOptions rk4(double dt) {
    IntegratorOptions o;
    o.dt = dt;
    return o;
}

double state_distance(const StateVector& a, const StateVector& b) {
    return std::sqrt((a - b).norm2());
}

CheckOutcome check_unitarity() {
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst_norm = 0.0;
    double worst_trip = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const cplx b1{u(rng), u(rng)};
        const cplx b2{u(rng), u(rng)};
        const double p1 = 4.0 * u(rng);
        const double p2 = 4.0 * u(rng);
        const double g1 = 1.0 + std::abs(u(rng)) * 1e5;
        const double g2 = 1.0 + std::abs(u(rng)) * 1e5;
        const auto pair = bright_dark_decompose(b1, b2, p1, p2, g1, g2);
        const double n_in = std::norm(b1) + std::norm(b2);
        const double n_out = std::norm(pair.beta_B) + std::norm(pair.beta_D);
        worst_norm = std::max(worst_norm, std::abs(n_out - n_in) / n_in);
        const auto back = bright_dark_compose(pair, p1, p2, g1, g2);
        worst_trip = std::max(worst_trip, std::abs(back[0] - b1) + std::abs(back[1] - b2));
    }
    return verdict(worst_norm < 1e-12 && worst_trip < 1e-12,
                   fmt("norm error %.2e, round-trip error %.2e (limit 1e-12)", worst_norm,
                       worst_trip));
}

CheckOutcome check_cooperativity_round_trip() {
    double worst = 0.0;
    for (double c : {0.0, 0.1, 1.0, 1.6, 2.1, 10.0}) {
        for (double gamma : {2.0e4, 2.3e4}) {
            const double kappa = 1.0e7;
            const double back = cooperativity(coupling_from_cooperativity(c, gamma, kappa), gamma,
                                              kappa);
            worst = std::max(worst, std::abs(back - c) / std::max(c, 1.0));
        }
    }
    return verdict(worst < 1e-12, fmt("max relative error %.2e (limit 1e-12)", worst));
}

CheckOutcome check_gauge() {
    const SystemParams p = make_system(1.3, 1.0, Variant::Full);
    const double c = 0.77;
    const PulseSequence a({stage(20e-6, {1.0, 0.2}, 0.3, -1.1, 1, 1),
                           stage(20e-6, 0.0, 2.0, -1.1, 1, 1)});
    const PulseSequence b({stage(20e-6, {1.0, 0.2}, 0.3 + c, -1.1 + c, 1, 1),
                           stage(20e-6, 0.0, 2.0 + c, -1.1 + c, 1, 1)});
    const StateVector x0{{0.1, 0.0}, {0.3, -0.2}, {-0.1, 0.4}};
    const cplx rot = std::polar(1.0, -c);
    const StateVector y0{x0.alpha, x0.beta1 * rot, x0.beta2 * rot};
    const auto opts = rk4(default_time_step(p));
    const auto ta = integrate(a, p, x0, opts);
    const auto tb = integrate(b, p, y0, opts);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < ta.states.size(); ++i) {
        const StateVector& s = ta.states[i];
        const StateVector expect{s.alpha, s.beta1 * rot, s.beta2 * rot};
        num = std::max(num, state_distance(tb.states[i], expect));
        den = std::max(den, std::sqrt(s.norm2()));
    }
    const double err = num / den;
    return verdict(err < 1e-9, fmt("common phase shift changes the state by %.2e (limit 1e-9)", err));
}

CheckOutcome check_linearity() {
    const SystemParams p = make_system(1.3, 1.0, Variant::Full);
    const cplx a{0.7, -0.4};
    const cplx b{-1.3, 0.25};
    const cplx A{1.0, 0.5};
    auto seq = [&](cplx amp) {
        return PulseSequence({stage(20e-6, amp, 0.1, 0.9, 1, 1), stage(20e-6, 0.0, 0.4, 0.9, 1, 1)});
    };
    const StateVector x0{{0.2, 0.1}, {0.5, 0.0}, {0.0, -0.3}};
    const StateVector y0{{-0.1, 0.0}, {0.1, 0.2}, {0.4, 0.1}};
    const auto opts = rk4(default_time_step(p));
    const auto tx = integrate(seq(A), p, x0, opts);
    const auto ty = integrate(seq(0.0), p, y0, opts);
    const auto tz = integrate(seq(a * A), p, a * x0 + b * y0, opts);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < tz.states.size(); ++i) {
        const StateVector expect = a * tx.states[i] + b * ty.states[i];
        num = std::max(num, state_distance(tz.states[i], expect));
        den = std::max(den, std::sqrt(tz.states[i].norm2()));
    }
    const double err = num / den;
    return verdict(err < 1e-9, fmt("superposition error %.2e (limit 1e-9)", err));
}

CheckOutcome check_rk4_order() {
    const OrderReport r = rk4_convergence();
    const double worst = *std::min_element(r.orders.begin(), r.orders.end());
    return verdict(worst >= 3.7, fmt("observed orders %.3f %.3f %.3f (need >= 3.7)", r.orders[0],
                                     r.orders[1], r.orders[2]));
}

RealTrace mode_energy(const Trace<MechanicalState>& tr) {
    std::vector<double> e(tr.size());
    for (std::size_t i = 0; i < tr.size(); ++i) e[i] = std::norm(tr[i].beta1);
    return tr.with_samples(std::move(e));
}

RealTrace mode_energy(const Trace<StateVector>& tr) {
    std::vector<double> e(tr.size());
    for (std::size_t i = 0; i < tr.size(); ++i) e[i] = std::norm(tr[i].beta1);
    return tr.with_samples(std::move(e));
}

CheckOutcome check_adiabatic_vs_full() {
    const SystemParams p = make_system(1.6, 0.0, Variant::ResonantOnly);
    const PulseSequence seq({stage(0.3e-3, 0.0, 0.0, 0.0, 1, 0)});
    const auto opts = rk4(default_time_step(p));
    const auto full = integrate(seq, p, StateVector{0.0, 1.0, 0.0}, opts);
    const auto adia = integrate_adiabatic(seq, p, MechanicalState{1.0, 0.0}, opts);
    const Window w{0.0, 0.3e-3};
    const double r_full = fit_exponential(mode_energy(full.states), w).rate;
    const double r_adia = fit_exponential(mode_energy(adia.states), w).rate;
    const double pred = predicted_total_damping(p, 0).rate;
    const double d_full = std::abs(r_full - r_adia) / r_adia;
    const double d_pred = std::abs(r_adia - pred) / pred;
    return verdict(d_full < 0.02 && d_pred < 0.01,
                   fmt("full %.1f Hz, adiabatic %.1f Hz (diff %.2e, limit 0.02); predicted %.1f Hz "
                       "(diff %.2e, limit 0.01)",
                       angular_to_hz(r_full), angular_to_hz(r_adia), d_full, angular_to_hz(pred),
                       d_pred));
}

CheckOutcome check_filter_transfer() {
    const double bw = 50e3;
    const double dt = 1e-8;
    const std::size_t n = 200000;  // 2 ms, > 600 filter time constants
    double worst = 0.0;
    std::string detail;
    for (double f : {0.0, 25e3, 50e3, 180e3}) {
        std::vector<cplx> x(n);
        for (std::size_t i = 0; i < n; ++i) x[i] = std::polar(1.0, kTwoPi * f * dt * i);
        const ComplexTrace y = demodulate(ComplexTrace(0.0, dt, x), 0.0, bw);
        const double measured = std::abs(y[n - 1]);
        const double expect = 1.0 / std::sqrt(1.0 + (f / bw) * (f / bw));
        const double rel = std::abs(measured - expect) / expect;
        worst = std::max(worst, rel);
        detail += fmt("%.0f kHz: %.4f vs %.4f; ", f / 1e3, measured, expect);
    }
    detail += fmt("max relative error %.2e (limit 0.02)", worst);
    return verdict(worst < 0.02, detail);
}

CheckOutcome check_demodulation_linearity() {
    const double dt = 1e-8;
    const std::size_t n = 5000;
    std::vector<cplx> x(n), y(n), z(n);
    const cplx a{0.3, 1.2};
    const cplx b{-2.0, 0.1};
    for (std::size_t i = 0; i < n; ++i) {
        const double t = dt * i;
        x[i] = std::polar(1.0, 7e5 * t) * std::exp(-2e4 * t);
        y[i] = {std::cos(3e5 * t), 0.5};
        z[i] = a * x[i] + b * y[i];
    }
    const double off = -hz_to_angular(180e3);
    const auto dx = demodulate(ComplexTrace(0.0, dt, x), off, 50e3);
    const auto dy = demodulate(ComplexTrace(0.0, dt, y), off, 50e3);
    const auto dz = demodulate(ComplexTrace(0.0, dt, z), off, 50e3);
    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) err = std::max(err, std::abs(dz[i] - a * dx[i] - b * dy[i]));
    return verdict(err < 1e-12, fmt("superposition error %.2e (limit 1e-12)", err));
}

CheckOutcome check_energy_additivity() {
    const double dt = 1e-7;
    std::vector<double> v(4001);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::exp(-5e3 * dt * i);
    const RealTrace tr(0.0, dt, v);
    const double whole = energy_in_window(tr, 1.23e-5, 3.5e-4);
    const double parts = energy_in_window(tr, 1.23e-5, 1.777e-4) +
                         energy_in_window(tr, 1.777e-4, 3.5e-4);
    const double err = std::abs(whole - parts) / whole;
    return verdict(err < 1e-12, fmt("split vs whole window %.2e (limit 1e-12)", err));
}

CheckOutcome check_fitter_round_trip() {
    const double rate = hz_to_angular(9.1e3);
    std::vector<double> v(401);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = 0.05 + 2.0 * std::exp(-rate * 1e-6 * i);
    const RealTrace tr(0.0, 1e-6, v);
    const Window w{0.0, 0.4e-3};
    const FitResult f = fit_exponential(tr, w);
    std::vector<double> scaled = v;
    for (auto& s : scaled) s *= 7.3;
    const FitResult g = fit_exponential(tr.with_samples(scaled), w);
    const double e_rate = std::abs(f.rate - rate) / rate;
    const double e_amp = std::abs(f.amplitude - 2.0) / 2.0 + std::abs(f.baseline - 0.05) / 0.05;
    const double e_scale = std::abs(g.rate - f.rate) / f.rate +
                           std::abs(g.amplitude - 7.3 * f.amplitude) / (7.3 * f.amplitude);

    std::vector<double> phis, energies;
    for (int i = 0; i < 24; ++i) {
        phis.push_back(kTwoPi * i / 24.0);
        energies.push_back(2.0 + 0.7 * std::cos(phis.back() - 0.3));
    }
    const FringeResult fr = fit_fringe(phis, energies);
    const double e_fringe = std::abs(fr.phi0 - 0.3) + std::abs(fr.contrast - 0.7) + fr.rms_residual;
    const bool ok = e_rate < 1e-6 && e_amp < 1e-6 && e_scale < 1e-9 && e_fringe < 1e-10;
    return verdict(ok, fmt("rate %.2e, amplitude %.2e, scale equivariance %.2e, fringe %.2e",
                           e_rate, e_amp, e_scale, e_fringe));
}

CheckOutcome check_dark_decoupling() {
    const SystemParams p = make_system(1.05, 1.05, Variant::ResonantOnly, 3.55e3, 3.55e3);
    const double g1 = p.G[0][0];
    const double g2 = p.G[1][1];
    const auto b = bright_dark_compose({0.0, 1.0}, 0.0, 0.0, g1, g2);
    const PulseSequence seq({stage(0.3e-3, 0.0, 0.0, 0.0, 1, 1)});
    const auto tr = integrate(seq, p, StateVector{0.0, b[0], b[1]}, rk4(default_time_step(p)));
    double max_alpha = 0.0;
    double max_rel = 0.0;
    for (std::size_t i = 0; i < tr.states.size(); ++i) {
        const StateVector& s = tr.states[i];
        max_alpha = std::max(max_alpha, std::abs(s.alpha));
        const double bd = std::abs(bright_dark_decompose(s.beta1, s.beta2, 0.0, 0.0, g1, g2).beta_D);
        const double expect = std::exp(-0.5 * p.gamma1 * tr.states.time(i));
        max_rel = std::max(max_rel, std::abs(bd - expect) / expect);
    }
    return verdict(max_alpha < 1e-8 && max_rel < 1e-4,
                   fmt("max|alpha| %.2e (limit 1e-8), |beta_D| vs exp(-gamma t/2) %.2e (limit 1e-4)",
                       max_alpha, max_rel));
}

CheckOutcome check_omit_steady_state() {
    double worst = 0.0;
    std::string detail;
    for (double c : {0.5, 1.6, 5.0}) {
        const SystemParams p = make_system(c, 0.0, Variant::ResonantOnly);
        const PulseSequence seq({stage(1.5e-3, 1.0, 0.0, 0.0, 1, 0)});
        IntegratorOptions o = rk4(default_time_step(p));
        o.record_stride = 1000;
        const auto tr = integrate(seq, p, StateVector{}, o);
        const double td = std::norm(tr.states[tr.states.size() - 1].alpha);
        const double zero = 0.0;
        const double fd = omit_spectrum(p, std::span<const double>(&zero, 1))[0];
        const double rel = std::abs(td - fd) / fd;
        worst = std::max(worst, rel);
        detail += fmt("C=%.1f: %.4e vs %.4e; ", c, td, fd);
    }
    detail += fmt("max relative difference %.2e (limit 5e-3)", worst);
    return verdict(worst < 5e-3, detail);
}

CheckOutcome check_stability_rejected() {
    const SystemParams p = make_system(1.6, 0.0, Variant::ResonantOnly);
    const PulseSequence seq({stage(10e-6, 1.0, 0.0, 0.0, 1, 0)});
    const double dt = 10.0 * default_time_step(p);
    try {
        (void)integrate(seq, p, StateVector{}, rk4(dt));
    } catch (const StabilityError& e) {
        return verdict(true, fmt("dt = %.3g s rejected: %s", dt, e.what()));
    }
    return verdict(false, fmt("dt = %.3g s (stability product %.2f) was accepted", dt,
                              stability_product(p, dt)));
}

CheckOutcome check_corrupted_config() {
    static constexpr std::string_view fixture = R"({
  "system": {"omega_m1_hz": 69.48e6, "omega_m2_hz": 69.66e6, "gamma1_hz": "fast",
             "gamma2_hz": 3.6e3, "kappa_hz": 1.6e6, "drives": [{"C": 1.6}, {"C": 0}]},
  "sequence": {"preset": "two_mode"}
})";
    try {
        (void)parse_config(fixture);
    } catch (const ConfigError& e) {
        const bool ok = e.path() == "system.gamma1_hz";
        return verdict(ok, fmt("rejected at '%s' (expected system.gamma1_hz)", e.path().c_str()));
    }
    return verdict(false, "corrupted fixture was accepted");
}

}  // namespace

OrderReport rk4_convergence() {
    const SystemParams p = make_system(1.3, 1.0, Variant::Full);
    const PulseSequence seq({stage(10e-6, {1.0, 0.3}, 0.2, 1.0, 1, 1),
                             stage(10e-6, 0.0, 2.5, 1.0, 1, 1)});
    const StateVector init{{0.0, 0.0}, {0.5, 0.1}, {-0.2, 0.3}};
    const double dt0 = 2.5e-8;  // stability product ~0.25
    auto final_state = [&](double dt) {
        const auto tr = integrate(seq, p, init, rk4(dt));
        return tr.states[tr.states.size() - 1];
    };
    const StateVector ref = final_state(dt0 / 64.0);
    OrderReport r;
    for (int k = 0; k < 4; ++k) {
        const double dt = dt0 / static_cast<double>(1 << k);
        r.dts.push_back(dt);
        r.errors.push_back(state_distance(final_state(dt), ref));
    }
    for (std::size_t k = 0; k + 1 < r.errors.size(); ++k) {
        r.orders.push_back(std::log2(r.errors[k] / r.errors[k + 1]));
    }
    return r;
}

const std::vector<Check>& selftest_checks() {
    static const std::vector<Check> checks{
        {"unitarity", check_unitarity},
        {"cooperativity_round_trip", check_cooperativity_round_trip},
        {"gauge_invariance", check_gauge},
        {"linearity", check_linearity},
        {"rk4_order", check_rk4_order},
        {"adiabatic_vs_full", check_adiabatic_vs_full},
        {"filter_transfer", check_filter_transfer},
        {"demodulation_linearity", check_demodulation_linearity},
        {"energy_additivity", check_energy_additivity},
        {"fitter_round_trip", check_fitter_round_trip},
        {"dark_decoupling", check_dark_decoupling},
        {"omit_steady_state", check_omit_steady_state},
        {"stability_rejected", check_stability_rejected},
        {"corrupted_config", check_corrupted_config},
    };
    return checks;
}

CheckResult run_check(std::string_view name) {
    const auto& all = selftest_checks();
    const auto it = std::find_if(all.begin(), all.end(), [&](const Check& c) { return c.name == name; });
    if (it == all.end()) throw DomainError("selftest: unknown check '" + std::string(name) + "'");
    CheckResult r;
    r.name = it->name;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        r.outcome = it->run();
    } catch (const std::exception& e) {
        r.outcome = {false, std::string("threw: ") + e.what()};
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

bool SelftestReport::passed() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const CheckResult& c) { return c.outcome.passed; });
}

SelftestReport run_selftest() {
    SelftestReport rep;
    const auto t0 = std::chrono::steady_clock::now();
    for (const auto& c : selftest_checks()) rep.checks.push_back(run_check(c.name));
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

}  // namespace omi
